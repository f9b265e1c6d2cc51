#include "doctest.h"
#include "support.hpp"

#include "specmono/detect.hpp"
#include "specmono/errors.hpp"

#include <cmath>

using namespace specmono;

namespace {

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));
const Vec2 kOmegaStar{3.0, 3.0 * kGolden};

SemiclassicalParams sc(double h, int noise_order = 3) {
    SemiclassicalParams p;
    p.h = h;
    p.noise_order = noise_order;
    p.seed = 5;
    return p;
}

std::shared_ptr<const ActionChart> flat_chart(const Vec2& offset = Vec2::Zero()) {
    return std::make_shared<const ActionChart>(
        action_coords_at(make_flat_model(kOmegaStar, "xi_weighted", offset), Vec2::Zero()));
}

bool near_integer(const Mat2& m, double tol) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (std::abs(m(i, j) - std::round(m(i, j))) > tol) return false;
    return true;
}

std::vector<IVec2> stripped_truth(const SpectrumCloud& cloud, const HChart& hc) {
    std::vector<IVec2> out;
    for (std::size_t i : hc.point_index) out.push_back(*cloud.points[i].k_true);
    return out;
}

}  // namespace

TEST_CASE("chi: exact round trip (property)") {
    testing::Gen gen(1);
    for (int i = 0; i < 100; ++i) {
        const Vec2 u{gen.uniform(-5, 5), gen.uniform(-5, 5)};
        const double eps = gen.uniform(1e-3, 1.0);
        const Complex z = chi(u, eps);
        CHECK(z.real() == u.x());
        CHECK(z.imag() == eps * u.y());
        CHECK((chi_inverse(z, eps) - u).norm() <= 1e-15 * (1.0 + u.norm()));
    }
    CHECK_THROWS_AS(chi_inverse({1.0, 1.0}, 0.0), DomainError);
}

TEST_CASE("gauss reduction: reduced and spanning the same lattice (property)") {
    testing::Gen gen(2);
    for (int i = 0; i < 200; ++i) {
        Mat2 base;
        base << gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1);
        if (std::abs(base.determinant()) < 0.05) continue;
        const IMat2 U = gen.unimodular(6);
        const Mat2 skewed = base * U.cast<double>();
        const LatticeBasis r = gauss_reduce(skewed.col(0), skewed.col(1));
        CHECK(r.b1.norm() <= r.b2.norm() * (1 + 1e-12));
        CHECK(r.b1.dot(r.b2) >= -1e-12);
        CHECK(r.b1.dot(r.b2) <= 0.5 * r.b1.squaredNorm() * (1 + 1e-9));
        const Mat2 coords = base.inverse() * r.matrix();
        CHECK(near_integer(coords, 1e-8));
        CHECK(std::abs(std::abs(coords.determinant()) - 1.0) < 1e-8);
    }
}

TEST_CASE("detect basis: square grid and too few points") {
    std::vector<Vec2> u;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) u.emplace_back(0.01 * i, 0.01 * j);
    const LatticeBasis b = detect_basis(u);
    CHECK(b.b1.norm() == doctest::Approx(0.01));
    CHECK(b.b2.norm() == doctest::Approx(0.01));
    CHECK(std::abs(b.b1.dot(b.b2)) < 1e-12);
    CHECK(b.condition() == doctest::Approx(1.0));

    const std::vector<Vec2> few(u.begin(), u.begin() + 10);
    CHECK_THROWS_AS(detect_basis(few), DetectError);
}

TEST_CASE("detect basis: flat cloud recovers h dphi up to GL(2, Z)") {
    const auto chart = flat_chart();
    const auto p = sc(1e-3);
    const SpectrumCloud cloud = synth_spectrum({chart, default_higher_terms()}, Vec2::Zero(), p, {2.0});
    const LatticeBasis b = detect_basis(cloud);
    const Mat2 expected = p.h * chart->jacobian(Vec2::Zero());
    const Mat2 U = expected.inverse() * b.matrix();
    CHECK(near_integer(U, 0.01));
    CHECK(std::abs(std::abs(U.determinant()) - 1.0) < 0.02);
}

TEST_CASE("fit: blind labels differ from synthesis labels by an integer gauge") {
    const auto chart = flat_chart({0.2, 0.7});
    const auto p = sc(1e-3);
    const SpectrumCloud cloud = synth_spectrum({chart, default_higher_terms()}, {0.02, 0.01}, p, {2.0});
    const HChart hc = fit_hchart(cloud, {0.02, 0.01});
    CHECK(hc.accepted);
    CHECK(hc.labeled_fraction() >= 0.99);
    CHECK(hc.max_residual <= 0.05);
    const auto gauge = solve_gauge(hc.labels, stripped_truth(cloud, hc));
    REQUIRE(gauge.has_value());
    CHECK(std::abs(det(gauge->M)) == 1.0);
    for (std::size_t i = 0; i < hc.labels.size(); ++i)
        CHECK(gauge->M * hc.labels[i] + gauge->c == *cloud.points[hc.point_index[i]].k_true);

    HChart aligned = hc;
    align_to_truth(aligned, cloud);
    for (std::size_t i = 0; i < aligned.labels.size(); ++i)
        CHECK(aligned.labels[i] == *cloud.points[aligned.point_index[i]].k_true);
}

TEST_CASE("fit: noiseless flat spectrum with the chart hint is reproduced exactly") {
    const auto chart = flat_chart({0.1, 0.3});
    const auto p = sc(1e-3, 12);
    const SpectrumCloud cloud = synth_spectrum({chart, {}}, Vec2::Zero(), p, {2.0});
    const HChart hc = fit_hchart(cloud, Vec2::Zero(), chart);
    CHECK(hc.fit.uses_hint());
    CHECK(hc.max_residual < 1e-10);
}

TEST_CASE("fit: regauging relabels the points and keeps the residuals (property)") {
    const auto chart = flat_chart();
    const auto p = sc(1e-3);
    const SpectrumCloud cloud = synth_spectrum({chart, default_higher_terms()}, Vec2::Zero(), p, {2.0});
    const HChart base = fit_hchart(cloud, Vec2::Zero());
    testing::Gen gen(4);
    for (int trial = 0; trial < 10; ++trial) {
        const IMat2 M = gen.unimodular(5);
        const IVec2 c{gen.integer(-50, 50), gen.integer(-50, 50)};
        HChart hc = base;
        hc.regauge(M, c);
        for (std::size_t i = 0; i < hc.labels.size(); i += 37) {
            CHECK(hc.labels[i] == M * base.labels[i] + c);
            const Vec2 k = hc.labels[i].cast<double>();
            CHECK((hc(hc.u[i]) / p.h - k).lpNorm<Eigen::Infinity>() < 0.05);
        }
        CHECK(hc.max_residual == doctest::Approx(base.max_residual).epsilon(1e-6));
    }
}

TEST_CASE("poly map: affine transform acts exactly on the coefficients (property)") {
    testing::Gen gen(6);
    for (int trial = 0; trial < 20; ++trial) {
        PolyMap map(2, {0.1, 0.2}, 0.05, nullptr);
        map.coefficients() = Eigen::MatrixXd::Random(static_cast<Eigen::Index>(map.size()), 2);
        PolyMap moved = map;
        Mat2 M;
        M << gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2), gen.uniform(-2, 2);
        const Vec2 shift{gen.uniform(-1, 1), gen.uniform(-1, 1)};
        moved.transform(M, shift);
        for (int i = 0; i < 5; ++i) {
            const Vec2 u{gen.uniform(0, 0.2), gen.uniform(0.1, 0.3)};
            CHECK((moved(u) - (M * map(u) + shift)).norm() < 1e-12);
            CHECK((moved.jacobian(u) - M * map.jacobian(u)).norm() < 1e-11);
        }
    }
}

TEST_CASE("invert_leading: agrees with forward action formulas on random targets") {
    // Champagne: xi = (l, I_r(E, l)) is given directly by the radial action integral.
    const ModelPtr model = make_champagne_model(2.0);
    const ActionChart chart = action_coords(model, {0.6, 0.25});
    testing::Gen gen(8);
    for (int i = 0; i < 100; ++i) {
        const Vec2 target = gen.in_box(chart.domain(), 0.05);
        const Vec2 xi = invert_leading(chart, target);
        CHECK(std::abs(xi.x() - target.y()) < 1e-10);
        CHECK(std::abs(xi.y() - champagne_radial_action(2.0, target.x(), target.y())) < 1e-10);
    }
    // Flat: xi_2 = G and xi_1 solves the quadratic of p on the sheet through xi = 0.
    const auto flat = flat_chart();
    for (int i = 0; i < 100; ++i) {
        const Vec2 target = gen.in_box(flat->domain(), 0.05);
        const double g = target.y();
        const double xi1 = -kOmegaStar.x() + std::sqrt(kOmegaStar.x() * kOmegaStar.x() +
                                                       2.0 * (target.x() - kOmegaStar.y() * g - 0.5 * g * g));
        CHECK((invert_leading(*flat, target) - Vec2{xi1, g}).norm() < 1e-10);
    }
}
