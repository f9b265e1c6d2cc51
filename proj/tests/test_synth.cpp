#include "doctest.h"
#include "support.hpp"

#include "specmono/errors.hpp"
#include "specmono/synth.hpp"

#include <cmath>
#include <map>
#include <set>

using namespace specmono;

namespace {

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));
const Vec2 kOmegaStar{3.0, 3.0 * kGolden};

SemiclassicalParams sc(double h, int noise_order = 3, std::uint64_t seed = 1) {
    SemiclassicalParams p;
    p.h = h;
    p.delta = 0.5;
    p.noise_order = noise_order;
    p.seed = seed;
    return p;
}

NormalFormSymbol flat_symbol(const Vec2& offset, std::vector<HigherTerm> higher = {}) {
    const ModelPtr model = make_flat_model(kOmegaStar, "xi_weighted", offset);
    return {std::make_shared<const ActionChart>(action_coords_at(model, Vec2::Zero())), std::move(higher)};
}

/// Closed-form flat spectrum: xi_k = h k - offset, mu = p(xi) + i eps xi_2 + noise, kept inside the rectangle.
std::map<std::pair<long, long>, Complex> flat_oracle(const Vec2& offset, const Vec2& a, const SemiclassicalParams& p,
                                                     double C0) {
    const double eps = std::pow(p.h, p.delta);
    const double hw = eps / C0;
    std::map<std::pair<long, long>, Complex> out;
    // The window maps into xi within |xi - xi_a| <~ hw / min|omega| of the centre; scan generously.
    const double reach = 4.0 * hw;
    const Vec2 xi_a{-kOmegaStar.x() + std::sqrt(kOmegaStar.x() * kOmegaStar.x() +
                                                  2.0 * (a.x() - kOmegaStar.y() * a.y() - 0.5 * a.y() * a.y())),
                    a.y()};
    const auto k_lo = ((xi_a + offset).array() - reach) / p.h;
    const auto k_hi = ((xi_a + offset).array() + reach) / p.h;
    for (long k1 = std::lround(std::floor(k_lo.x())); k1 <= std::lround(std::ceil(k_hi.x())); ++k1)
        for (long k2 = std::lround(std::floor(k_lo.y())); k2 <= std::lround(std::ceil(k_hi.y())); ++k2) {
            const Vec2 xi = p.h * Vec2{double(k1), double(k2)} - offset;
            const double energy = kOmegaStar.dot(xi) + 0.5 * xi.squaredNorm();
            const Complex mu = Complex{energy, eps * xi.y()} +
                               synth_noise(p.seed, IVec2{k1, k2}, std::pow(p.h, p.noise_order));
            if (std::abs(mu.real() - a.x()) <= hw && std::abs(mu.imag() - eps * a.y()) <= eps * hw)
                out.emplace(std::pair{k1, k2}, mu);
        }
    return out;
}

}  // namespace

TEST_CASE("good rectangle: sizes and containment") {
    const auto p = sc(1e-4);
    const GoodRectangle r = good_rectangle(Vec2{0.3, -0.2}, p, 4.0);
    CHECK(r.epsilon == doctest::Approx(1e-2));
    CHECK(r.half_width == doctest::Approx(1e-2 / 4.0));
    CHECK(r.half_height == doctest::Approx(1e-4 / 4.0));
    CHECK(r.center == Complex{0.3, -0.2e-2});
    CHECK(r.contains(r.center + 0.999 * Complex{r.half_width, -r.half_height}));
    CHECK_FALSE(r.contains(r.center + Complex{1.01 * r.half_width, 0.0}));
    const Box box = r.value_box();
    CHECK((box.center() - Vec2{0.3, -0.2}).norm() < 1e-15);
    CHECK(box.size().x() == doctest::Approx(2 * r.half_width));
    CHECK_THROWS_AS(good_rectangle(Vec2{0.0, 0.0}, p, 0.5), DomainError);
    GoodValueNode bad;
    CHECK_THROWS_AS(good_rectangle(bad, p), DomainError);
}

TEST_CASE("semiclassical parameters: validation") {
    CHECK_THROWS_AS(sc(0.5).validate(), DomainError);
    CHECK_THROWS_AS(sc(1e-3, 0).validate(), DomainError);
    SemiclassicalParams p = sc(1e-3);
    p.delta = 0.95;  // eps / h = h^(delta - 1) < 10
    CHECK_THROWS_AS(p.validate(), DomainError);
    CHECK(sc(1e-3).with_h(1e-4).h == 1e-4);
}

TEST_CASE("synthesis: flat spectrum equals the closed-form enumeration") {
    for (const Vec2& offset : {Vec2{0.0, 0.0}, Vec2{0.25, -0.5}, Vec2{0.0123, 0.3}}) {
        const NormalFormSymbol symbol = flat_symbol(offset);
        for (const Vec2& a : {Vec2{0.0, 0.0}, Vec2{0.05, 0.02}}) {
            const auto p = sc(1e-3);
            SynthOptions opt;
            opt.C0 = 2.0;
            const SpectrumCloud cloud = synth_spectrum(symbol, a, p, opt);
            const auto oracle = flat_oracle(offset, a, p, 2.0);
            CHECK(cloud.size() == oracle.size());
            CHECK(cloud.size() > 100);
            for (const auto& pt : cloud.points) {
                REQUIRE(pt.k_true.has_value());
                const auto it = oracle.find({long(pt.k_true->x()), long(pt.k_true->y())});
                REQUIRE(it != oracle.end());
                CHECK(std::abs(pt.mu - it->second) < 1e-12);
            }
        }
    }
}

TEST_CASE("synthesis: lattice spacing follows h times the frequency") {
    const NormalFormSymbol symbol = flat_symbol(Vec2::Zero());
    const auto p = sc(1e-3, 8);
    const SpectrumCloud cloud = synth_spectrum(symbol, Vec2::Zero(), p);
    std::map<std::pair<long, long>, Complex> by_k;
    for (const auto& pt : cloud.points) by_k.emplace(std::pair{long(pt.k_true->x()), long(pt.k_true->y())}, pt.mu);
    int pairs = 0;
    for (const auto& [k, mu] : by_k) {
        const auto next = by_k.find({k.first + 1, k.second});
        if (next == by_k.end()) continue;
        const double xi1 = p.h * k.first;
        // p(xi + h e1) - p(xi) = h (omega_1 + xi_1) + h^2 / 2 exactly.
        CHECK(std::abs((next->second - mu).real() - (p.h * (kOmegaStar.x() + xi1) + 0.5 * p.h * p.h)) < 1e-12);
        CHECK(std::abs((next->second - mu).imag()) < 1e-15);
        ++pairs;
    }
    CHECK(pairs > 100);
}

TEST_CASE("synthesis: points are distinct, sorted and deterministic (property)") {
    testing::Gen gen(17);
    const NormalFormSymbol symbol = flat_symbol({0.1, 0.2}, default_higher_terms());
    for (int trial = 0; trial < 4; ++trial) {
        const Vec2 a{gen.uniform(-0.05, 0.05), gen.uniform(-0.05, 0.05)};
        const auto seed = static_cast<std::uint64_t>(gen.integer(0, 1000000));
        const auto p = sc(2e-3, 3, seed);
        const SpectrumCloud one = synth_spectrum(symbol, a, p, {2.0});
        const SpectrumCloud two = synth_spectrum(symbol, a, p, {2.0});
        REQUIRE(one.size() == two.size());
        std::set<std::pair<long, long>> ks;
        for (std::size_t i = 0; i < one.size(); ++i) {
            CHECK(one.points[i].mu == two.points[i].mu);
            CHECK(one.rectangle.contains(one.points[i].mu));
            ks.emplace(long(one.points[i].k_true->x()), long(one.points[i].k_true->y()));
            if (i > 0) {
                const Complex prev = one.points[i - 1].mu, cur = one.points[i].mu;
                CHECK((prev.real() < cur.real() || (prev.real() == cur.real() && prev.imag() <= cur.imag())));
            }
        }
        CHECK(ks.size() == one.size());
        const SpectrumCloud other = synth_spectrum(symbol, a, sc(2e-3, 3, seed + 1), {2.0});
        bool differs = other.size() != one.size();
        for (std::size_t i = 0; !differs && i < one.size(); ++i) differs = other.points[i].mu != one.points[i].mu;
        CHECK(differs);
    }
}

TEST_CASE("synthesis: noiseless points invert exactly to their lattice actions") {
    const NormalFormSymbol symbol = flat_symbol({0.3, 0.1});
    const auto p = sc(1e-3, 12);
    const SpectrumCloud cloud = synth_spectrum(symbol, {0.01, 0.0}, p);
    const double eps = p.epsilon();
    CHECK((cloud.tau - Vec2{0.3, 0.1}).norm() < 1e-12);
    for (const auto& pt : cloud.points) {
        const Vec2 xi = symbol.chart->xi_of({pt.mu.real(), pt.mu.imag() / eps});
        const Vec2 expected = p.h * pt.k_true->cast<double>() - cloud.tau;
        CHECK((xi - expected).norm() < 1e-10);
    }
}

TEST_CASE("synthesis: champagne spectrum stays inside the band") {
    const ModelPtr model = make_champagne_model(2.0);
    const auto chart = std::make_shared<const ActionChart>(action_coords(model, {0.6, 0.25}));
    const NormalFormSymbol symbol{chart, default_higher_terms()};
    const auto p = sc(1e-3);
    const SpectrumCloud cloud = synth_spectrum(symbol, chart->base(), p, {2.0});
    CHECK(cloud.size() > 100);
    CHECK(cloud.eta == IVec2{0, 2});
    const Interval band = spectral_band(*chart, chart->base().x(), cloud.rectangle.half_width, p);
    for (const auto& pt : cloud.points) CHECK(band.contains(pt.mu.imag()));
}

TEST_CASE("higher terms: validation and bound") {
    CHECK_NOTHROW(validate_higher_terms(default_higher_terms()));
    CHECK_THROWS_AS(validate_higher_terms({{1, 0, 0, 0, {1.0, 0.0}}}), DomainError);
    CHECK_THROWS_AS(validate_higher_terms({{2, 2, 0, 0, {0.1, 0.0}}}), DomainError);
    CHECK_THROWS_AS(validate_higher_terms({{0, 0, 0, 1, {0.0, 0.1}}}), DomainError);
    const NormalFormSymbol symbol = flat_symbol(Vec2::Zero(), default_higher_terms());
    const double eps = 0.03, h = 1e-3;
    const Box box = Box::around({0.1, 0.1}, 0.05);
    const Vec2 bound = higher_term_bound(symbol, box, eps, h);
    testing::Gen gen(2);
    for (int i = 0; i < 50; ++i) {
        const Complex z = symbol.higher_part(gen.in_box(box), eps, h);
        CHECK(std::abs(z.real()) <= bound.x());
        CHECK(std::abs(z.imag()) / eps <= bound.y());
    }
}
