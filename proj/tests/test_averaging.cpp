#include "doctest.h"
#include "support.hpp"

#include "specmono/averaging.hpp"

#include <cmath>

using namespace specmono;

namespace {

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));

TrigPolynomial cos_x1() {
    TrigPolynomial q;
    q.add(1.0, Vec2::Zero(), IVec2{1, 0}, TrigPolynomial::Kind::Cos);
    return q;
}

/// (1/T) int_{-T/2}^{T/2} cos(x + w t) dt in closed form.
double cos_time_average(double x, double w, double T) { return 2.0 * std::cos(x) * std::sin(0.5 * w * T) / (w * T); }

}  // namespace

TEST_CASE("torus average: closed forms") {
    CHECK(std::abs(torus_average(cos_x1(), {0.3, 0.1})) < 1e-14);
    const ModelPtr constant = make_flat_model({1.0, kGolden}, "constant");
    CHECK(torus_average(constant->q_symbol(), {0.3, 0.1}) == doctest::Approx(3.0));
    const ModelPtr weighted = make_flat_model({1.0, kGolden}, "xi_weighted");
    CHECK(torus_average(weighted->q_symbol(), {0.3, 0.5}) == doctest::Approx(0.5));
}

TEST_CASE("torus average: trapezoid agrees with the symbol mean (property)") {
    testing::Gen gen(3);
    TrigPolynomial q;
    q.add(0.4, Vec2{1.0, -0.5}, IVec2::Zero(), TrigPolynomial::Kind::Cos);
    q.add(0.7, Vec2{0.2, 0.0}, IVec2{1, -2}, TrigPolynomial::Kind::Cos);
    q.add(-0.3, Vec2::Zero(), IVec2{3, 1}, TrigPolynomial::Kind::Sin);
    for (int i = 0; i < 30; ++i) {
        const Vec2 xi{gen.uniform(-1, 1), gen.uniform(-1, 1)};
        CHECK(torus_average(q, xi) == doctest::Approx(q.mean(xi)).epsilon(1e-12));
        CHECK(torus_average(q, xi, 16) == doctest::Approx(torus_average(q, xi, 64)).epsilon(1e-12));
    }
}

TEST_CASE("time average: single harmonic against its closed form (property)") {
    testing::Gen gen(9);
    for (int i = 0; i < 30; ++i) {
        const Vec2 omega{gen.uniform(0.3, 3.0), gen.uniform(-2, 2)};
        const Vec2 x0{gen.uniform(0, kTwoPi), gen.uniform(0, kTwoPi)};
        const double T = gen.uniform(5.0, 300.0);
        const double v = time_average(cos_x1(), omega, Vec2::Zero(), x0, T);
        // Simpson at 50 steps per period: relative error about (2 pi / 50)^4 / 180.
        CHECK(std::abs(v - cos_time_average(x0.x(), omega.x(), T)) < 1e-7);
        CHECK(std::abs(v) <= 2.0 / (omega.x() * T) + 1e-12);
    }
}

TEST_CASE("time average: a frozen angle keeps its initial value") {
    // omega_1 = 0: x_1 never moves, so the average of cos x_1 is cos(x0_1) for every T.
    const Vec2 x0{kPi / 3.0, 1.0};
    for (double T : {10.0, 100.0, 1000.0})
        CHECK(time_average(cos_x1(), {0.0, 1.0}, Vec2::Zero(), x0, T) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("q_infinity: collapses for an irrational flow and spreads for a resonant one") {
    TrigPolynomial q;
    q.add(1.0, Vec2::Zero(), IVec2{0, 1}, TrigPolynomial::Kind::Cos);
    const Interval ergodic = q_infinity(q, {1.0, kGolden}, Vec2::Zero(), {100.0, 1000.0});
    CHECK(ergodic.width() < 0.01);
    CHECK(ergodic.contains(0.0, 1e-12));
    const Interval resonant = q_infinity(q, {1.0, 0.0}, Vec2::Zero(), {100.0, 1000.0});
    CHECK(resonant.width() > 1.0);
    CHECK(torus_sample(16).size() == 16);
}

TEST_CASE("ergodic constant: stable across decades for the golden flow") {
    const Vec2 omega{1.0, kGolden};
    TrigPolynomial q;
    q.add(1.0, Vec2::Zero(), IVec2{1, 0}, TrigPolynomial::Kind::Cos);
    q.add(0.5, Vec2::Zero(), IVec2{1, -1}, TrigPolynomial::Kind::Cos);
    const Vec2 x0{0.3, 0.2};
    const double c2 = ergodic_constant(q, omega, Vec2::Zero(), x0, 1e2);
    const double c3 = ergodic_constant(q, omega, Vec2::Zero(), x0, 1e3);
    const double c4 = ergodic_constant(q, omega, Vec2::Zero(), x0, 1e4);
    CHECK(c2 > 0.0);
    CHECK(std::max({c2, c3, c4}) <= 2.0 * std::min({c2, c3, c4}));
}

TEST_CASE("average report on a flat chart") {
    const ActionChart chart = action_coords_at(make_flat_model({1.0, kGolden}, "xi_weighted"), Vec2::Zero());
    const AverageReport r = average_report(chart, {0.05, 0.1}, {0.0, 0.0}, {100.0, 1000.0});
    CHECK(r.torus_avg == doctest::Approx(0.1));
    REQUIRE(r.time_avgs.size() == 2);
    CHECK(std::abs(r.time_avgs[1].second - r.torus_avg) < std::abs(r.time_avgs[0].second - r.torus_avg) + 1e-3);
    CHECK(r.q_infinity.contains(r.torus_avg, 1e-3));
}
