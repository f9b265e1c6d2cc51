#include "doctest.h"
#include "support.hpp"

#include "specmono/errors.hpp"
#include "specmono/monodromy.hpp"

#include <cmath>

using namespace specmono;

namespace {

const double kGolden = 0.5 * (1.0 + std::sqrt(5.0));

AtlasOptions flat_options() {
    AtlasOptions o;
    o.params.h = 1e-3;
    o.params.seed = 3;
    o.C0 = 2.0;
    return o;
}

/// 3 x 3 block of overlapping charts around the origin of the flat model.
const PseudoChartAtlas& flat_grid_atlas() {
    static const PseudoChartAtlas atlas = [] {
        const ModelPtr model = make_flat_model({3.0, 3.0 * kGolden}, "xi_weighted");
        const AtlasOptions opt = flat_options();
        const double step = 0.8 * atlas_max_step(opt);
        std::vector<Vec2> centers;
        for (int j = -1; j <= 1; ++j)
            for (int i = -1; i <= 1; ++i) centers.emplace_back(step * i, step * j);
        return build_spectral_atlas(model, centers, opt);
    }();
    return atlas;
}

/// 2 int p_r dr of the champagne bottle by the trapezoid rule in r = r- + (r+ - r-)(1 - cos t) / 2,
/// with the turning points found by bisection on the effective potential.
double oracle_radial_action(double b, double E, double l, int n = 4000) {
    auto v_eff = [&](double r) { return l * l / (2 * r * r) + r * r * r * r - b * r * r; };
    double r_min = 1e-4;
    for (int i = 1; i <= 4000; ++i) {
        const double r = 1e-4 + 3.0 * i / 4000;
        if (v_eff(r) < v_eff(r_min)) r_min = r;
    }
    auto bisect = [&](double lo, double hi) {
        const bool rising = E < v_eff(lo);
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            ((E < v_eff(mid)) == rising ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double rm = bisect(1e-12, r_min), rp = bisect(r_min, 10.0);
    const double half = 0.5 * (rp - rm);
    double sum = 0.0;
    for (int i = 1; i < n; ++i) {
        const double t = kPi * i / n;
        const double r = rm + half * (1 - std::cos(t));
        sum += std::sqrt(std::max(2.0 * (E - v_eff(r)), 0.0)) * half * std::sin(t);
    }
    return sum / n;  // (1 / pi) int p_r dr = I_r
}

}  // namespace

TEST_CASE("loop helpers") {
    const Loop c = Loop::circle({1.0, 2.0}, 0.5, 8, 2);
    REQUIRE(c.vertices.size() == 8);
    CHECK(c.windings == 2);
    for (const auto& v : c.vertices) CHECK((v - Vec2{1.0, 2.0}).norm() == doctest::Approx(0.5));
    const Loop r = c.reversed();
    CHECK(r.vertices.size() == 8);
    const Loop p = c.perturbed(0.1, 9);
    for (std::size_t i = 0; i < 8; ++i) CHECK((p.vertices[i] - c.vertices[i]).norm() <= 0.05 + 1e-12);
    CHECK(cyclic_indices(3) == std::vector<std::size_t>{0, 1, 2});

    const ModelPtr champ = make_champagne_model(2.0);
    // This triangle has an edge through the focus-focus value.
    CHECK_THROWS_AS(loop_covering(*champ, Loop{{{-0.1, 0.0}, {0.1, 0.0}, {0.0, 0.1}}}), MonodromyError);
    const auto centers = loop_covering(*champ, Loop::circle({0.8, 0.3}, 0.2, 8), 0.4, 0.02);
    for (std::size_t i = 0; i < centers.size(); ++i)
        CHECK((centers[i] - centers[(i + 1) % centers.size()]).norm() <= 0.02 + 1e-12);
}

TEST_CASE("flat atlas: transitions are unimodular and satisfy the cocycle") {
    const PseudoChartAtlas& atlas = flat_grid_atlas();
    REQUIRE(atlas.size() == 9);
    const TransitionTable table = compute_transitions(atlas);
    CHECK(table.size() >= 2 * 16);
    for (const auto& [key, t] : table) {
        CHECK(std::abs(det(t.M)) == 1.0);
        CHECK(t.rounding_error <= kRoundingThreshold);
        CHECK(t.M * table.at({key.second, key.first}).M == IMat2::Identity());
    }
    const CocycleReport report = cocycle_check(atlas, table);
    CHECK(report.ok());
    CHECK(report.triples > 0);

    // The boundary ring of the block encloses no singular value.
    const MonodromyClass ring = loop_monodromy(atlas, {0, 1, 2, 5, 8, 7, 6, 3});
    CHECK(ring.product == IMat2::Identity());
    const MonodromyClass single = loop_monodromy(atlas, {4});
    CHECK(single.product == IMat2::Identity());
}

TEST_CASE("flat atlas: a tampered transition is caught by the cocycle check") {
    const PseudoChartAtlas& atlas = flat_grid_atlas();
    TransitionTable table = compute_transitions(atlas);
    IMat2 shear;
    shear << 1, 1, 0, 1;
    table.at({0, 1}).M = table.at({0, 1}).M * shear;
    const CocycleReport report = cocycle_check(atlas, table);
    CHECK_FALSE(report.ok());
    bool pair_flagged = false;
    for (const auto& v : report.violations) pair_flagged = pair_flagged || (v.i == 0 && v.j == 1);
    CHECK(pair_flagged);
}

TEST_CASE("flat atlas: regauging a chart conjugates the loop product") {
    PseudoChartAtlas atlas = flat_grid_atlas();
    const std::vector<std::size_t> loop{0, 1, 4, 3};
    const IMat2 before = loop_monodromy(atlas, loop).product;
    IMat2 G;
    G << 2, 1, 1, 1;
    atlas.charts[0].hchart.regauge(G, IVec2{4, -7});
    const IMat2 after = loop_monodromy(atlas, loop).product;
    CHECK(gl2z_conjugate(before, after));
    CHECK(cocycle_check(atlas).ok());
}

TEST_CASE("classical monodromy: flat model and small loops are trivial") {
    const ModelPtr flat = make_flat_model({3.0, 3.0 * kGolden}, "xi_weighted", {0.25, 0.5});
    CHECK(classical_monodromy(flat, Loop::circle({0.0, 0.0}, 0.3, 12)).product == IMat2::Identity());
    const ModelPtr champ = make_champagne_model(2.0);
    CHECK(classical_monodromy(champ, Loop::circle({0.8, 0.3}, 0.3, 12)).product == IMat2::Identity());
}

TEST_CASE("classical monodromy: champagne loop matches a branch-tracking oracle") {
    // Continue xi_2 = I_r + j l around the focus-focus value, choosing j at each step by
    // linear extrapolation of the two previous values. The final j is the twist.
    const double b = 2.0, radius = 0.5;
    const int steps = 1500;
    std::vector<double> track;
    int j = 0;
    for (int s = 0; s <= steps; ++s) {
        const double t = 0.37 + kTwoPi * s / steps;
        const double E = radius * std::cos(t), l = radius * std::sin(t);
        const double base = oracle_radial_action(b, E, l);
        if (track.size() >= 2) {
            const double predicted = 2 * track.back() - track[track.size() - 2];
            int best = j;
            for (int c = j - 1; c <= j + 1; ++c)
                if (std::abs(base + c * l - predicted) < std::abs(base + best * l - predicted)) best = c;
            j = best;
        }
        track.push_back(base + j * l);
    }
    CHECK(std::abs(j) == 1);

    const ModelPtr champ = make_champagne_model(b);
    const MonodromyClass classical = classical_monodromy(champ, Loop::circle({0.0, 0.0}, radius, 16));
    CHECK(classical.normal_form.kind == "parabolic");
    CHECK(classical.normal_form.parabolic_m == std::abs(j));
    // Actions xi = (l, I_r) pick up xi_2 -> xi_2 + j xi_1; the transition convention transposes the inverse.
    IMat2 action_map;
    action_map << 1, 0, j, 1;
    CHECK(gl2z_conjugate(classical.product, unimodular_inverse(action_map).transpose()));
}
