#include "specmono/diophantine.hpp"

#include "specmono/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <random>

namespace specmono {

void DiophantineParams::validate() const {
    if (!(alpha > 0.0)) throw DomainError("Diophantine alpha must be positive");
    if (!(d > 0.0)) throw DomainError("Diophantine d must be positive");
    if (k_max < 100) throw DomainError("Diophantine k_max must be at least 100");
}

namespace {

/**
 * Visits the lattice vectors that can realise the minimum of |<omega, k>| |k|^(1+d).
 * With the components split into major (larger |omega_i|) and minor, for every minor
 * index n >= 0 only the two major indices nearest to -n omega_minor / omega_major are
 * visited; every other k has |<omega, k>| >= |omega_major| >= |omega_major| / |k|^(1+d)
 * and is dominated by the unit vector along the major axis, which is visited first.
 * Up to the sign of k this walks the |k|_inf shells in increasing order.
 */
template <class Visit>
void sweep_candidates(const Vec2& omega, std::int64_t k_max, Visit&& visit) {
    const int major = std::abs(omega.x()) >= std::abs(omega.y()) ? 0 : 1;
    const int minor = 1 - major;
    auto make = [&](std::int64_t k_major, std::int64_t k_minor) {
        IVec2 k;
        k(major) = k_major;
        k(minor) = k_minor;
        return k;
    };
    if (!visit(make(1, 0))) return;
    if (!visit(make(0, 1))) return;
    const double ratio = omega(major) != 0.0 ? -omega(minor) / omega(major) : 0.0;
    for (std::int64_t n = 1; n <= k_max; ++n) {
        const double centre = static_cast<double>(n) * ratio;
        const auto lo = static_cast<std::int64_t>(std::floor(centre));
        for (std::int64_t k_major : {lo, lo + 1}) {
            if (std::abs(k_major) > k_max) continue;
            if (k_major == 0) continue;  // (0, n) is a multiple of a visited unit vector
            if (!visit(make(k_major, n))) return;
        }
    }
}

double scaled_gap(const Vec2& omega, const IVec2& k, double d) {
    const double dot = omega.x() * static_cast<double>(k.x()) + omega.y() * static_cast<double>(k.y());
    const double norm = std::hypot(static_cast<double>(k.x()), static_cast<double>(k.y()));
    return std::abs(dot) * std::pow(norm, 1.0 + d);
}

}  // namespace

DiophantineCheck diophantine_check(const Vec2& omega, const DiophantineParams& params) {
    params.validate();
    DiophantineCheck out;
    sweep_candidates(omega, params.k_max, [&](const IVec2& k) {
        if (scaled_gap(omega, k, params.d) < params.alpha) {
            out.ok = false;
            out.witness = k;
            return false;
        }
        return true;
    });
    return out;
}

bool is_diophantine(const Vec2& omega, const DiophantineParams& params) {
    return diophantine_check(omega, params).ok;
}

std::pair<double, IVec2> diophantine_margin(const Vec2& omega, double d, std::int64_t k_max) {
    // |k| >= |k|_inf, so |<omega, k>| * |k|_inf^(1+d) bounds the scaled gap from below and
    // lets most candidates skip the pow() call.
    thread_local std::vector<double> shell_power;
    thread_local double cached_d = -1.0;
    if (cached_d != d || static_cast<std::int64_t>(shell_power.size()) <= k_max) {
        shell_power.resize(static_cast<std::size_t>(k_max) + 1);
        for (std::int64_t n = 0; n <= k_max; ++n)
            shell_power[static_cast<std::size_t>(n)] = std::pow(static_cast<double>(n), 1.0 + d);
        cached_d = d;
    }
    double best = std::numeric_limits<double>::infinity();
    IVec2 arg = IVec2::Zero();
    sweep_candidates(omega, k_max, [&](const IVec2& k) {
        const double dot = std::abs(omega.x() * static_cast<double>(k.x()) + omega.y() * static_cast<double>(k.y()));
        const auto shell = static_cast<std::size_t>(std::max(std::abs(k.x()), std::abs(k.y())));
        if (dot * shell_power[shell] >= best) return true;
        const double g = scaled_gap(omega, k, d);
        if (g < best) best = g, arg = k;
        return true;
    });
    return {best, arg};
}

std::vector<Vec2> GridSpec::nodes() const {
    if (nx <= 0 || ny <= 0 || region.empty()) return {};
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    auto coord = [&](int i, int n, double lo, double hi) {
        if (centred) return lo + (hi - lo) * (i + 0.5) / n;
        return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            out.emplace_back(coord(i, nx, region.lo.x(), region.hi.x()),
                             coord(j, ny, region.lo.y(), region.hi.y()));
    return out;
}

std::size_t GoodValueSet::good_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes) n += node.good ? 1 : 0;
    return n;
}

double GoodValueSet::good_fraction() const {
    return nodes.empty() ? 0.0 : static_cast<double>(good_count()) / static_cast<double>(nodes.size());
}

std::optional<GoodValueNode> GoodValueSet::nearest_good(const Vec2& target) const {
    std::optional<GoodValueNode> best;
    for (const auto& node : nodes) {
        if (!node.good) continue;
        if (!best || (node.value - target).squaredNorm() < (best->value - target).squaredNorm()) best = node;
    }
    return best;
}

namespace {

struct ClauseData {
    Vec2 xi;
    Vec2 omega;
    double margin;
    double dq;
    double omega_prime;
    double dist;
};

ClauseData clause_data(const ActionChart& chart, const Vec2& value, double d, std::int64_t k_max) {
    ClauseData c;
    c.xi = chart.xi_of(value);
    const FrequencyData f = frequency(chart, c.xi);
    c.omega = f.omega;
    c.margin = diophantine_margin(f.omega, d, k_max).first;
    c.dq = f.d_avg_q.norm();
    c.omega_prime = f.omega_prime_norm;
    c.dist = chart.model().distance_to_singular(value);
    return c;
}

}  // namespace

GoodValueNode classify_value(const ActionChart& chart, const Vec2& value, const DiophantineParams& params) {
    params.validate();
    if (!chart.covers(value))
        throw DomainError(fmt::format("value ({}, {}) lies outside the chart domain", value.x(), value.y()));
    GoodValueNode node;
    node.value = value;
    node.xi = chart.xi_of(value);
    const FrequencyData f = frequency(chart, node.xi);
    node.omega = f.omega;
    node.diophantine_ok = is_diophantine(f.omega, params);
    node.dq_ok = f.d_avg_q.norm() >= params.alpha;
    node.omega_prime_ok = f.omega_prime_norm >= params.alpha;
    node.singular_ok = chart.model().distance_to_singular(value) >= params.alpha;
    node.good = node.diophantine_ok && node.dq_ok && node.omega_prime_ok && node.singular_ok;
    return node;
}

GoodValueSet good_values(const ActionChart& chart, const DiophantineParams& params, const GridSpec& grid) {
    params.validate();
    const auto values = grid.nodes();
    if (values.empty()) throw DomainError("good_values needs a non-empty grid");
    if (!chart.domain().contains(grid.region))
        throw DomainError("good_values grid must lie inside the chart domain");
    GoodValueSet out;
    out.nodes.reserve(values.size());
    for (const Vec2& v : values) out.nodes.push_back(classify_value(chart, v, params));
    return out;
}

std::vector<BadFraction> bad_measure_estimate(const ActionChart& chart, double d,
                                              const std::vector<double>& alpha_list,
                                              std::size_t samples, std::uint64_t seed,
                                              std::int64_t k_max) {
    if (samples == 0) throw DomainError("bad_measure_estimate needs at least one sample");
    for (std::size_t i = 1; i < alpha_list.size(); ++i)
        if (!(alpha_list[i] < alpha_list[i - 1])) throw DomainError("alpha_list must be decreasing");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(chart.domain().lo.x(), chart.domain().hi.x());
    std::uniform_real_distribution<double> uy(chart.domain().lo.y(), chart.domain().hi.y());
    std::vector<ClauseData> data;
    data.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec2 v{ux(rng), uy(rng)};
        data.push_back(clause_data(chart, v, d, k_max));
    }
    std::vector<BadFraction> out;
    for (double alpha : alpha_list) {
        std::size_t bad = 0;
        for (const auto& c : data) {
            const bool good = c.margin >= alpha && c.dq >= alpha && c.omega_prime >= alpha && c.dist >= alpha;
            bad += good ? 0 : 1;
        }
        out.push_back({alpha, static_cast<double>(bad) / static_cast<double>(samples)});
    }
    return out;
}

double log_log_slope(const std::vector<BadFraction>& fractions) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& f : fractions) {
        if (!(f.bad_fraction > 0.0) || !(f.alpha > 0.0)) continue;
        const double x = std::log(f.alpha), y = std::log(f.bad_fraction);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace specmono
