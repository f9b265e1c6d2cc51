#pragma once

#include "specmono/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace specmono {

/// Parameters of the (alpha, d) condition |<omega, k>| >= alpha / |k|^(1+d), |k| Euclidean,
/// swept over 0 < |k|_inf <= k_max.
struct DiophantineParams {
    double alpha = 1e-3;
    double d = 1.0;
    std::int64_t k_max = 10000;

    void validate() const;
};

/// Outcome of a truncated Diophantine sweep.
struct DiophantineCheck {
    bool ok = true;
    /// First violating lattice vector in shell order (only meaningful when !ok).
    IVec2 witness = IVec2::Zero();
};

DiophantineCheck diophantine_check(const Vec2& omega, const DiophantineParams& params);
bool is_diophantine(const Vec2& omega, const DiophantineParams& params);

/// Minimum over the sweep of |<omega, k>| * |k|^(1+d), with its argmin. omega is
/// (alpha, d)-Diophantine up to k_max iff the margin is >= alpha.
std::pair<double, IVec2> diophantine_margin(const Vec2& omega, double d, std::int64_t k_max);

/// Rectangular grid of nx x ny candidate values (cell-centred when `centred`, else endpoints).
struct GridSpec {
    Box region;
    int nx = 20;
    int ny = 20;
    bool centred = false;

    std::vector<Vec2> nodes() const;
};

struct GoodValueNode {
    Vec2 value = Vec2::Zero();
    Vec2 xi = Vec2::Zero();
    Vec2 omega = Vec2::Zero();
    bool diophantine_ok = false;
    bool dq_ok = false;
    bool omega_prime_ok = false;
    bool singular_ok = false;
    bool good = false;
};

struct GoodValueSet {
    std::vector<GoodValueNode> nodes;

    std::size_t good_count() const;
    double good_fraction() const;
    /// Good node closest to `target`, if any.
    std::optional<GoodValueNode> nearest_good(const Vec2& target) const;
};

/// Evaluates the four exclusion clauses at a single value of the chart.
GoodValueNode classify_value(const ActionChart& chart, const Vec2& value, const DiophantineParams& params);

/// Evaluates the exclusion clauses on every grid node. Throws DomainError when the grid is
/// empty or leaves the chart domain.
GoodValueSet good_values(const ActionChart& chart, const DiophantineParams& params, const GridSpec& grid);

struct BadFraction {
    double alpha = 0.0;
    double bad_fraction = 0.0;
};

/// Monte-Carlo fraction of bad values in the chart domain for each alpha. The same uniformly
/// distributed sample values (seeded) are used for every alpha.
std::vector<BadFraction> bad_measure_estimate(const ActionChart& chart, double d,
                                              const std::vector<double>& alpha_list,
                                              std::size_t samples, std::uint64_t seed = 1,
                                              std::int64_t k_max = 10000);

/// Least-squares slope of log(bad_fraction) against log(alpha); entries with zero fraction are skipped.
double log_log_slope(const std::vector<BadFraction>& fractions);

}  // namespace specmono
