#pragma once

#include <functional>

namespace specmono::quad {

struct Options {
    double rel_tol = 1e-14;
    /// Upper bound on the number of subintervals kept by the adaptive scheme.
    int max_intervals = 4000;
};

/// Globally adaptive 15-point Gauss-Kronrod integral on [a, b]. The interval with the
/// largest error estimate is bisected until the total estimate falls below
/// max(rel_tol * |I|, 100 * eps * L1), so requests below round-off terminate.
double adaptive(const std::function<double(double)>& f, double a, double b,
                const Options& opts = {});

/**
 * Integrals across a pair of turning points a < b, where the integrand carries a
 * square-root factor of the gap (r - a)(b - r). Both use r = a + (b - a) sin^2(t),
 * which turns the endpoint behaviour into a smooth integrand on [0, pi/2].
 *
 *   over_sqrt_gap:  int_a^b g(r) / sqrt((r - a)(b - r)) dr
 *   times_sqrt_gap: int_a^b g(r) * sqrt((r - a)(b - r)) dr
 */
double over_sqrt_gap(const std::function<double(double)>& g, double a, double b,
                     const Options& opts = {});
double times_sqrt_gap(const std::function<double(double)>& g, double a, double b,
                      const Options& opts = {});

}  // namespace specmono::quad
