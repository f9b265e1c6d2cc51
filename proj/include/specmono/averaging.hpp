#pragma once

#include "specmono/models.hpp"

#include <utility>
#include <vector>

namespace specmono {

/// Closed real interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

/// (2 pi)^-2 times the integral of q(., xi) over the torus, by the n x n trapezoid rule.
double torus_average(const TrigPolynomial& q, const Vec2& xi, int n = 64);
double torus_average(const ActionChart& chart, const Vec2& xi, int n = 64);

/// Symmetric time average (1/T) int_{-T/2}^{T/2} q(x0 + t omega, xi) dt along the linear
/// angle flow, by composite Simpson with step <= 2 pi / (50 |omega|).
double time_average(const TrigPolynomial& q, const Vec2& omega, const Vec2& xi, const Vec2& x0, double T);
double time_average(const ActionChart& chart, const Vec2& xi, const Vec2& x0, double T);

/// Deterministic low-discrepancy starting angles on the torus (additive recurrence).
std::vector<Vec2> torus_sample(int count);

/// Finite-T surrogate of Q_infinity: range of the time average at the largest T over 16
/// quasi-random starting angles. An outer approximation of the infinite-T set.
Interval q_infinity(const TrigPolynomial& q, const Vec2& omega, const Vec2& xi, const std::vector<double>& T_list);
Interval q_infinity(const ActionChart& chart, const Vec2& xi, const std::vector<double>& T_list);

/**
 * Envelope constant of the ergodic rate: max of T' |<q>_T' - <q>| over T' in [T, 2T]
 * (`samples` equally spaced). A single harmonic makes the error oscillate through zero,
 * so the envelope over one doubling is the stable quantity.
 */
double ergodic_constant(const TrigPolynomial& q, const Vec2& omega, const Vec2& xi, const Vec2& x0,
                        double T, int samples = 64);

struct AverageReport {
    Vec2 xi = Vec2::Zero();
    double torus_avg = 0.0;
    std::vector<std::pair<double, double>> time_avgs;
    Interval q_infinity;
};

AverageReport average_report(const ActionChart& chart, const Vec2& xi, const Vec2& x0,
                             const std::vector<double>& T_list);

}  // namespace specmono
