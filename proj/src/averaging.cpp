#include "specmono/averaging.hpp"

#include "specmono/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace specmono {

double torus_average(const TrigPolynomial& q, const Vec2& xi, int n) {
    if (n <= 0) throw DomainError("torus_average needs a positive grid size");
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sum += q(Vec2{kTwoPi * i / n, kTwoPi * j / n}, xi);
    return sum / (static_cast<double>(n) * n);
}

double torus_average(const ActionChart& chart, const Vec2& xi, int n) {
    return torus_average(chart.model().q_symbol(), xi, n);
}

double time_average(const TrigPolynomial& q, const Vec2& omega, const Vec2& xi, const Vec2& x0, double T) {
    if (!(T > 0.0)) throw DomainError("time_average needs T > 0");
    const double speed = std::max(omega.norm(), 1e-300);
    const double max_step = kTwoPi / (50.0 * speed);
    auto intervals = static_cast<long>(std::ceil(T / max_step));
    intervals = std::max(2L, intervals + (intervals % 2));
    const double step = T / static_cast<double>(intervals);
    auto f = [&](long i) { return q(x0 + (-0.5 * T + step * static_cast<double>(i)) * omega, xi); };
    double sum = f(0) + f(intervals);
    for (long i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(i);
    return sum * step / 3.0 / T;
}

double time_average(const ActionChart& chart, const Vec2& xi, const Vec2& x0, double T) {
    return time_average(chart.model().q_symbol(), chart.omega(xi), xi, x0, T);
}

std::vector<Vec2> torus_sample(int count) {
    // Additive recurrence with the plastic number; the first point is the origin.
    const double g = 1.32471795724474602596;
    const double a1 = 1.0 / g, a2 = 1.0 / (g * g);
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        const double u = std::fmod(a1 * i, 1.0), v = std::fmod(a2 * i, 1.0);
        out.emplace_back(kTwoPi * u, kTwoPi * v);
    }
    return out;
}

Interval q_infinity(const TrigPolynomial& q, const Vec2& omega, const Vec2& xi, const std::vector<double>& T_list) {
    if (T_list.empty()) throw DomainError("q_infinity needs at least one T");
    if (!std::is_sorted(T_list.begin(), T_list.end())) throw DomainError("T_list must be increasing");
    const double T = T_list.back();
    Interval out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const Vec2& x0 : torus_sample(16)) {
        const double v = time_average(q, omega, xi, x0, T);
        out.lo = std::min(out.lo, v);
        out.hi = std::max(out.hi, v);
    }
    return out;
}

Interval q_infinity(const ActionChart& chart, const Vec2& xi, const std::vector<double>& T_list) {
    return q_infinity(chart.model().q_symbol(), chart.omega(xi), xi, T_list);
}

double ergodic_constant(const TrigPolynomial& q, const Vec2& omega, const Vec2& xi, const Vec2& x0,
                        double T, int samples) {
    const double mean = q.mean(xi);
    double c = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = T * (1.0 + static_cast<double>(i) / std::max(samples - 1, 1));
        c = std::max(c, t * std::abs(time_average(q, omega, xi, x0, t) - mean));
    }
    return c;
}

AverageReport average_report(const ActionChart& chart, const Vec2& xi, const Vec2& x0,
                             const std::vector<double>& T_list) {
    AverageReport r;
    r.xi = xi;
    r.torus_avg = torus_average(chart, xi);
    for (double T : T_list) r.time_avgs.emplace_back(T, time_average(chart, xi, x0, T));
    r.q_infinity = q_infinity(chart, xi, T_list);
    return r;
}

}  // namespace specmono
