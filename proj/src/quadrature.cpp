#include "specmono/quadrature.hpp"

#include "specmono/errors.hpp"
#include "specmono/linalg.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace specmono::quad {

namespace {

struct Piece {
    double a, b, value, error, l1;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
    Piece p{a, b, 0.0, 0.0, 0.0};
    p.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &p.error, &p.l1);
    // The non-adaptive estimate reports its error on the reference interval [-1, 1].
    p.error *= 0.5 * (b - a);
    return p;
}

}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b, const Options& opts) {
    std::priority_queue<Piece> queue;
    queue.push(gk15(f, a, b));
    double value = queue.top().value, error = queue.top().error, l1 = queue.top().l1;
    constexpr double kFloor = 100.0 * std::numeric_limits<double>::epsilon();
    while (error > std::max(opts.rel_tol * std::abs(value), kFloor * l1) &&
           static_cast<int>(queue.size()) < opts.max_intervals) {
        const Piece worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            queue.push(worst);
            break;
        }
        const Piece left = gk15(f, worst.a, mid), right = gk15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        l1 += left.l1 + right.l1 - worst.l1;
        queue.push(left);
        queue.push(right);
    }
    if (!std::isfinite(value)) throw ModelError("quadrature produced a non-finite value");
    return value;
}

double over_sqrt_gap(const std::function<double(double)>& g, double a, double b,
                     const Options& opts) {
    const double gap = b - a;
    auto integrand = [&](double t) {
        const double s = std::sin(t);
        return g(a + gap * s * s);
    };
    return 2.0 * adaptive(integrand, 0.0, 0.5 * kPi, opts);
}

double times_sqrt_gap(const std::function<double(double)>& g, double a, double b,
                      const Options& opts) {
    const double gap = b - a;
    auto integrand = [&](double t) {
        const double s = std::sin(t);
        const double c = std::cos(t);
        return g(a + gap * s * s) * s * s * c * c;
    };
    return 2.0 * gap * gap * adaptive(integrand, 0.0, 0.5 * kPi, opts);
}

}  // namespace specmono::quad
