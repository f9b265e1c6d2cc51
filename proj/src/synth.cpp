#include "specmono/synth.hpp"

#include "specmono/errors.hpp"
#include "specmono/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace specmono {

void SemiclassicalParams::validate() const {
    if (!(h > 0.0 && h <= 0.1)) throw DomainError(fmt::format("h = {} outside (0, 0.1]", h));
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError(fmt::format("delta = {} outside (0, 1)", delta));
    if (!(epsilon() / h >= 10.0 - 1e-9))
        throw DomainError(fmt::format("epsilon / h = {} < 10: not in the regime h << epsilon", epsilon() / h));
    if (noise_order < 1) throw DomainError("noise_order must be >= 1");
}

SemiclassicalParams SemiclassicalParams::with_h(double new_h) const {
    SemiclassicalParams p = *this;
    p.h = new_h;
    return p;
}

Box GoodRectangle::value_box() const {
    const Vec2 c{center.real(), center.imag() / epsilon};
    return {c - Vec2::Constant(half_width), c + Vec2::Constant(half_width)};
}

GoodRectangle good_rectangle(const Vec2& a, const SemiclassicalParams& params, double C0) {
    params.validate();
    if (!(C0 >= 1.0)) throw DomainError("the rectangle constant C0 must be >= 1");
    const double eps = params.epsilon();
    GoodRectangle r;
    r.center = Complex{a.x(), eps * a.y()};
    r.half_width = std::pow(params.h, params.delta) / C0;
    r.half_height = eps * r.half_width;
    r.C0 = C0;
    r.epsilon = eps;
    return r;
}

GoodRectangle good_rectangle(const GoodValueNode& a, const SemiclassicalParams& params, double C0) {
    if (!a.good)
        throw DomainError(fmt::format("({}, {}) is not a good value", a.value.x(), a.value.y()));
    return good_rectangle(a.value, params, C0);
}

std::vector<HigherTerm> default_higher_terms() {
    // Each entry stays below 0.1 eps^2 for |E|, |G| <= 1 and h <= eps^2. The only
    // eps-order shift of chi^-1(mu) is the constant eps^2 term; everything else is O(h).
    return {
        {0, 0, 2, 0, {0.02, 0.05}},
        {0, 0, 1, 1, {0.0, 1.0}},
        {0, 0, 0, 1, {0.05, 0.0}},
        {1, 0, 0, 1, {0.03, 0.0}},
        {0, 1, 1, 1, {0.0, 0.05}},
        {0, 0, 0, 2, {0.1, 0.0}},
    };
}

void validate_higher_terms(const std::vector<HigherTerm>& terms) {
    for (const auto& t : terms) {
        if (t.pow_E < 0 || t.pow_G < 0 || t.eps_power < 0 || t.h_power < 0)
            throw DomainError("higher term powers must be non-negative");
        if (t.h_power == 0 && t.eps_power <= 1)
            throw DomainError("higher terms must not alter the leading part p + i eps <q>");
        if (t.pow_E + t.pow_G + t.eps_power + t.h_power > 3)
            throw DomainError("higher terms are limited to total order 3");
        if (t.eps_power == 0 && t.coeff.imag() != 0.0)
            throw DomainError("terms without eps must be real (the symbol is real at eps = 0)");
    }
}

Complex NormalFormSymbol::leading(const Vec2& xi, double epsilon) const {
    return {chart->p(xi), epsilon * chart->avg_q(xi)};
}

Complex NormalFormSymbol::higher_part(const Vec2& value, double epsilon, double h) const {
    Complex sum{0.0, 0.0};
    for (const auto& t : higher)
        sum += t.coeff * std::pow(value.x(), t.pow_E) * std::pow(value.y(), t.pow_G) *
               std::pow(epsilon, t.eps_power) * std::pow(h, t.h_power);
    return sum;
}

Vec2 higher_term_bound(const NormalFormSymbol& symbol, const Box& values, double epsilon, double h) {
    Vec2 bound = Vec2::Zero();
    constexpr int kSamples = 4;
    for (int i = 0; i <= kSamples; ++i)
        for (int j = 0; j <= kSamples; ++j) {
            const Vec2 v = values.lo + Vec2{values.size().x() * i / kSamples, values.size().y() * j / kSamples};
            const Complex z = symbol.higher_part(v, epsilon, h);
            bound = bound.cwiseMax(Vec2{std::abs(z.real()), std::abs(z.imag()) / epsilon});
        }
    // Terms have total order <= 3, so a 5 x 5 sample misses little; keep a safety factor.
    return 1.5 * bound;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

namespace {

double unit_interval(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

Complex synth_noise(std::uint64_t seed, const IVec2& k, double size) {
    const std::uint64_t key = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(k.x()) * 0x100000001b3ULL +
                                                           static_cast<std::uint64_t>(k.y())));
    const double nr = 2.0 * unit_interval(splitmix64(key)) - 1.0;
    const double ni = 2.0 * unit_interval(splitmix64(key + 1)) - 1.0;
    return size * Complex{nr, ni} / std::sqrt(2.0);
}

namespace {

/// Tensor Chebyshev interpolant of a scalar function on a box.
class ChebyshevPatch {
public:
    template <class F>
    ChebyshevPatch(const Box& box, int order, F&& f) : box_(box), n_(order), c_(order, order) {
        std::vector<double> nodes(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) nodes[static_cast<std::size_t>(i)] = std::cos(kPi * (i + 0.5) / n_);
        Eigen::MatrixXd values(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j)
                values(i, j) = f(to_box({nodes[static_cast<std::size_t>(i)], nodes[static_cast<std::size_t>(j)]}));
        Eigen::MatrixXd T(n_, n_);  // T(m, i) = T_m(node_i)
        for (int m = 0; m < n_; ++m)
            for (int i = 0; i < n_; ++i) T(m, i) = std::cos(m * kPi * (i + 0.5) / n_);
        c_ = (2.0 / n_) * (2.0 / n_) * (T * values * T.transpose());
        c_.row(0) *= 0.5;
        c_.col(0) *= 0.5;
    }

    double operator()(const Vec2& xi) const {
        const Vec2 t = to_unit(xi);
        Eigen::VectorXd tx(n_), ty(n_);
        chebyshev_values(t.x(), tx);
        chebyshev_values(t.y(), ty);
        return tx.dot(c_ * ty);
    }

private:
    Vec2 to_box(const Vec2& t) const { return box_.center() + 0.5 * t.cwiseProduct(box_.size()); }
    Vec2 to_unit(const Vec2& xi) const { return 2.0 * (xi - box_.center()).cwiseQuotient(box_.size()); }
    void chebyshev_values(double t, Eigen::VectorXd& out) const {
        out(0) = 1.0;
        if (n_ > 1) out(1) = t;
        for (int m = 2; m < n_; ++m) out(m) = 2.0 * t * out(m - 1) - out(m - 2);
    }

    Box box_;
    int n_;
    Eigen::MatrixXd c_;
};

Box preimage_box(const ActionChart& chart, const Box& values) {
    constexpr int kPerSide = 8;
    Box out{Vec2::Constant(std::numeric_limits<double>::infinity()),
            Vec2::Constant(-std::numeric_limits<double>::infinity())};
    for (int side = 0; side < 4; ++side) {
        for (int i = 0; i <= kPerSide; ++i) {
            const double t = static_cast<double>(i) / kPerSide;
            Vec2 v;
            switch (side) {
                case 0: v = {values.lo.x() + t * values.size().x(), values.lo.y()}; break;
                case 1: v = {values.lo.x() + t * values.size().x(), values.hi.y()}; break;
                case 2: v = {values.lo.x(), values.lo.y() + t * values.size().y()}; break;
                default: v = {values.hi.x(), values.lo.y() + t * values.size().y()}; break;
            }
            const Vec2 xi = chart.xi_of(v);
            out.lo = out.lo.cwiseMin(xi);
            out.hi = out.hi.cwiseMax(xi);
        }
    }
    return out;
}

}  // namespace

SpectrumCloud synth_spectrum(const NormalFormSymbol& symbol, const Vec2& a, const SemiclassicalParams& params,
                             const SynthOptions& options) {
    params.validate();
    validate_higher_terms(symbol.higher);
    if (!symbol.chart) throw DomainError("normal form symbol has no chart");
    const ActionChart& chart = *symbol.chart;
    const double h = params.h;
    const double eps = params.epsilon();

    SpectrumCloud cloud;
    cloud.params = params;
    cloud.rectangle = good_rectangle(a, params, options.C0);
    cloud.tau = chart.tau();
    cloud.eta = chart.eta();
    const Box window = cloud.rectangle.value_box();
    if (!chart.domain().contains(window))
        throw DomainError(fmt::format("chart domain of radius {:.4g} is too small for a rectangle of half width {:.4g}",
                                      chart.radius(), cloud.rectangle.half_width));

    // Values that can land in the window after the higher terms and the noise move them.
    const double noise_size = std::pow(h, params.noise_order);
    const Vec2 shift = higher_term_bound(symbol, window, eps, h) + Vec2{noise_size, noise_size / eps};
    const Box reach{window.lo - shift, window.hi + shift};
    const Box xi_box = preimage_box(chart, reach).inflate(2.0 * h);
    const Vec2 eta4 = cloud.eta.cast<double>() / 4.0;
    ChebyshevPatch p_patch(xi_box, options.chebyshev_order, [&](const Vec2& xi) {
        if (!chart.local().in_domain(xi)) throw DomainError("rectangle preimage leaves the action domain");
        return chart.p(xi);
    });

    // xi_k = h (k - eta/4) - tau; the bracket [k_lo, k_hi] covers the dilated preimage box.
    const Vec2 k_lo_real = (xi_box.lo + cloud.tau) / h + eta4;
    const Vec2 k_hi_real = (xi_box.hi + cloud.tau) / h + eta4;
    const auto k1_lo = static_cast<std::int64_t>(std::ceil(k_lo_real.x()));
    const auto k1_hi = static_cast<std::int64_t>(std::floor(k_hi_real.x()));
    const auto k2_lo = static_cast<std::int64_t>(std::ceil(k_lo_real.y()));
    const auto k2_hi = static_cast<std::int64_t>(std::floor(k_hi_real.y()));

    const std::size_t rows = k1_hi >= k1_lo ? static_cast<std::size_t>(k1_hi - k1_lo + 1) : 0;
    std::vector<std::vector<SpectralPoint>> shards(rows);
    parallel_for(rows, options.jobs, [&](std::size_t row) {
        const std::int64_t k1 = k1_lo + static_cast<std::int64_t>(row);
        for (std::int64_t k2 = k2_lo; k2 <= k2_hi; ++k2) {
            const IVec2 k{k1, k2};
            const Vec2 xi = h * (k.cast<double>() - eta4) - cloud.tau;
            const Vec2 value{p_patch(xi), chart.avg_q(xi)};
            Complex mu{value.x(), eps * value.y()};
            mu += symbol.higher_part(value, eps, h);
            mu += synth_noise(params.seed, k, noise_size);
            if (cloud.rectangle.contains(mu)) shards[row].push_back({mu, k});
        }
    });
    for (auto& shard : shards)
        cloud.points.insert(cloud.points.end(), shard.begin(), shard.end());
    std::sort(cloud.points.begin(), cloud.points.end(), [](const SpectralPoint& x, const SpectralPoint& y) {
        if (x.mu.real() != y.mu.real()) return x.mu.real() < y.mu.real();
        return x.mu.imag() < y.mu.imag();
    });
    return cloud;
}

Interval spectral_band(const ActionChart& chart, double E, double delta_E, const SemiclassicalParams& params) {
    params.validate();
    const double eps = params.epsilon();
    const double slack = eps + params.h / eps;
    const Box& dom = chart.domain();
    const double e_lo = std::max(dom.lo.x(), E - delta_E), e_hi = std::min(dom.hi.x(), E + delta_E);
    Interval q{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto include = [&](const Vec2& xi) {
        const double v = torus_average(chart, xi);
        q.lo = std::min(q.lo, v);
        q.hi = std::max(q.hi, v);
    };
    if (chart.invertible() && e_lo <= e_hi) {
        constexpr int kE = 9, kG = 33;
        for (int i = 0; i < kE; ++i)
            for (int j = 0; j < kG; ++j) {
                const double e = e_lo + (e_hi - e_lo) * i / (kE - 1);
                const double g = dom.lo.y() + dom.size().y() * j / (kG - 1);
                include(chart.xi_of({e, g}));
            }
    } else {
        for (const auto& node : chart.grid())
            if (std::abs(node.value.x() - E) <= delta_E) include(node.xi);
    }
    if (!(q.lo <= q.hi)) throw DomainError("no leaf of the chart lies in the energy window");
    return {eps * (q.lo - slack), eps * (q.hi + slack)};
}

}  // namespace specmono
