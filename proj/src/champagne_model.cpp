#include "specmono/errors.hpp"
#include "specmono/models.hpp"
#include "specmono/quadrature.hpp"

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include <array>
#include <limits>
#include <optional>

namespace specmono {

namespace {

/// Roots s0 <= s_minus < s_plus of s^3 - b s^2 - E s + l^2 / 2 (s = r^2), i.e. of
/// V_eff(r) = E with V_eff = l^2 / (2 r^2) + r^4 - b r^2. s0 <= 0 never is a turning point.
struct RadialRoots {
    double s0, s_minus, s_plus;
};

std::optional<RadialRoots> radial_roots(double b, double energy, double l) {
    const double a2 = -b, a1 = -energy, a0 = 0.5 * l * l;
    const double p = a1 - a2 * a2 / 3.0;
    const double q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    if (p >= 0.0) return std::nullopt;
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = 3.0 * q / (p * m);
    if (arg < -1.0 - 1e-12 || arg > 1.0 + 1e-12) return std::nullopt;
    const double theta = std::acos(std::clamp(arg, -1.0, 1.0)) / 3.0;
    std::array<double, 3> s{};
    for (int k = 0; k < 3; ++k) {
        double x = m * std::cos(theta - kTwoPi * k / 3.0) - a2 / 3.0;
        for (int it = 0; it < 3; ++it) {
            const double f = ((x + a2) * x + a1) * x + a0;
            const double df = (3.0 * x + 2.0 * a2) * x + a1;
            if (df == 0.0) break;
            x -= f / df;
        }
        s[k] = x;
    }
    std::sort(s.begin(), s.end());
    if (s[1] < 0.0) {
        if (s[1] > -1e-14) s[1] = 0.0;
        else return std::nullopt;
    }
    if (!(s[2] > s[1])) return std::nullopt;
    return RadialRoots{std::min(s[0], 0.0), s[1], s[2]};
}

struct Turning {
    RadialRoots roots;
    double r_minus, r_plus;
};

Turning turning(double b, double energy, double l) {
    const auto roots = radial_roots(b, energy, l);
    if (!roots)
        throw ModelError(fmt::format("(E, l) = ({}, {}) is not a regular value of the champagne bottle",
                                     energy, l));
    return {*roots, std::sqrt(roots->s_minus), std::sqrt(roots->s_plus)};
}

const quad::Options kActionQuad{1e-14, 4000};

// In s = r^2 the radial momentum is p_r^2 = 2 (s - s0)(s - s-)(s+ - s) / s and dr = ds / (2 sqrt(s)),
// which leaves only the square-root gap between s- and s+ plus factors that stay smooth when
// the inner turning point approaches the axis.

double radial_action(const Turning& t) {
    const double s0 = t.roots.s0;
    auto g = [s0](double s) { return s > 0.0 ? std::sqrt(2.0 * (s - s0)) / s : 0.0; };
    return quad::times_sqrt_gap(g, t.roots.s_minus, t.roots.s_plus, kActionQuad) / kTwoPi;
}

/// d I_r / dE = T_r / 2pi.
double radial_action_dE(const Turning& t) {
    const double s0 = t.roots.s0;
    auto g = [s0](double s) { return 1.0 / std::sqrt(2.0 * (s - s0)); };
    return quad::over_sqrt_gap(g, t.roots.s_minus, t.roots.s_plus, kActionQuad) / kTwoPi;
}

double radial_action_dl(const Turning& t, double energy, double l) {
    if (energy > 0.0 && std::abs(l) < 1e-12) {
        // I_r = g(l) - |l| / 2 with g even; report the derivative from the l > 0 side.
        return l < 0.0 ? 0.5 : -0.5;
    }
    const double s0 = t.roots.s0;
    auto g = [s0](double s) { return 1.0 / (s * std::sqrt(2.0 * (s - s0))); };
    return -l * quad::over_sqrt_gap(g, t.roots.s_minus, t.roots.s_plus, kActionQuad) / kTwoPi;
}

double min_energy(double b, double l) {
    // Minimum of V_eff at s = r^2 solving 4 s^3 - 2 b s^2 - l^2 = 0, s >= b / 2.
    double lo = 0.5 * b, hi = 0.5 * b + std::cbrt(0.25 * l * l) + 1.0;
    auto f = [&](double s) { return 4.0 * s * s * s - 2.0 * b * s * s - l * l; };
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    const double s = 0.5 * (lo + hi);
    return l * l / (2.0 * s) + s * s - b * s;
}

/// Point of the relative-equilibria curve parameterised by s = r^2 >= b / 2.
Vec2 boundary_point(double b, double s, double sign) {
    const double l2 = std::max(0.0, 4.0 * s * s * s - 2.0 * b * s * s);
    return {3.0 * s * s - 2.0 * b * s, sign * std::sqrt(l2)};
}

class ChampagneActions final : public LocalActions {
public:
    /// `straddles_ray`: the domain crosses {l = 0, E > 0}; the radial cycle is then continued
    /// from the l > 0 side, i.e. xi_2 = I_r - min(l, 0).
    ChampagneActions(double b, bool straddles_ray, std::optional<Vec2> reference)
        : b_(b), straddles_(straddles_ray) {
        if (reference) {
            try {
                ref_value_ = *reference;
                ref_xi_ = cycle_actions(*reference) / kTwoPi;
                const Turning t = turning(b_, reference->x(), reference->y());
                ref_omega_ = omega_from(t, reference->x(), reference->y());
                has_ref_ = true;
            } catch (const ModelError&) {
                has_ref_ = false;
            }
        }
    }

    double hamiltonian(const Vec2& xi) const override { return energy_of(xi); }

    Vec2 omega(const Vec2& xi) const override {
        const double energy = energy_of(xi);
        return omega_from(turning(b_, energy, xi.x()), energy, xi.x());
    }

    Vec2 cycle_actions(const Vec2& value) const override {
        const Turning t = turning(b_, value.x(), value.y());
        return kTwoPi * Vec2{value.y(), radial_action(t) + shift(value.y())};
    }

    Vec2 torus_actions(const Vec2& xi) const override {
        return cycle_actions({energy_of(xi), xi.x()});
    }

    Vec2 action_offset() const override { return Vec2::Zero(); }

    bool in_domain(const Vec2& xi) const override { return xi.y() - shift(xi.x()) > 0.0; }

private:
    double shift(double l) const { return straddles_ ? -std::min(l, 0.0) : 0.0; }
    double shift_slope(double l) const { return straddles_ && l < 0.0 ? -1.0 : 0.0; }

    Vec2 omega_from(const Turning& t, double energy, double l) const {
        const double dIdE = radial_action_dE(t);
        const double dIdl = radial_action_dl(t, energy, l) + shift_slope(l);
        return {-dIdl / dIdE, 1.0 / dIdE};
    }

    /// Solves I_r(E, l) + shift(l) = xi_2 by safeguarded Newton on E.
    double energy_of(const Vec2& xi) const {
        const double l = xi.x();
        const double target = xi.y() - shift(l);
        if (!(target > 0.0))
            throw DomainError(fmt::format("xi = ({}, {}) lies outside the champagne action domain",
                                          xi.x(), xi.y()));
        double lo = min_energy(b_, l);
        double guess = has_ref_ ? ref_value_.x() + ref_omega_.dot(xi - ref_xi_) : lo + 1.0;
        auto eval = [&](double energy) {
            const Turning t = turning(b_, energy, l);
            return std::pair{radial_action(t) - target, radial_action_dE(t)};
        };
        // Bracket [lo, hi] with I(lo) < target < I(hi).
        double hi = std::max(guess, lo) + 0.05;
        for (int it = 0; eval(hi).first < 0.0; ++it) {
            lo = hi;
            hi = lo + 0.1 * (1 << std::min(it, 20));
        }
        double energy = (guess > lo && guess < hi) ? guess : 0.5 * (lo + hi);
        for (int it = 0; it < 80; ++it) {
            double f, df;
            try {
                std::tie(f, df) = eval(energy);
            } catch (const ModelError&) {
                // Bisection step strayed onto the boundary curve; move inward.
                lo = energy;
                energy = 0.5 * (lo + hi);
                continue;
            }
            if (f < 0.0) lo = energy; else hi = energy;
            double next = energy - f / df;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double delta = std::abs(next - energy);
            energy = next;
            if (delta <= 2e-16 * (1.0 + std::abs(energy)) || hi - lo <= 4e-16 * (1.0 + std::abs(energy)))
                return energy;
        }
        return energy;
    }

    double b_;
    bool straddles_;
    bool has_ref_ = false;
    Vec2 ref_value_ = Vec2::Zero();
    Vec2 ref_xi_ = Vec2::Zero();
    Vec2 ref_omega_ = Vec2::Zero();
};

class ChampagneModel final : public ModelSystem {
public:
    explicit ChampagneModel(double b) : b_(b) {
        using Kind = TrigPolynomial::Kind;
        // <q> = l: the value plane of (p, <q>) is the (E, L_z) momentum-map plane.
        q_.add(0.0, Vec2{1.0, 0.0}, IVec2::Zero(), Kind::Cos);
        q_.add(0.1, Vec2::Zero(), IVec2{0, 1}, Kind::Cos);
    }

    std::string name() const override { return "champagne"; }
    const TrigPolynomial& q_symbol() const override { return q_; }
    IVec2 maslov_eta() const override { return IVec2{0, 2}; }

    SingularSet singular_values() const override {
        SingularSet s;
        s.description = "focus-focus value (0, 0) and the relative-equilibria curve E = E_min(l)";
        s.points.emplace_back(0.0, 0.0);
        std::vector<Vec2> curve;
        for (int i = -60; i <= 60; ++i) {
            const double l = 0.05 * i;
            curve.emplace_back(min_energy(b_, l), l);
        }
        s.curves.push_back(std::move(curve));
        return s;
    }

    double distance_to_singular(const Vec2& v) const override {
        const double to_focus = v.norm();
        return std::min(to_focus, distance_to_boundary(v));
    }

    bool is_regular(const Vec2& v) const override {
        if (v.norm() < 1e-12) return false;
        if (!(v.x() > min_energy(b_, v.y()))) return false;
        return radial_roots(b_, v.x(), v.y()).has_value();
    }

    double independence_bound(const Box& domain) const override {
        // |det dphi| = omega_r = 1 / (dI_r / dE).
        double bound = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 5; ++k) {
            const Vec2 v = k == 4 ? domain.center()
                                  : Vec2{k & 1 ? domain.hi.x() : domain.lo.x(), k & 2 ? domain.hi.y() : domain.lo.y()};
            if (!is_regular(v)) continue;
            bound = std::min(bound, 1.0 / radial_action_dE(turning(b_, v.x(), v.y())));
        }
        return std::isfinite(bound) ? 0.9 * bound : 0.0;
    }

    std::shared_ptr<const LocalActions> local_actions(const Box& domain) const override {
        const bool straddles = domain.lo.y() < 0.0 && domain.hi.y() > 0.0 && domain.lo.x() > 0.0;
        if (domain.lo.y() < 0.0 && domain.hi.y() > 0.0 && domain.lo.x() <= 0.0 && domain.hi.x() >= 0.0 &&
            domain.size().x() < 1.0)
            throw ModelError("chart domain contains the focus-focus value");
        std::optional<Vec2> reference;
        if (is_regular(domain.center())) reference = domain.center();
        return std::make_shared<ChampagneActions>(b_, straddles, reference);
    }

private:
    double distance_to_boundary(const Vec2& v) const {
        const double sign = v.y() < 0.0 ? -1.0 : 1.0;
        auto d2 = [&](double s) { return (boundary_point(b_, s, sign) - v).squaredNorm(); };
        const double s_lo = 0.5 * b_;
        const double s_hi = s_lo + 2.0 + std::abs(v.x()) + std::abs(v.y());
        constexpr int kSamples = 400;
        int best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kSamples; ++i) {
            const double d = d2(s_lo + (s_hi - s_lo) * i / kSamples);
            if (d < best_d2) best_d2 = d, best = i;
        }
        const double step = (s_hi - s_lo) / kSamples;
        const double a = std::max(s_lo, s_lo + (best - 1) * step);
        const double c = std::min(s_hi, s_lo + (best + 1) * step);
        const auto [s_best, d2_best] = boost::math::tools::brent_find_minima(d2, a, c, 50);
        (void)s_best;
        return std::sqrt(std::min(d2_best, best_d2));
    }

    double b_;
    TrigPolynomial q_;
};

}  // namespace

ModelPtr make_champagne_model(double well_depth) {
    if (!(well_depth > 0.0)) throw ModelError("well depth must be positive");
    return std::make_shared<ChampagneModel>(well_depth);
}

std::pair<double, double> champagne_turning_points(double well_depth, double energy, double l) {
    const Turning t = turning(well_depth, energy, l);
    return {t.r_minus, t.r_plus};
}

double champagne_radial_action(double well_depth, double energy, double l) {
    return radial_action(turning(well_depth, energy, l));
}

double champagne_min_energy(double well_depth, double l) { return min_energy(well_depth, l); }

}  // namespace specmono
