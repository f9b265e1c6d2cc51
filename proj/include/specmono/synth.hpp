#pragma once

#include "specmono/averaging.hpp"
#include "specmono/diophantine.hpp"
#include "specmono/models.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace specmono {

/// Semiclassical regime h << epsilon = h^delta.
struct SemiclassicalParams {
    double h = 1e-3;
    double delta = 0.5;
    int noise_order = 3;
    std::uint64_t seed = 1;

    double epsilon() const { return std::pow(h, delta); }
    /// Checks h in (0, 0.1], delta in (0, 1), epsilon / h >= 10, noise_order >= 1.
    void validate() const;
    /// Same delta, noise and seed at a new h.
    SemiclassicalParams with_h(double new_h) const;
};

/// Spectral window centred at E + i eps G with half sizes h^delta / C0 and eps h^delta / C0.
struct GoodRectangle {
    Complex center;
    double half_width = 0.0;
    double half_height = 0.0;
    double C0 = 1.0;
    double epsilon = 0.0;

    bool contains(const Complex& mu) const {
        return std::abs(mu.real() - center.real()) <= half_width &&
               std::abs(mu.imag() - center.imag()) <= half_height;
    }
    /// The window in the (E, G) value plane, i.e. after undoing the epsilon scaling.
    Box value_box() const;
};

GoodRectangle good_rectangle(const Vec2& a, const SemiclassicalParams& params, double C0 = 1.0);
/// Throws DomainError when the node did not pass every clause.
GoodRectangle good_rectangle(const GoodValueNode& a, const SemiclassicalParams& params, double C0 = 1.0);

/// Term coeff * E^pow_E * G^pow_G * eps^eps_power * h^h_power of the full symbol, written in the
/// global values (E, G) = phi(xi) so that it is the same function in every chart.
struct HigherTerm {
    int pow_E = 0;
    int pow_G = 0;
    int eps_power = 0;
    int h_power = 0;
    Complex coeff{0.0, 0.0};
};

/// Default small deterministic coefficients, each term bounded by 0.1 eps^2 for |E|, |G| <= 1.
std::vector<HigherTerm> default_higher_terms();
/// Throws DomainError if a term changes the leading part, violates the order bound
/// pow_E + pow_G + eps_power + h_power <= 3, or is non-real at eps_power = 0.
void validate_higher_terms(const std::vector<HigherTerm>& terms);

/// The normal-form symbol P(xi, eps; h) = p(xi) + i eps <q>(xi) + sum of higher terms.
struct NormalFormSymbol {
    std::shared_ptr<const ActionChart> chart;
    std::vector<HigherTerm> higher;

    Complex leading(const Vec2& xi, double epsilon) const;
    Complex higher_part(const Vec2& value, double epsilon, double h) const;
};

struct SpectralPoint {
    Complex mu;
    std::optional<IVec2> k_true;
};

struct SpectrumCloud {
    std::vector<SpectralPoint> points;
    SemiclassicalParams params;
    GoodRectangle rectangle;
    /// Lattice shift of the synthesis: xi_k = h (k - eta/4) - tau.
    Vec2 tau = Vec2::Zero();
    IVec2 eta = IVec2::Zero();

    std::size_t size() const { return points.size(); }
};

struct SynthOptions {
    double C0 = 1.0;
    unsigned jobs = 1;
    /// Chebyshev order of the interpolant of p on the enumeration box (per axis).
    int chebyshev_order = 18;
};

/**
 * Eigenvalues mu_k = P(xi_a + h (k - eta/4) - S / 2pi) + noise inside the good rectangle at a.
 * Noise is uniform of size h^N, seeded per (seed, k) so the cloud does not depend on
 * enumeration order. Points are sorted by (Re, Im).
 */
SpectrumCloud synth_spectrum(const NormalFormSymbol& symbol, const Vec2& a, const SemiclassicalParams& params,
                             const SynthOptions& options = {});

/// Interval of Im mu: eps [inf Q_inf - o(1), sup Q_inf + o(1)] over the chart leaves with
/// |p - E| <= delta_E, where o(1) = eps + h / eps.
Interval spectral_band(const ActionChart& chart, double E, double delta_E, const SemiclassicalParams& params);

/// Bound on how far the higher terms move a value of the box, as (|Re| shift in E,
/// |Im| shift / epsilon in G).
Vec2 higher_term_bound(const NormalFormSymbol& symbol, const Box& values, double epsilon, double h);

/// Deterministic 64-bit mixer used for seeded noise.
std::uint64_t splitmix64(std::uint64_t x);

/// Noise of lattice point k: size * (n_r + i n_i) / sqrt(2) with n_r, n_i uniform in [-1, 1]
/// drawn from splitmix64 keyed on (seed, k).
Complex synth_noise(std::uint64_t seed, const IVec2& k, double size);

}  // namespace specmono
