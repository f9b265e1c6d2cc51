#pragma once

#include "specmono/linalg.hpp"

#include <string>
#include <vector>

namespace specmono {

/**
 * Perturbation symbol written in angle-action variables: a finite sum of
 * harmonics in the angles x with coefficients affine in the actions xi,
 *
 *     q(x, xi) = sum_j (c_j + <g_j, xi>) * trig_j(<m_j, x>),   trig in {cos, sin}.
 *
 * This family keeps torus averages exact under the trapezoid rule while still
 * having xi-dependent averages.
 */
class TrigPolynomial {
public:
    enum class Kind { Cos, Sin };

    struct Term {
        double constant = 0.0;
        Vec2 gradient = Vec2::Zero();
        IVec2 harmonic = IVec2::Zero();
        Kind kind = Kind::Cos;
    };

    TrigPolynomial() = default;
    explicit TrigPolynomial(std::vector<Term> terms);

    /// q(x, xi) evaluated pointwise.
    double operator()(const Vec2& x, const Vec2& xi) const;

    /// Exact torus average: the sum of the zero-harmonic cosine coefficients.
    double mean(const Vec2& xi) const;
    /// Gradient of mean() in xi (constant, since coefficients are affine).
    Vec2 mean_gradient() const;

    /// Largest |m|_inf over the harmonics.
    std::int64_t degree() const;

    const std::vector<Term>& terms() const { return terms_; }

    TrigPolynomial& add(double constant, const Vec2& gradient, const IVec2& harmonic,
                        Kind kind = Kind::Cos);

private:
    std::vector<Term> terms_;
};

}  // namespace specmono
