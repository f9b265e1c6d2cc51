#include "specmono/trig_poly.hpp"

#include <cmath>
#include <utility>

namespace specmono {

TrigPolynomial::TrigPolynomial(std::vector<Term> terms) : terms_(std::move(terms)) {}

TrigPolynomial& TrigPolynomial::add(double constant, const Vec2& gradient, const IVec2& harmonic,
                                    Kind kind) {
    terms_.push_back(Term{constant, gradient, harmonic, kind});
    return *this;
}

double TrigPolynomial::operator()(const Vec2& x, const Vec2& xi) const {
    double sum = 0.0;
    for (const Term& t : terms_) {
        const double coeff = t.constant + t.gradient.dot(xi);
        const double phase = static_cast<double>(t.harmonic(0)) * x(0) +
                             static_cast<double>(t.harmonic(1)) * x(1);
        sum += coeff * (t.kind == Kind::Cos ? std::cos(phase) : std::sin(phase));
    }
    return sum;
}

double TrigPolynomial::mean(const Vec2& xi) const {
    double sum = 0.0;
    for (const Term& t : terms_)
        if (t.harmonic.isZero() && t.kind == Kind::Cos) sum += t.constant + t.gradient.dot(xi);
    return sum;
}

Vec2 TrigPolynomial::mean_gradient() const {
    Vec2 g = Vec2::Zero();
    for (const Term& t : terms_)
        if (t.harmonic.isZero() && t.kind == Kind::Cos) g += t.gradient;
    return g;
}

std::int64_t TrigPolynomial::degree() const {
    std::int64_t d = 0;
    for (const Term& t : terms_)
        d = std::max({d, std::abs(t.harmonic(0)), std::abs(t.harmonic(1))});
    return d;
}

}  // namespace specmono
