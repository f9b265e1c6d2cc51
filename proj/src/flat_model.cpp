#include "specmono/errors.hpp"
#include "specmono/models.hpp"

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

#include <limits>

namespace specmono {

namespace {

TrigPolynomial flat_symbol(const std::string& choice) {
    using Kind = TrigPolynomial::Kind;
    TrigPolynomial q;
    if (choice == "cos_x1") {
        q.add(1.0, Vec2::Zero(), IVec2{1, 0}, Kind::Cos);
    } else if (choice == "cos_x2") {
        q.add(1.0, Vec2::Zero(), IVec2{0, 1}, Kind::Cos);
    } else if (choice == "xi_weighted") {
        q.add(0.0, Vec2{0.0, 1.0}, IVec2::Zero(), Kind::Cos);
        q.add(0.1, Vec2::Zero(), IVec2{1, 0}, Kind::Cos);
    } else if (choice == "constant") {
        q.add(3.0, Vec2::Zero(), IVec2::Zero(), Kind::Cos);
    } else {
        throw ModelError(fmt::format("unknown q choice '{}'", choice));
    }
    return q;
}

class FlatActions final : public LocalActions {
public:
    FlatActions(Vec2 omega_star, Vec2 offset, bool invertible)
        : omega_star_(std::move(omega_star)), offset_(std::move(offset)), invertible_(invertible) {}

    double hamiltonian(const Vec2& xi) const override {
        return omega_star_.dot(xi) + 0.5 * xi.squaredNorm();
    }
    Vec2 omega(const Vec2& xi) const override { return omega_star_ + xi; }

    // <q> = xi_2, so xi_2 = G and xi_1 solves a quadratic on the upper sheet.
    Vec2 cycle_actions(const Vec2& value) const override {
        if (!invertible_) throw ModelError("the value does not determine a torus for this q");
        const double g = value.y();
        const double w1 = omega_star_.x();
        const double disc = w1 * w1 + 2.0 * (value.x() - omega_star_.y() * g - 0.5 * g * g);
        if (disc < 0.0) throw ModelError("value below the fold of the flat model");
        const Vec2 xi{-w1 + std::copysign(std::sqrt(disc), w1), g};
        return torus_actions(xi);
    }
    Vec2 torus_actions(const Vec2& xi) const override { return kTwoPi * (xi + offset_); }
    Vec2 action_offset() const override { return offset_; }
    bool in_domain(const Vec2& xi) const override {
        // Sheet of phi containing xi = 0: omega_1 keeps the sign of omega*_1.
        return (omega_star_.x() + xi.x()) * omega_star_.x() > 0.0 || !invertible_;
    }

private:
    Vec2 omega_star_;
    Vec2 offset_;
    bool invertible_;
};

class FlatModel final : public ModelSystem {
public:
    FlatModel(Vec2 omega_star, std::string choice, Vec2 offset)
        : omega_star_(std::move(omega_star)),
          choice_(std::move(choice)),
          q_(flat_symbol(choice_)),
          offset_(std::move(offset)) {}

    std::string name() const override { return "flat"; }
    const TrigPolynomial& q_symbol() const override { return q_; }
    IVec2 maslov_eta() const override { return IVec2::Zero(); }

    SingularSet singular_values() const override {
        SingularSet s;
        if (!invertible()) {
            s.description = "<q> is constant: every value is critical for (p, <q>)";
            return s;
        }
        s.description = "fold of (p, <q>) where omega_1 = 0";
        std::vector<Vec2> curve;
        for (int i = -50; i <= 50; ++i) {
            const double g = 0.04 * i;
            curve.emplace_back(fold_energy(g), g);
        }
        s.curves.push_back(std::move(curve));
        return s;
    }

    double distance_to_singular(const Vec2& v) const override {
        if (!invertible()) return std::numeric_limits<double>::infinity();
        const double gap = v.x() - fold_energy(v.y());
        if (gap <= 0.0) return 0.0;
        // Nearest fold point lies within |G - g| <= gap; the objective is smooth there.
        auto sq = [&](double g) {
            const double de = v.x() - fold_energy(g);
            const double dg = v.y() - g;
            return de * de + dg * dg;
        };
        const auto [g_best, d2] =
            boost::math::tools::brent_find_minima(sq, v.y() - gap, v.y() + gap, 50);
        (void)g_best;
        return std::sqrt(d2);
    }

    bool is_regular(const Vec2& v) const override {
        return invertible() && v.x() - fold_energy(v.y()) > 0.0;
    }

    double independence_bound(const Box& domain) const override {
        if (!invertible()) return 0.0;
        // |det dphi| = |omega_1| = sqrt(2 (E - E_fold(G))), minimised over the box.
        double gap = std::numeric_limits<double>::infinity();
        for (double g : {domain.lo.y(), domain.hi.y(), std::clamp(-omega_star_.y(), domain.lo.y(), domain.hi.y())})
            gap = std::min(gap, domain.lo.x() - fold_energy(g));
        return gap > 0.0 ? std::sqrt(2.0 * gap) : 0.0;
    }

    std::shared_ptr<const LocalActions> local_actions(const Box&) const override {
        return std::make_shared<FlatActions>(omega_star_, offset_, invertible());
    }

private:
    bool invertible() const { return !q_.mean_gradient().isZero(); }
    double fold_energy(double g) const {
        const double w1 = omega_star_.x();
        return -0.5 * w1 * w1 + omega_star_.y() * g + 0.5 * g * g;
    }

    Vec2 omega_star_;
    std::string choice_;
    TrigPolynomial q_;
    Vec2 offset_;
};

}  // namespace

ModelPtr make_flat_model(const Vec2& omega_star, const std::string& q_choice,
                         const Vec2& action_offset) {
    if (omega_star.isZero()) throw ModelError("omega_star must be nonzero");
    return std::make_shared<FlatModel>(omega_star, q_choice, action_offset);
}

}  // namespace specmono
