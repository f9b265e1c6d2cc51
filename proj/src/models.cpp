#include "specmono/models.hpp"

#include "specmono/errors.hpp"

#include <fmt/format.h>

#include <limits>
#include <utility>

namespace specmono {

namespace {

constexpr int kGridSide = 9;
constexpr int kNewtonMaxIter = 50;

Vec2 newton_invert(const ActionChart& chart, const Vec2& target, Vec2 xi) {
    const LocalActions& local = chart.local();
    Vec2 residual = chart.phi(xi) - target;
    double rnorm = residual.norm();
    const double tol = 1e-14 * (1.0 + target.norm());
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        if (rnorm <= tol) return xi;
        const Mat2 J = chart.jacobian(xi);
        if (std::abs(J.determinant()) < 1e-300) break;
        const Vec2 step = J.inverse() * residual;
        double lambda = 1.0;
        Vec2 trial = xi;
        Vec2 trial_res = residual;
        bool accepted = false;
        while (lambda > 1e-6) {
            trial = xi - lambda * step;
            if (local.in_domain(trial)) {
                trial_res = chart.phi(trial) - target;
                if (trial_res.norm() < rnorm || lambda < 1e-3) {
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
        const double moved = (trial - xi).norm();
        xi = trial;
        residual = trial_res;
        rnorm = residual.norm();
        if (moved <= 4e-16 * (1.0 + xi.norm())) break;
    }
    if (rnorm <= 1e-11 * (1.0 + target.norm())) return xi;
    throw ModelError(fmt::format("inversion of phi failed to converge at ({}, {}), residual {:.3e}",
                                 target.x(), target.y(), rnorm));
}

Box chart_domain(const ModelSystem& model, const Vec2& c) {
    const double dist = model.distance_to_singular(c);
    const double radius = std::min(0.1 * dist, model.max_chart_radius());
    if (!(radius > 1e-6))
        throw ModelError(fmt::format("value ({}, {}) is too close to the singular set", c.x(), c.y()));
    return Box::around(c, radius);
}

}  // namespace

ActionChart::ActionChart(ModelPtr model, std::shared_ptr<const LocalActions> actions,
                         Vec2 base_value, Vec2 base_xi, Box domain)
    : model_(std::move(model)),
      actions_(std::move(actions)),
      base_value_(std::move(base_value)),
      base_xi_(std::move(base_xi)),
      domain_(std::move(domain)) {
    actions_S_ = actions_->torus_actions(base_xi_);
    tau_ = actions_S_ / kTwoPi - base_xi_;
    build_grid();
}

Mat2 ActionChart::jacobian(const Vec2& xi) const {
    Mat2 J;
    J.row(0) = omega(xi).transpose();
    J.row(1) = model_->q_symbol().mean_gradient().transpose();
    return J;
}

void ActionChart::build_grid() {
    const Mat2 J = jacobian(base_xi_);
    const double radius = 0.5 * domain_.size().x();
    Box xi_box;
    if (std::abs(J.determinant()) > 1e-12) {
        const Mat2 Jinv = J.inverse();
        xi_box = Box{base_xi_, base_xi_};
        for (int corner = 0; corner < 4; ++corner) {
            const Vec2 v{corner & 1 ? domain_.hi.x() : domain_.lo.x(),
                         corner & 2 ? domain_.hi.y() : domain_.lo.y()};
            const Vec2 xi = base_xi_ + Jinv * (v - base_value_);
            xi_box.lo = xi_box.lo.cwiseMin(xi);
            xi_box.hi = xi_box.hi.cwiseMax(xi);
        }
        xi_box = xi_box.inflate(0.1 * xi_box.size().maxCoeff());
    } else {
        xi_box = Box::around(base_xi_, radius);
    }

    grid_.clear();
    min_abs_det_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGridSide; ++i) {
        for (int j = 0; j < kGridSide; ++j) {
            const Vec2 t{static_cast<double>(i) / (kGridSide - 1), static_cast<double>(j) / (kGridSide - 1)};
            const Vec2 xi = xi_box.lo + t.cwiseProduct(xi_box.size());
            if (!actions_->in_domain(xi)) continue;
            grid_.push_back({xi, phi(xi)});
            min_abs_det_ = std::min(min_abs_det_, std::abs(jacobian(xi).determinant()));
        }
    }
    if (grid_.empty()) throw ModelError("action chart grid is empty");
    if (!(min_abs_det_ > 1e-12)) min_abs_det_ = 0.0;
}

Vec2 ActionChart::xi_of(const Vec2& value) const {
    if (!invertible())
        throw DomainError("phi is not a local diffeomorphism on this chart (d<q> degenerate)");
    const ChartGridNode* best = &grid_.front();
    for (const ChartGridNode& node : grid_)
        if ((node.value - value).squaredNorm() < (best->value - value).squaredNorm()) best = &node;
    return newton_invert(*this, value, best->xi);
}

bool ActionChart::contains_xi(const Vec2& xi) const {
    if (!actions_->in_domain(xi)) return false;
    return domain_.inflate(0.5 * radius()).contains(phi(xi));
}

Vec2 ActionChart::tau_at(const Vec2& value) const {
    return actions_at(value) / kTwoPi - xi_of(value);
}

ActionChart action_coords(const ModelPtr& model, const Vec2& c) {
    if (!model->is_regular(c))
        throw ModelError(fmt::format("({}, {}) is not a regular value of the {} model", c.x(), c.y(),
                                     model->name()));
    const Box domain = chart_domain(*model, c);
    auto local = model->local_actions(domain);
    // Seed from the action integrals, then invert phi numerically.
    const Vec2 seed = local->cycle_actions(c) / kTwoPi - local->action_offset();
    ActionChart provisional(model, local, c, seed, domain);
    const Vec2 xi_c = provisional.xi_of(c);
    return ActionChart(model, std::move(local), c, xi_c, domain);
}

ActionChart action_coords_at(const ModelPtr& model, const Vec2& xi) {
    const double cap = model->max_chart_radius();
    auto probe = model->local_actions(Box::around(Vec2::Zero(), cap));
    if (!probe->in_domain(xi)) throw DomainError("actions outside the model domain");
    const Vec2 c{probe->hamiltonian(xi), model->q_symbol().mean(xi)};
    const double dist = model->distance_to_singular(c);
    const double radius = std::isfinite(dist) ? std::min(0.1 * dist, cap) : cap;
    const Box domain = Box::around(c, radius);
    return ActionChart(model, model->local_actions(domain), c, xi, domain);
}

double projective_angle(const Vec2& v) {
    double angle = std::atan2(v.y(), v.x());
    if (angle < 0.0) angle += kPi;
    if (angle >= kPi) angle -= kPi;
    return angle;
}

Mat2 omega_derivative(const ActionChart& chart, const Vec2& xi) {
    const double h = fd_step(xi);
    Mat2 D;
    for (int j = 0; j < 2; ++j) {
        Vec2 e = Vec2::Zero();
        e(j) = h;
        D.col(j) = (chart.omega(xi + e) - chart.omega(xi - e)) / (2.0 * h);
    }
    return D;
}

FrequencyData frequency(const ActionChart& chart, const Vec2& xi) {
    if (!chart.contains_xi(xi))
        throw DomainError(fmt::format("xi = ({}, {}) is outside the chart domain", xi.x(), xi.y()));
    const double h = fd_step(xi);
    FrequencyData out;
    for (int j = 0; j < 2; ++j) {
        Vec2 e = Vec2::Zero();
        e(j) = h;
        out.omega(j) = (chart.p(xi + e) - chart.p(xi - e)) / (2.0 * h);
        out.d_avg_q(j) = (chart.avg_q(xi + e) - chart.avg_q(xi - e)) / (2.0 * h);
    }
    out.rho = projective_angle(out.omega);
    out.omega_prime_norm = smallest_singular_value(omega_derivative(chart, xi));
    return out;
}

}  // namespace specmono
