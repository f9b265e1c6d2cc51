#pragma once

#include "specmono/linalg.hpp"
#include "specmono/trig_poly.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace specmono {

/// Critical values of the momentum map, described as isolated points and sampled curves.
struct SingularSet {
    std::vector<Vec2> points;
    std::vector<std::vector<Vec2>> curves;
    std::string description;
};

/**
 * Smooth action coordinates xi on some value-plane domain of a model. The
 * Hamiltonian becomes a function p(xi) of the actions alone; cycle_actions()
 * returns the action integrals S of the chart's fundamental cycles over a value,
 * so that xi = S / 2pi - offset on the chart.
 */
class LocalActions {
public:
    virtual ~LocalActions() = default;

    virtual double hamiltonian(const Vec2& xi) const = 0;
    /// d p / d xi from the model's own formula (exact, or implicit through action derivatives).
    virtual Vec2 omega(const Vec2& xi) const = 0;
    /// Action integrals over the torus above `value`; throws if the value does not single out a torus.
    virtual Vec2 cycle_actions(const Vec2& value) const = 0;
    /// Action integrals over the torus with chart actions xi.
    virtual Vec2 torus_actions(const Vec2& xi) const = 0;
    virtual Vec2 action_offset() const = 0;
    virtual bool in_domain(const Vec2& xi) const = 0;
};

/// An integrable two-degree-of-freedom system given through its action-angle data.
class ModelSystem {
public:
    virtual ~ModelSystem() = default;

    virtual std::string name() const = 0;
    virtual const TrigPolynomial& q_symbol() const = 0;
    virtual IVec2 maslov_eta() const = 0;
    virtual SingularSet singular_values() const = 0;
    /// Euclidean distance in the (E, G) value plane to the singular set (+inf when empty).
    virtual double distance_to_singular(const Vec2& value) const = 0;
    virtual bool is_regular(const Vec2& value) const = 0;
    /// Lower bound of |det d(p, <q>)/d xi| on charts whose value domain is `domain`.
    virtual double independence_bound(const Box& domain) const = 0;
    virtual std::shared_ptr<const LocalActions> local_actions(const Box& domain) const = 0;

    /// Upper cap on chart radii, used where the singular set is far away or empty.
    virtual double max_chart_radius() const { return 0.25; }
};

using ModelPtr = std::shared_ptr<const ModelSystem>;

/// Reference model with global actions: p(xi) = <omega*, xi> + |xi|^2 / 2.
/// q_choice is one of "cos_x1", "cos_x2", "xi_weighted", "constant".
ModelPtr make_flat_model(const Vec2& omega_star, const std::string& q_choice,
                         const Vec2& action_offset = Vec2::Zero());

/// Spherical pendulum-like champagne bottle H = (p_r^2 + p_theta^2 / r^2) / 2 + r^4 - b r^2
/// with second integral L_z; carries a focus-focus value at (E, l) = (0, 0).
ModelPtr make_champagne_model(double well_depth);

/// Radial turning points r_minus < r_plus of the champagne bottle at (E, l), b = well_depth.
/// Throws ModelError when (E, l) is not a regular value.
std::pair<double, double> champagne_turning_points(double well_depth, double energy, double l);

/// Radial action I_r = (1/pi) int p_r dr of the champagne bottle (no branch shift).
double champagne_radial_action(double well_depth, double energy, double l);

/// Lowest energy reachable at angular momentum l (relative equilibria curve).
double champagne_min_energy(double well_depth, double l);

struct ChartGridNode {
    Vec2 xi;
    Vec2 value;
};

/// One local action-angle chart: xi -> phi(xi) = (p(xi), <q>(xi)) with its inverse.
class ActionChart {
public:
    ActionChart(ModelPtr model, std::shared_ptr<const LocalActions> actions, Vec2 base_value,
                Vec2 base_xi, Box domain);

    const ModelSystem& model() const { return *model_; }
    const ModelPtr& model_ptr() const { return model_; }
    const LocalActions& local() const { return *actions_; }

    const Vec2& base() const { return base_value_; }
    const Vec2& base_xi() const { return base_xi_; }
    const Box& domain() const { return domain_; }
    const Vec2& actions() const { return actions_S_; }
    IVec2 eta() const { return model_->maslov_eta(); }
    const Vec2& tau() const { return tau_; }
    const std::vector<ChartGridNode>& grid() const { return grid_; }
    bool invertible() const { return min_abs_det_ > 0.0; }
    double min_abs_det() const { return min_abs_det_; }

    double p(const Vec2& xi) const { return actions_->hamiltonian(xi); }
    double avg_q(const Vec2& xi) const { return model_->q_symbol().mean(xi); }
    Vec2 phi(const Vec2& xi) const { return {p(xi), avg_q(xi)}; }
    Vec2 omega(const Vec2& xi) const { return actions_->omega(xi); }
    /// d phi / d xi, rows (omega, grad <q>).
    Mat2 jacobian(const Vec2& xi) const;

    /// Newton inversion of phi seeded from the nearest grid node. Converges to ~1e-13.
    Vec2 xi_of(const Vec2& value) const;
    bool covers(const Vec2& value) const { return domain_.contains(value); }
    /// xi lies in the model's action domain and maps into the (half-inflated) chart domain.
    bool contains_xi(const Vec2& xi) const;
    double radius() const { return 0.5 * domain_.size().x(); }

    /// Action integrals at another value of the same chart (used to check tau constancy).
    Vec2 actions_at(const Vec2& value) const { return actions_->cycle_actions(value); }
    Vec2 tau_at(const Vec2& value) const;

private:
    void build_grid();

    ModelPtr model_;
    std::shared_ptr<const LocalActions> actions_;
    Vec2 base_value_;
    Vec2 base_xi_;
    Box domain_;
    Vec2 actions_S_ = Vec2::Zero();
    Vec2 tau_ = Vec2::Zero();
    std::vector<ChartGridNode> grid_;
    double min_abs_det_ = 0.0;
};

/// Chart around a regular value c; domain radius is 0.1 * dist(c, singular set).
ActionChart action_coords(const ModelPtr& model, const Vec2& c);
/// Chart around the torus with actions xi (works for degenerate <q> as well).
ActionChart action_coords_at(const ModelPtr& model, const Vec2& xi);

struct FrequencyData {
    Vec2 omega = Vec2::Zero();
    double rho = 0.0;  ///< projective angle of omega in [0, pi)
    Vec2 d_avg_q = Vec2::Zero();
    double omega_prime_norm = 0.0;  ///< smallest singular value of d omega / d xi
};

/// Step used for central differences in xi.
inline double fd_step(const Vec2& xi) { return 1e-5 * (1.0 + xi.norm()); }

/// Frequency data at xi by central differences of p.
FrequencyData frequency(const ActionChart& chart, const Vec2& xi);

/// Projective class of a nonzero vector as an angle in [0, pi).
double projective_angle(const Vec2& v);

/// d omega / d xi by central differences of the chart's omega.
Mat2 omega_derivative(const ActionChart& chart, const Vec2& xi);

}  // namespace specmono
