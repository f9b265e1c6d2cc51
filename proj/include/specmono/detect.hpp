#pragma once

#include "specmono/models.hpp"
#include "specmono/synth.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace specmono {

/// chi(u) = u_1 + i eps u_2.
inline Complex chi(const Vec2& u, double epsilon) { return {u.x(), epsilon * u.y()}; }
/// Exact inverse of chi; throws DomainError for epsilon = 0.
Vec2 chi_inverse(const Complex& z, double epsilon);

/// Rescaled points chi^-1(mu) of a cloud, in cloud order.
std::vector<Vec2> scaled_points(const SpectrumCloud& cloud);

struct LatticeBasis {
    Vec2 b1 = Vec2::Zero();
    Vec2 b2 = Vec2::Zero();

    Mat2 matrix() const {
        Mat2 m;
        m.col(0) = b1;
        m.col(1) = b2;
        return m;
    }
    /// Ratio of singular values of [b1 b2].
    double condition() const;
};

/// Lagrange-Gauss reduction: |b1| <= |b2|, |<b1, b2>| <= |b1|^2 / 2 and <b1, b2> >= 0.
LatticeBasis gauss_reduce(Vec2 b1, Vec2 b2);

/// Fixed-radius neighbour search over 2D points through a uniform grid hash.
class NeighborIndex {
public:
    explicit NeighborIndex(const std::vector<Vec2>& points, double cell = 0.0);
    /// Indices of the k nearest other points of points[i], closest first.
    std::vector<std::size_t> nearest(std::size_t i, std::size_t k) const;

private:
    const std::vector<Vec2>& points_;
    Vec2 origin_;
    double cell_;
    long nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> buckets_;
    long bucket_of(double coord, double lo, long n) const;
};

struct DetectOptions {
    std::size_t min_points = 25;
    std::size_t neighbors = 6;
    double max_condition = 50.0;
    /// Allowed fraction of points the BFS may leave unlabeled.
    double max_unlabeled = 0.01;
    /// A neighbour step is used only if its lattice coordinates are within this of integers.
    double step_tolerance = 0.3;
    int fit_degree = 2;
    /// Acceptance threshold of the fit residual, in units of h.
    double max_residual = 0.05;
};

/// Two shortest independent nearest-neighbour difference classes of the rescaled cloud.
LatticeBasis detect_basis(const std::vector<Vec2>& u, const DetectOptions& options = {});
LatticeBasis detect_basis(const SpectrumCloud& cloud, const DetectOptions& options = {});

struct Labeling {
    std::vector<std::optional<IVec2>> labels;
    /// Max-norm distance of the accepted step's lattice coordinates to integers (per point).
    std::vector<double> step_residuals;
    std::size_t anchor = 0;
    double labeled_fraction = 0.0;
};

/**
 * Breadth-first unwinding from the anchor: every point gets the label of an already
 * labelled neighbour plus the rounded coordinate difference in the local basis, which is
 * re-estimated at each labelled point from its labelled neighbours. Two paths that
 * disagree raise DetectError, as does an unlabelled fraction above options.max_unlabeled.
 */
Labeling label_lattice(const std::vector<Vec2>& u, const LatticeBasis& basis, std::size_t anchor,
                       const DetectOptions& options = {});
Labeling label_lattice(const SpectrumCloud& cloud, const LatticeBasis& basis, const Complex& anchor,
                       const DetectOptions& options = {});

/**
 * Polynomial map R^2 -> R^2 of total degree `degree` in scaled coordinates
 * s = (g(u) - center) / scale, where g is the identity or, with a chart hint, the
 * inverse g = phi^-1 of the hint chart.
 */
class PolyMap {
public:
    PolyMap() = default;
    PolyMap(int degree, Vec2 center, double scale, std::shared_ptr<const ActionChart> hint);

    int degree() const { return degree_; }
    std::size_t size() const { return exponents_.size(); }
    /// Basis values at u.
    Eigen::VectorXd basis(const Vec2& u) const;
    Vec2 operator()(const Vec2& u) const;
    /// d map / d u.
    Mat2 jacobian(const Vec2& u) const;

    Eigen::MatrixXd& coefficients() { return coeffs_; }
    const Eigen::MatrixXd& coefficients() const { return coeffs_; }
    /// map -> M map + shift, exactly on the coefficients.
    void transform(const Mat2& M, const Vec2& shift);
    bool uses_hint() const { return static_cast<bool>(hint_); }

private:
    Vec2 coordinate(const Vec2& u) const;
    Mat2 coordinate_jacobian(const Vec2& u) const;

    int degree_ = 1;
    Vec2 center_ = Vec2::Zero();
    double scale_ = 1.0;
    std::shared_ptr<const ActionChart> hint_;
    std::vector<std::pair<int, int>> exponents_;
    Eigen::MatrixXd coeffs_;  // size() x 2
};

struct HChart {
    GoodRectangle rectangle;
    double h = 0.0;
    double epsilon = 0.0;
    LatticeBasis basis;
    std::size_t anchor = 0;
    /// Rescaled points that received a label, with their labels.
    std::vector<Vec2> u;
    std::vector<IVec2> labels;
    /// Index in the cloud of each labelled point.
    std::vector<std::size_t> point_index;
    std::size_t cloud_size = 0;
    PolyMap fit;
    /// Distance of f(u) to hZ^2 in units of h, per labelled point.
    std::vector<double> residuals;
    double max_residual = 0.0;
    bool accepted = false;

    /// Scaled chart f~(u) = f(chi(u)).
    Vec2 operator()(const Vec2& u) const { return fit(u); }
    Mat2 jacobian(const Vec2& u) const { return fit.jacobian(u); }
    /// Value-plane box where the chart was fitted.
    Box domain() const { return rectangle.value_box(); }
    double labeled_fraction() const {
        return cloud_size ? static_cast<double>(labels.size()) / static_cast<double>(cloud_size) : 0.0;
    }
    /// Changes the label gauge k -> M k + c (M in GL(2, Z)) and the fit accordingly.
    void regauge(const IMat2& M, const IVec2& c);
};

/// Integer gauge k_b = M k_a + c relating two labelings of the same points (exact check).
struct Gauge {
    IMat2 M = IMat2::Identity();
    IVec2 c = IVec2::Zero();
};
std::optional<Gauge> solve_gauge(const std::vector<IVec2>& from, const std::vector<IVec2>& to);

/// Detection, labelling and least-squares fit of f~ with f~(u_k) = h k on one cloud.
/// `a` is the good value at the centre of the rectangle and anchors the labels.
HChart fit_hchart(const SpectrumCloud& cloud, const Vec2& a, std::shared_ptr<const ActionChart> chart_hint = nullptr,
                  const DetectOptions& options = {});

/// Regauges `chart` so that its labels coincide with the cloud's synthesis labels.
/// Throws DetectError if no exact integer gauge exists.
void align_to_truth(HChart& chart, const SpectrumCloud& cloud);

/// Newton inversion of phi on an action chart (quadratically convergent, 50 iterations max).
Vec2 invert_leading(const ActionChart& chart, const Vec2& target);

/// Two-level extrapolation 2 f~_fine - f~_coarse for (h, eps) -> (h/4, eps/2), same gauge.
Vec2 richardson_leading(const HChart& coarse, const HChart& fine, const Vec2& u);

}  // namespace specmono
