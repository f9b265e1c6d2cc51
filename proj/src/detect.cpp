#include "specmono/detect.hpp"

#include "specmono/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

namespace specmono {

Vec2 chi_inverse(const Complex& z, double epsilon) {
    if (epsilon == 0.0) throw DomainError("chi_inverse needs epsilon != 0");
    return {z.real(), z.imag() / epsilon};
}

std::vector<Vec2> scaled_points(const SpectrumCloud& cloud) {
    const double eps = cloud.params.epsilon();
    std::vector<Vec2> u;
    u.reserve(cloud.points.size());
    for (const auto& pt : cloud.points) u.push_back(chi_inverse(pt.mu, eps));
    return u;
}

double LatticeBasis::condition() const {
    Eigen::JacobiSVD<Mat2> svd(matrix());
    const auto s = svd.singularValues();
    return s(1) > 0.0 ? s(0) / s(1) : std::numeric_limits<double>::infinity();
}

LatticeBasis gauss_reduce(Vec2 b1, Vec2 b2) {
    if (b1.squaredNorm() > b2.squaredNorm()) std::swap(b1, b2);
    for (int it = 0; it < 100; ++it) {
        const double mu = std::round(b1.dot(b2) / b1.squaredNorm());
        b2 -= mu * b1;
        if (b2.squaredNorm() >= b1.squaredNorm()) break;
        std::swap(b1, b2);
    }
    if (b1.dot(b2) < 0.0) b2 = -b2;
    return {b1, b2};
}

NeighborIndex::NeighborIndex(const std::vector<Vec2>& points, double cell) : points_(points) {
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
    Vec2 hi = -lo;
    for (const auto& p : points_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    if (points_.empty()) lo = hi = Vec2::Zero();
    const Vec2 size = (hi - lo).cwiseMax(Vec2::Constant(1e-300));
    if (!(cell > 0.0)) {
        const double area = std::max(size.x() * size.y(), 1e-300);
        cell = std::sqrt(area / std::max<std::size_t>(points_.size(), 1));
        if (!(cell > 0.0) || !std::isfinite(cell)) cell = std::max(size.x(), size.y());
        if (!(cell > 0.0)) cell = 1.0;
    }
    cell_ = cell;
    origin_ = lo;
    nx_ = std::min<long>(4096, static_cast<long>(size.x() / cell_) + 1);
    ny_ = std::min<long>(4096, static_cast<long>(size.y() / cell_) + 1);
    buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const long bx = bucket_of(points_[i].x(), origin_.x(), nx_);
        const long by = bucket_of(points_[i].y(), origin_.y(), ny_);
        buckets_[static_cast<std::size_t>(by * nx_ + bx)].push_back(i);
    }
}

long NeighborIndex::bucket_of(double coord, double lo, long n) const {
    return std::clamp(static_cast<long>((coord - lo) / cell_), 0L, n - 1);
}

std::vector<std::size_t> NeighborIndex::nearest(std::size_t i, std::size_t k) const {
    const Vec2& p = points_[i];
    const long bx = bucket_of(p.x(), origin_.x(), nx_);
    const long by = bucket_of(p.y(), origin_.y(), ny_);
    std::vector<std::pair<double, std::size_t>> found;
    const long max_ring = std::max(nx_, ny_);
    for (long ring = 0; ring <= max_ring; ++ring) {
        for (long y = by - ring; y <= by + ring; ++y) {
            if (y < 0 || y >= ny_) continue;
            for (long x = bx - ring; x <= bx + ring; ++x) {
                if (x < 0 || x >= nx_) continue;
                if (std::max(std::abs(x - bx), std::abs(y - by)) != ring) continue;
                for (std::size_t j : buckets_[static_cast<std::size_t>(y * nx_ + x)])
                    if (j != i) found.emplace_back((points_[j] - p).squaredNorm(), j);
            }
        }
        if (found.size() >= k) {
            std::nth_element(found.begin(), found.begin() + static_cast<long>(k - 1), found.end());
            // Every point outside the scanned rings is at least ring * cell away.
            const double reach = static_cast<double>(ring) * cell_;
            if (found[k - 1].first <= reach * reach) break;
        }
    }
    std::sort(found.begin(), found.end());
    if (found.size() > k) found.resize(k);
    std::vector<std::size_t> out;
    out.reserve(found.size());
    for (const auto& f : found) out.push_back(f.second);
    return out;
}

LatticeBasis detect_basis(const std::vector<Vec2>& u, const DetectOptions& options) {
    if (u.size() < options.min_points)
        throw DetectError(fmt::format("insufficient points for lattice detection: {} < {}", u.size(),
                                      options.min_points));
    NeighborIndex index(u);
    struct Cluster {
        Vec2 sum = Vec2::Zero();
        std::size_t count = 0;
        Vec2 centroid() const { return sum / static_cast<double>(count); }
    };
    std::vector<Vec2> diffs;
    diffs.reserve(u.size() * options.neighbors);
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j : index.nearest(i, options.neighbors)) diffs.push_back(u[j] - u[i]);
    std::sort(diffs.begin(), diffs.end(), [](const Vec2& a, const Vec2& b) { return a.squaredNorm() < b.squaredNorm(); });

    std::vector<Cluster> clusters;
    for (const Vec2& d : diffs) {
        if (!(d.norm() > 0.0)) continue;
        bool placed = false;
        for (auto& c : clusters) {
            const Vec2 m = c.centroid();
            const double tol = 0.2 * m.norm();
            if ((d - m).norm() <= tol) {
                c.sum += d, ++c.count, placed = true;
            } else if ((d + m).norm() <= tol) {
                c.sum -= d, ++c.count, placed = true;
            }
            if (placed) break;
        }
        if (!placed) clusters.push_back({d, 1});
    }
    const std::size_t min_count = std::max<std::size_t>(3, u.size() / 20);
    std::vector<Vec2> candidates;
    for (const auto& c : clusters)
        if (c.count >= min_count) candidates.push_back(c.centroid());
    std::sort(candidates.begin(), candidates.end(),
              [](const Vec2& a, const Vec2& b) { return a.squaredNorm() < b.squaredNorm(); });
    if (candidates.empty()) throw DetectError("degenerate cloud: no repeated neighbour difference");
    const Vec2 b1 = candidates.front();
    std::optional<Vec2> b2;
    for (std::size_t i = 1; i < candidates.size() && !b2; ++i) {
        const Vec2& c = candidates[i];
        const double cross = std::abs(b1.x() * c.y() - b1.y() * c.x());
        if (cross > 0.25 * b1.norm() * c.norm()) b2 = c;
    }
    if (!b2) throw DetectError("degenerate cloud: fewer than two independent difference clusters");
    const LatticeBasis basis = gauss_reduce(b1, *b2);
    const double cond = basis.condition();
    if (cond > options.max_condition)
        throw DetectError(fmt::format("lattice basis rejected: condition number {:.3g} > {}", cond,
                                      options.max_condition));
    return basis;
}

LatticeBasis detect_basis(const SpectrumCloud& cloud, const DetectOptions& options) {
    return detect_basis(scaled_points(cloud), options);
}

namespace {

/// Least-squares local basis B with u_n - u_i = B (L_n - L_i) over labelled neighbours.
std::optional<Mat2> local_basis(const std::vector<Vec2>& u, const std::vector<std::optional<IVec2>>& labels,
                                std::size_t i, const std::vector<std::size_t>& neighbours) {
    Mat2 UL = Mat2::Zero(), LL = Mat2::Zero();
    for (std::size_t n : neighbours) {
        if (!labels[n]) continue;
        const Vec2 dl = (*labels[n] - *labels[i]).cast<double>();
        const Vec2 du = u[n] - u[i];
        UL += du * dl.transpose();
        LL += dl * dl.transpose();
    }
    if (LL.determinant() < 0.5) return std::nullopt;
    return UL * LL.inverse();
}

}  // namespace

Labeling label_lattice(const std::vector<Vec2>& u, const LatticeBasis& basis, std::size_t anchor,
                       const DetectOptions& options) {
    if (anchor >= u.size()) throw DetectError("anchor index out of range");
    const std::size_t n = u.size();
    const std::size_t k = std::min<std::size_t>(8, n - 1);
    NeighborIndex index(u);
    std::vector<std::vector<std::size_t>> neighbours(n);
    for (std::size_t i = 0; i < n; ++i) neighbours[i] = index.nearest(i, k);

    Labeling out;
    out.anchor = anchor;
    out.labels.assign(n, std::nullopt);
    out.step_residuals.assign(n, 0.0);
    std::vector<Mat2> local(n, basis.matrix());
    out.labels[anchor] = IVec2::Zero();
    std::deque<std::size_t> queue{anchor};
    std::size_t labelled = 1;
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        if (auto B = local_basis(u, out.labels, i, neighbours[i])) {
            if (std::abs(B->determinant()) > 1e-3 * std::abs(basis.matrix().determinant())) local[i] = *B;
        }
        const Mat2 inv = local[i].inverse();
        for (std::size_t j : neighbours[i]) {
            const Vec2 c = inv * (u[j] - u[i]);
            const Vec2 r = c.array().round();
            const double res = (c - r).cwiseAbs().maxCoeff();
            if (res > options.step_tolerance || r.isZero()) continue;
            const IVec2 label = *out.labels[i] + r.cast<std::int64_t>();
            if (!out.labels[j]) {
                out.labels[j] = label;
                out.step_residuals[j] = res;
                local[j] = local[i];
                queue.push_back(j);
                ++labelled;
            } else if (*out.labels[j] != label && res < 0.25) {
                throw DetectError(fmt::format("label conflict at point {}: ({}, {}) vs ({}, {})", j,
                                              (*out.labels[j])(0), (*out.labels[j])(1), label(0), label(1)));
            }
        }
    }
    out.labeled_fraction = static_cast<double>(labelled) / static_cast<double>(n);
    if (1.0 - out.labeled_fraction > options.max_unlabeled)
        throw DetectError(fmt::format("only {:.2f}% of the points could be labelled", 100.0 * out.labeled_fraction));
    return out;
}

Labeling label_lattice(const SpectrumCloud& cloud, const LatticeBasis& basis, const Complex& anchor,
                       const DetectOptions& options) {
    if (cloud.points.empty()) throw DetectError("empty cloud");
    std::size_t best = 0;
    for (std::size_t i = 1; i < cloud.points.size(); ++i)
        if (std::abs(cloud.points[i].mu - anchor) < std::abs(cloud.points[best].mu - anchor)) best = i;
    return label_lattice(scaled_points(cloud), basis, best, options);
}

PolyMap::PolyMap(int degree, Vec2 center, double scale, std::shared_ptr<const ActionChart> hint)
    : degree_(degree), center_(std::move(center)), scale_(scale), hint_(std::move(hint)) {
    if (degree_ < 1) throw DomainError("polynomial chart degree must be >= 1");
    for (int total = 0; total <= degree_; ++total)
        for (int a = total; a >= 0; --a) exponents_.emplace_back(a, total - a);
    coeffs_ = Eigen::MatrixXd::Zero(static_cast<long>(exponents_.size()), 2);
}

Vec2 PolyMap::coordinate(const Vec2& u) const {
    const Vec2 g = hint_ ? hint_->xi_of(u) : u;
    return (g - center_) / scale_;
}

Mat2 PolyMap::coordinate_jacobian(const Vec2& u) const {
    if (!hint_) return Mat2::Identity() / scale_;
    const Vec2 xi = hint_->xi_of(u);
    return hint_->jacobian(xi).inverse() / scale_;
}

Eigen::VectorXd PolyMap::basis(const Vec2& u) const {
    const Vec2 s = coordinate(u);
    Eigen::VectorXd b(static_cast<long>(exponents_.size()));
    for (std::size_t m = 0; m < exponents_.size(); ++m)
        b(static_cast<long>(m)) = std::pow(s.x(), exponents_[m].first) * std::pow(s.y(), exponents_[m].second);
    return b;
}

Vec2 PolyMap::operator()(const Vec2& u) const {
    return (basis(u).transpose() * coeffs_).transpose();
}

Mat2 PolyMap::jacobian(const Vec2& u) const {
    const Vec2 s = coordinate(u);
    Mat2 ds = Mat2::Zero();  // d map / d s
    for (std::size_t m = 0; m < exponents_.size(); ++m) {
        const auto [a, b] = exponents_[m];
        const double dx = a == 0 ? 0.0 : a * std::pow(s.x(), a - 1) * std::pow(s.y(), b);
        const double dy = b == 0 ? 0.0 : b * std::pow(s.x(), a) * std::pow(s.y(), b - 1);
        const Vec2 c = coeffs_.row(static_cast<long>(m)).transpose();
        ds.col(0) += c * dx;
        ds.col(1) += c * dy;
    }
    return ds * coordinate_jacobian(u);
}

void PolyMap::transform(const Mat2& M, const Vec2& shift) {
    coeffs_ = (coeffs_ * M.transpose()).eval();
    coeffs_.row(0) += shift.transpose();  // exponent (0, 0) comes first
}

void HChart::regauge(const IMat2& M, const IVec2& c) {
    if (std::abs(det(M)) != 1.0) throw DetectError("gauge matrix is not unimodular");
    for (auto& l : labels) l = M * l + c;
    fit.transform(M.cast<double>(), h * c.cast<double>());
}

std::optional<Gauge> solve_gauge(const std::vector<IVec2>& from, const std::vector<IVec2>& to) {
    if (from.size() != to.size() || from.size() < 3) return std::nullopt;
    Eigen::MatrixXd A(static_cast<long>(from.size()), 3);
    Eigen::MatrixXd B(static_cast<long>(from.size()), 2);
    for (std::size_t i = 0; i < from.size(); ++i) {
        A.row(static_cast<long>(i)) << static_cast<double>(from[i](0)), static_cast<double>(from[i](1)), 1.0;
        B.row(static_cast<long>(i)) << static_cast<double>(to[i](0)), static_cast<double>(to[i](1));
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < 3) return std::nullopt;
    const Eigen::MatrixXd X = qr.solve(B);  // 3 x 2
    Gauge g;
    for (int r = 0; r < 2; ++r) {
        for (int col = 0; col < 2; ++col) g.M(r, col) = std::llround(X(col, r));
        g.c(r) = std::llround(X(2, r));
    }
    if (std::abs(det(g.M)) != 1.0) return std::nullopt;
    for (std::size_t i = 0; i < from.size(); ++i)
        if (g.M * from[i] + g.c != to[i]) return std::nullopt;
    return g;
}

HChart fit_hchart(const SpectrumCloud& cloud, const Vec2& a, std::shared_ptr<const ActionChart> chart_hint,
                  const DetectOptions& options) {
    const std::vector<Vec2> u = scaled_points(cloud);
    HChart chart;
    chart.rectangle = cloud.rectangle;
    chart.h = cloud.params.h;
    chart.epsilon = cloud.params.epsilon();
    chart.cloud_size = u.size();
    chart.basis = detect_basis(u, options);

    std::size_t anchor = 0;
    for (std::size_t i = 1; i < u.size(); ++i)
        if ((u[i] - a).squaredNorm() < (u[anchor] - a).squaredNorm()) anchor = i;
    chart.anchor = anchor;
    const Labeling labeling = label_lattice(u, chart.basis, anchor, options);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!labeling.labels[i]) continue;
        chart.u.push_back(u[i]);
        chart.labels.push_back(*labeling.labels[i]);
        chart.point_index.push_back(i);
    }

    // Polynomial coordinates centred at a (or phi^-1(a)), scaled to O(1) over the rectangle.
    Vec2 center = a;
    double scale = cloud.rectangle.half_width;
    if (chart_hint) {
        center = chart_hint->xi_of(a);
        scale = 0.0;
        const Box box = cloud.rectangle.value_box();
        for (int corner = 0; corner < 4; ++corner) {
            const Vec2 v{corner & 1 ? box.hi.x() : box.lo.x(), corner & 2 ? box.hi.y() : box.lo.y()};
            scale = std::max(scale, (chart_hint->xi_of(v) - center).cwiseAbs().maxCoeff());
        }
    }
    chart.fit = PolyMap(options.fit_degree, center, scale, chart_hint);

    const auto n = static_cast<long>(chart.u.size());
    const auto m = static_cast<long>(chart.fit.size());
    if (n < m) throw DetectError("too few labelled points for the chart fit");
    Eigen::MatrixXd A(n, m), Y(n, 2);
    for (long i = 0; i < n; ++i) {
        A.row(i) = chart.fit.basis(chart.u[static_cast<std::size_t>(i)]).transpose();
        Y.row(i) = chart.h * chart.labels[static_cast<std::size_t>(i)].cast<double>().transpose();
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < m) throw DetectError("normal equations are rank deficient");
    chart.fit.coefficients() = qr.solve(Y);

    chart.residuals.resize(chart.u.size());
    chart.max_residual = 0.0;
    for (std::size_t i = 0; i < chart.u.size(); ++i) {
        const Vec2 v = chart.fit(chart.u[i]) / chart.h;
        const Vec2 r = v.array().round();
        chart.residuals[i] = (v - r).norm();
        chart.max_residual = std::max(chart.max_residual, chart.residuals[i]);
    }
    chart.accepted = chart.max_residual <= options.max_residual &&
                     chart.labeled_fraction() >= 1.0 - options.max_unlabeled;
    return chart;
}

void align_to_truth(HChart& chart, const SpectrumCloud& cloud) {
    std::vector<IVec2> truth;
    truth.reserve(chart.labels.size());
    for (std::size_t idx : chart.point_index) {
        const auto& k = cloud.points.at(idx).k_true;
        if (!k) throw DetectError("cloud carries no synthesis labels");
        truth.push_back(*k);
    }
    const auto gauge = solve_gauge(chart.labels, truth);
    if (!gauge) throw DetectError("labels are not an integer gauge of the synthesis labels");
    chart.regauge(gauge->M, gauge->c);
}

Vec2 invert_leading(const ActionChart& chart, const Vec2& target) { return chart.xi_of(target); }

Vec2 richardson_leading(const HChart& coarse, const HChart& fine, const Vec2& u) {
    return 2.0 * fine(u) - coarse(u);
}

}  // namespace specmono
