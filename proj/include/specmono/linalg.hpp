#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>

namespace specmono {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using IVec2 = Eigen::Matrix<std::int64_t, 2, 1>;
using IMat2 = Eigen::Matrix<std::int64_t, 2, 2>;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Closed axis-aligned rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};

    static Box around(const Vec2& center, double radius) {
        return {center.array() - radius, center.array() + radius};
    }
    Vec2 center() const { return 0.5 * (lo + hi); }
    Vec2 size() const { return hi - lo; }
    bool empty() const { return lo.x() > hi.x() || lo.y() > hi.y(); }
    bool contains(const Vec2& p, double tol = 0.0) const {
        return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol &&
               p.y() >= lo.y() - tol && p.y() <= hi.y() + tol;
    }
    bool contains(const Box& other) const {
        return contains(other.lo) && contains(other.hi);
    }
    Box intersect(const Box& other) const {
        return {lo.cwiseMax(other.lo), hi.cwiseMin(other.hi)};
    }
    /// Interior intersection test (touching boxes do not overlap).
    bool overlaps(const Box& other) const {
        const Box b = intersect(other);
        return b.lo.x() < b.hi.x() && b.lo.y() < b.hi.y();
    }
    Box inflate(double margin) const {
        return {lo.array() - margin, hi.array() + margin};
    }
};

/// Euclidean distance from a point to a box (0 inside).
inline double distance(const Box& b, const Vec2& p) {
    const Vec2 d = (b.lo - p).cwiseMax(p - b.hi).cwiseMax(Vec2::Zero());
    return d.norm();
}

inline double det(const IMat2& m) {
    return static_cast<double>(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
}

/// Exact inverse of a unimodular integer matrix. Caller guarantees det = +-1.
inline IMat2 unimodular_inverse(const IMat2& m) {
    const std::int64_t d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    IMat2 inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return d * inv;  // d = +-1 so multiplying equals dividing
}

inline IMat2 round_to_int(const Mat2& m) {
    IMat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = static_cast<std::int64_t>(std::llround(m(i, j)));
    return r;
}

inline Vec2 as_vec(const Complex& z) { return {z.real(), z.imag()}; }
inline Complex as_complex(const Vec2& v) { return {v.x(), v.y()}; }

/// Smallest singular value of a 2x2 matrix.
inline double smallest_singular_value(const Mat2& m) {
    Eigen::JacobiSVD<Mat2> svd(m);
    return svd.singularValues()(1);
}

}  // namespace specmono
