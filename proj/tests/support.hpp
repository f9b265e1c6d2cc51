#pragma once

#include "specmono/linalg.hpp"

#include <cstdint>
#include <random>

namespace testing {

/// Seeded case generator for property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    specmono::Vec2 in_box(const specmono::Box& b, double shrink = 0.0) {
        const specmono::Vec2 pad = shrink * b.size();
        return {uniform(b.lo.x() + pad.x(), b.hi.x() - pad.x()), uniform(b.lo.y() + pad.y(), b.hi.y() - pad.y())};
    }
    /// Product of random elementary matrices, so det = +-1 by construction.
    specmono::IMat2 unimodular(int steps) {
        specmono::IMat2 m = specmono::IMat2::Identity();
        for (int s = 0; s < steps; ++s) {
            specmono::IMat2 e = specmono::IMat2::Identity();
            switch (integer(0, 3)) {
                case 0: e(0, 1) = integer(-2, 2); break;
                case 1: e(1, 0) = integer(-2, 2); break;
                case 2: e << 0, 1, 1, 0; break;
                default: e(0, 0) = -1; break;
            }
            m = m * e;
        }
        return m;
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace testing
