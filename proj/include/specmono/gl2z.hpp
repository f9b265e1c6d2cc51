#pragma once

#include "specmono/linalg.hpp"

#include <optional>
#include <string>

namespace specmono {

/// GL(2, Z) conjugacy data of an integer matrix with det = +-1.
struct ConjugacyClass {
    /// identity, minus_identity, parabolic, elliptic, hyperbolic, reflection.
    std::string kind;
    /// Canonical representative where one is known (parabolic: sign * [[1, |m|], [0, 1]]);
    /// otherwise the matrix itself.
    IMat2 representative = IMat2::Identity();
    std::int64_t trace = 2;
    std::int64_t det = 1;
    /// |m| for parabolic classes, 0 for +-identity, -1 when not applicable.
    std::int64_t parabolic_m = 0;
    /// Whether the representative is a true normal form (so equal representatives <=> conjugate).
    bool canonical = true;
};

/// Throws MonodromyError if |det A| != 1.
ConjugacyClass normal_form(const IMat2& A);

/// Some P in GL(2, Z) with P A P^-1 = B. Compares normal forms when both are canonical,
/// otherwise searches P with entries bounded by `search_bound`.
std::optional<IMat2> conjugator(const IMat2& A, const IMat2& B, int search_bound = 12);
bool gl2z_conjugate(const IMat2& A, const IMat2& B, int search_bound = 12);

std::string to_string(const IMat2& m);

}  // namespace specmono
