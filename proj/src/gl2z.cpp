#include "specmono/gl2z.hpp"

#include "specmono/errors.hpp"

#include <fmt/format.h>

#include <numeric>

namespace specmono {

namespace {

IMat2 make(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    IMat2 m;
    m << a, b, c, d;
    return m;
}

std::int64_t det_int(const IMat2& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

}  // namespace

ConjugacyClass normal_form(const IMat2& A) {
    ConjugacyClass out;
    out.det = det_int(A);
    out.trace = A.trace();
    if (std::abs(out.det) != 1) throw MonodromyError(fmt::format("matrix {} is not in GL(2, Z)", to_string(A)));
    out.representative = A;
    out.parabolic_m = -1;
    if (out.det == 1) {
        if (A == IMat2::Identity()) {
            out.kind = "identity";
            out.parabolic_m = 0;
        } else if (A == -IMat2::Identity()) {
            out.kind = "minus_identity";
            out.parabolic_m = 0;
        } else if (std::abs(out.trace) == 2) {
            // A = s (I + N) with N nilpotent of rank one; N = m v w^T with v, w primitive,
            // and conjugating by diag(1, -1) flips the sign of m.
            const std::int64_t s = out.trace > 0 ? 1 : -1;
            const IMat2 N = s * A - IMat2::Identity();
            const std::int64_t m = std::gcd(std::gcd(N(0, 0), N(0, 1)), std::gcd(N(1, 0), N(1, 1)));
            out.kind = "parabolic";
            out.parabolic_m = m;
            out.representative = s * make(1, m, 0, 1);
        } else if (std::abs(out.trace) < 2) {
            out.kind = "elliptic";
            if (out.trace == 0) out.representative = make(0, -1, 1, 0);
            else if (out.trace == 1) out.representative = make(1, -1, 1, 0);
            else out.representative = make(0, -1, 1, -1);
        } else {
            out.kind = "hyperbolic";
            out.canonical = false;
        }
    } else {
        out.kind = "reflection";
        if (out.trace == 0) {
            // Two classes: diag(1, -1) and the swap [[0, 1], [1, 0]], told apart mod 2.
            const IMat2 r = A - IMat2::Identity();
            const bool even = r(0, 0) % 2 == 0 && r(0, 1) % 2 == 0 && r(1, 0) % 2 == 0 && r(1, 1) % 2 == 0;
            out.representative = even ? make(1, 0, 0, -1) : make(0, 1, 1, 0);
        } else {
            out.canonical = false;
        }
    }
    return out;
}

std::optional<IMat2> conjugator(const IMat2& A, const IMat2& B, int search_bound) {
    const ConjugacyClass ca = normal_form(A), cb = normal_form(B);
    if (ca.trace != cb.trace || ca.det != cb.det) return std::nullopt;
    if (ca.canonical && cb.canonical && ca.representative != cb.representative) return std::nullopt;
    if (A == B) return IMat2::Identity();
    for (std::int64_t a = -search_bound; a <= search_bound; ++a)
        for (std::int64_t b = -search_bound; b <= search_bound; ++b)
            for (std::int64_t c = -search_bound; c <= search_bound; ++c)
                for (std::int64_t d = -search_bound; d <= search_bound; ++d) {
                    if (std::abs(a * d - b * c) != 1) continue;
                    const IMat2 P = make(a, b, c, d);
                    if (P * A == B * P) return P;
                }
    return std::nullopt;
}

bool gl2z_conjugate(const IMat2& A, const IMat2& B, int search_bound) {
    const ConjugacyClass ca = normal_form(A), cb = normal_form(B);
    if (ca.trace != cb.trace || ca.det != cb.det) return false;
    if (ca.canonical && cb.canonical) return ca.representative == cb.representative;
    return conjugator(A, B, search_bound).has_value();
}

std::string to_string(const IMat2& m) {
    return fmt::format("[[{}, {}], [{}, {}]]", m(0, 0), m(0, 1), m(1, 0), m(1, 1));
}

}  // namespace specmono
