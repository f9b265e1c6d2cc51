#include "doctest.h"
#include "support.hpp"

#include "specmono/errors.hpp"
#include "specmono/gl2z.hpp"

using namespace specmono;

namespace {

IMat2 mat(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
    IMat2 m;
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("normal forms of the standard classes") {
    CHECK(normal_form(IMat2::Identity()).kind == "identity");
    CHECK(normal_form(-IMat2::Identity()).kind == "minus_identity");

    const ConjugacyClass p = normal_form(mat(1, 1, 0, 1));
    CHECK(p.kind == "parabolic");
    CHECK(p.parabolic_m == 1);
    CHECK(p.canonical);
    CHECK(normal_form(mat(1, -3, 0, 1)).parabolic_m == 3);
    CHECK(normal_form(mat(1, 0, 2, 1)).parabolic_m == 2);
    CHECK(normal_form(mat(-1, 2, 0, -1)).kind == "parabolic");

    CHECK(normal_form(mat(0, -1, 1, 0)).kind == "elliptic");
    CHECK(normal_form(mat(2, 1, 1, 1)).kind == "hyperbolic");
    const ConjugacyClass r = normal_form(mat(0, 1, 1, 0));
    CHECK(r.kind == "reflection");
    CHECK(r.det == -1);
    CHECK_THROWS_AS(normal_form(mat(2, 0, 0, 1)), MonodromyError);
    CHECK(to_string(mat(1, -1, 0, 1)) == "[[1, -1], [0, 1]]");
}

TEST_CASE("parabolic invariants survive GL(2, Z) conjugation (property)") {
    testing::Gen gen(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::int64_t m = gen.integer(-4, 4);
        if (m == 0) continue;
        const IMat2 A = mat(1, m, 0, 1);
        const IMat2 P = gen.unimodular(4);
        const IMat2 B = P * A * unimodular_inverse(P);
        const ConjugacyClass c = normal_form(B);
        CHECK(c.kind == "parabolic");
        CHECK(c.parabolic_m == std::abs(m));
        CHECK(c.trace == 2);
        const auto Q = conjugator(A, B);
        REQUIRE(Q.has_value());
        CHECK(std::abs(det(*Q)) == 1.0);
        CHECK(*Q * A * unimodular_inverse(*Q) == B);
        CHECK_FALSE(gl2z_conjugate(A, mat(1, std::abs(m) + 1, 0, 1)));
    }
}

TEST_CASE("conjugacy of general classes matches trace and det (property)") {
    testing::Gen gen(32);
    for (int trial = 0; trial < 100; ++trial) {
        const IMat2 A = gen.unimodular(5);
        const IMat2 P = gen.unimodular(3);
        const IMat2 B = P * A * unimodular_inverse(P);
        const ConjugacyClass ca = normal_form(A), cb = normal_form(B);
        CHECK(ca.kind == cb.kind);
        CHECK(ca.trace == cb.trace);
        CHECK(ca.det == cb.det);
        if (ca.canonical) CHECK(ca.representative == cb.representative);
        CHECK(gl2z_conjugate(A, B, 40));
    }
}
