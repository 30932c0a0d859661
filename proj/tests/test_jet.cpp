#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wick/errors.hpp"
#include "wick/jet.hpp"

using namespace wick;

static GaussianRational gr(long p, long q = 1) { return GaussianRational(mpq_class(p, q)); }

TEST_CASE("rational arithmetic") {
    GaussianRational a(mpq_class(1, 2), mpq_class(3));
    GaussianRational b(mpq_class(-2), mpq_class(1, 3));
    CHECK((a * b).re == mpq_class(-2));
    CHECK((a * b).im == mpq_class(-6) + mpq_class(1, 6));
    CHECK((a / a) == GaussianRational(1));
    CHECK(a.conj().im == mpq_class(-3));
    CHECK((GaussianRational::i_unit() * GaussianRational::i_unit()) == GaussianRational(-1));
    CHECK_THROWS_AS(a / GaussianRational(0), NotInvertible);
    CHECK(parse_rational("-3/4") == mpq_class(-3, 4));
    CHECK_THROWS_AS(parse_rational("1/0x"), ConfigError);
}

TEST_CASE("jet product and derivative") {
    int n = 1;
    Jet z = Jet::coordinate(n, 0);
    Jet zb = Jet::coordinate(n, 1);
    Jet f = z * z * zb + Jet::constant(n, gr(2));
    CHECK(f.coeff({2, 1}) == GaussianRational(1));
    CHECK(f.at_origin() == gr(2));
    Jet df = f.derived(0);
    CHECK(df.coeff({1, 1}) == gr(2));
    Jet dzb = f.derived(1);
    CHECK(dzb == z * z);
    CHECK(f.conjugated() == zb * zb * z + Jet::constant(n, gr(2)));
}

TEST_CASE("trusted order propagation") {
    int n = 1;
    Jet f = Jet::coordinate(n, 0, 3); // trusted through degree 3
    Jet g = f.derived(0);
    CHECK(g.trusted_order() == 2);
    Jet h = g.derived(0).derived(0);
    CHECK(h.trusted_order() == 0);
    CHECK_THROWS_AS(h.derived(0), JetOrderExhausted);
    // products take the min trusted order
    CHECK((f * Jet::constant(n, gr(1))).trusted_order() == 3);
}

TEST_CASE("jet equality compares up to common trusted order") {
    int n = 1;
    Jet z = Jet::coordinate(n, 0);
    Jet a = z.truncated(2);
    Jet b = (z + z * z * z).truncated(5);
    CHECK(a == b.truncated(2));
    CHECK(a == b); // degree-3 term is beyond a's trusted order
    CHECK(b != z); // z is exact, so the cubic term counts
}

TEST_CASE("jet inversion") {
    int n = 1;
    Jet z = Jet::coordinate(n, 0);
    Jet zb = Jet::coordinate(n, 1);
    Jet f = (Jet::constant(n, gr(1)) + z * zb).truncated(6);
    Jet g = f.inverted();
    CHECK((f * g).truncated(6) == Jet::constant(n, gr(1)).truncated(6));
    // geometric series: coefficient of (z zbar)^2 is +1
    CHECK(g.coeff({2, 2}) == gr(1));
    Jet zero(n);
    CHECK_THROWS_AS(zero.inverted(), NotInvertible);
    CHECK_THROWS_AS((Jet::constant(n, gr(1)) + z).inverted(), ConfigError); // exact non-constant
}

TEST_CASE("matrix inversion and determinant") {
    int n = 1;
    Jet z = Jet::coordinate(n, 0);
    Jet zb = Jet::coordinate(n, 1);
    JetMat m(2, 2, n);
    m.at(0, 0) = (Jet::constant(n, gr(2)) + z * zb).truncated(4);
    m.at(0, 1) = z.truncated(4);
    m.at(1, 0) = zb.truncated(4);
    m.at(1, 1) = Jet::constant(n, gr(1)).truncated(4);
    JetMat inv = m.inverted();
    CHECK((m * inv) == JetMat::identity(2, n));
    CHECK((inv * m) == JetMat::identity(2, n));
    CHECK(m.det().at_origin() == gr(2));

    JetMat sing(1, 1, n);
    sing.at(0, 0) = z.truncated(4);
    CHECK_THROWS_AS(sing.inverted(), NotInvertible);
}

TEST_CASE("hermitian check") {
    int n = 1;
    Jet z = Jet::coordinate(n, 0);
    Jet zb = Jet::coordinate(n, 1);
    JetMat h(2, 2, n);
    h.at(0, 0) = Jet::constant(n, gr(1)) + z * zb;
    h.at(0, 1) = z.scaled(GaussianRational::i_unit());
    h.at(1, 0) = zb.scaled(-GaussianRational::i_unit());
    h.at(1, 1) = Jet::constant(n, gr(3));
    CHECK(h.is_hermitian());
    h.at(0, 1) = z;
    CHECK(!h.is_hermitian());
}
