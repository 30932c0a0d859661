#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wick/errors.hpp"
#include "wick/weyl.hpp"

using namespace wick;

namespace {

GaussianRational gr(long p, long q = 1) { return GaussianRational(mpq_class(p, q)); }

// single symmetric generator dz^g_s (g in [0,2n)) with unit jet
WeylElement gen_s(int n, int g, TruncationPolicy pol) {
    WeylElement e = WeylElement::scalar(n, pol);
    WeylKey k;
    k.sym = Multi(static_cast<size_t>(2 * n), 0);
    k.sym[static_cast<size_t>(g)] = 1;
    e.add_term(k, Jet::constant(n, gr(1)));
    return e;
}

WeylElement gen_a(int n, int g, TruncationPolicy pol) {
    WeylElement e = WeylElement::scalar(n, pol);
    WeylKey k;
    k.sym = Multi(static_cast<size_t>(2 * n), 0);
    k.asym = 1u << g;
    e.add_term(k, Jet::constant(n, gr(1)));
    return e;
}

WeylElement lambda_unit(int n, TruncationPolicy pol) {
    return WeylElement::from_jet(Jet::constant(n, gr(1)), pol, 1);
}

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(unsigned long seed) : eng(seed) {}
    int ri(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    GaussianRational coeff() {
        return GaussianRational(mpq_class(ri(-3, 3), ri(1, 3)), mpq_class(ri(-3, 3), ri(1, 3)));
    }
    Jet jet(int n, int deg) {
        Jet f(n);
        for (int t = 0; t < 3; ++t) {
            Multi m(static_cast<size_t>(2 * n), 0);
            int d = ri(0, deg);
            for (int i = 0; i < d; ++i) m[static_cast<size_t>(ri(0, 2 * n - 1))]++;
            f.set_coeff(m, f.coeff(m) + coeff());
        }
        return f;
    }
    WeylElement element(int n, TruncationPolicy pol) {
        WeylElement e = WeylElement::scalar(n, pol);
        for (int t = 0; t < 4; ++t) {
            WeylKey k;
            k.lambda = ri(0, 1);
            k.sym = Multi(static_cast<size_t>(2 * n), 0);
            int ds = ri(0, 2);
            for (int i = 0; i < ds; ++i) k.sym[static_cast<size_t>(ri(0, 2 * n - 1))]++;
            k.asym = static_cast<std::uint32_t>(ri(0, (1 << (2 * n)) - 1));
            e.add_term(k, jet(n, 2));
        }
        return e;
    }
};

JetMat flat_ginv(int n) { return JetMat::identity(n, n); }

} // namespace

TEST_CASE("fibrewise undeformed product") {
    int n = 1;
    auto pol = TruncationPolicy::make(2);
    WeylElement zs = gen_s(n, 0, pol), zbs = gen_s(n, 1, pol);
    WeylElement za = gen_a(n, 0, pol), zba = gen_a(n, 1, pol);
    CHECK(mu_product(zs, zbs) == mu_product(zbs, zs));
    CHECK(mu_product(za, za).is_zero());
    CHECK(mu_product(za, zba) == -mu_product(zba, za));
    CHECK_THROWS_AS(mu_product(WeylElement(n, ValueKind::Section, 2, pol),
                               WeylElement(n, ValueKind::Section, 2, pol)),
                    KindMismatch);
}

TEST_CASE("delta family on single generators") {
    int n = 1;
    auto pol = TruncationPolicy::make(2);
    WeylElement zs = gen_s(n, 0, pol), za = gen_a(n, 0, pol);
    CHECK(delta_family(zs, DeltaOp::Delta) == za);
    CHECK(delta_family(za, DeltaOp::DeltaInv) == zs);
    // Hodge identity on dz_a
    WeylElement lhs = delta_family(delta_family(za, DeltaOp::DeltaInv), DeltaOp::Delta) +
                      delta_family(delta_family(za, DeltaOp::Delta), DeltaOp::DeltaInv) +
                      delta_family(za, DeltaOp::Sigma);
    CHECK(lhs == za);
    // a = dz_s (x) dz_a
    WeylElement a = mu_product(zs, za);
    CHECK(delta_family(a, DeltaOp::Delta).is_zero());
    WeylElement half_zs2 = mu_product(zs, zs).scaled(gr(1, 2));
    CHECK(delta_family(a, DeltaOp::DeltaInv) == half_zs2);
    WeylElement h = delta_family(delta_family(a, DeltaOp::DeltaInv), DeltaOp::Delta) +
                    delta_family(delta_family(a, DeltaOp::Delta), DeltaOp::DeltaInv) +
                    delta_family(a, DeltaOp::Sigma);
    CHECK(h == a);
}

TEST_CASE("projections") {
    int n = 1;
    auto pol = TruncationPolicy::make(2);
    WeylElement zs = gen_s(n, 0, pol), zbs = gen_s(n, 1, pol), za = gen_a(n, 0, pol);
    CHECK(proj(mu_product(zs, zbs), Proj::PiZ).is_zero());
    Rng rng(7);
    WeylElement f = WeylElement::from_jet(rng.jet(n, 2), pol);
    CHECK(proj(f, Proj::PiZ) == f);
    // split fixed-point identity on a = dzbar_s (x) dz_a
    WeylElement a = mu_product(zbs, za);
    WeylElement lhs = delta_family(delta_family(a, DeltaOp::DeltaZ), DeltaOp::DeltaZInv) +
                      delta_family(delta_family(a, DeltaOp::DeltaZInv), DeltaOp::DeltaZ) +
                      proj(a, Proj::PiZ);
    CHECK(lhs == a);
}

TEST_CASE("split Hodge identities on random elements") {
    int n = 2;
    // delta* raises the total degree by one, so the identities need headroom
    // below the cap
    auto pol = TruncationPolicy::make(2, 5);
    Rng rng(11);
    for (int t = 0; t < 8; ++t) {
        WeylElement a = rng.element(n, pol);
        WeylElement full = delta_family(delta_family(a, DeltaOp::Delta), DeltaOp::DeltaInv) +
                           delta_family(delta_family(a, DeltaOp::DeltaInv), DeltaOp::Delta) +
                           delta_family(a, DeltaOp::Sigma);
        CHECK(full == a);
        // holomorphic Koszul pair goes with the anti-holomorphic projection
        WeylElement hz = delta_family(delta_family(a, DeltaOp::DeltaZ), DeltaOp::DeltaZInv) +
                         delta_family(delta_family(a, DeltaOp::DeltaZInv), DeltaOp::DeltaZ) +
                         proj(a, Proj::PiZbar);
        CHECK(hz == a);
        WeylElement hzb = delta_family(delta_family(a, DeltaOp::DeltaZbar), DeltaOp::DeltaZbarInv) +
                          delta_family(delta_family(a, DeltaOp::DeltaZbarInv), DeltaOp::DeltaZbar) +
                          proj(a, Proj::PiZ);
        CHECK(hzb == a);
        CHECK(delta_family(delta_family(a, DeltaOp::Delta), DeltaOp::Delta).is_zero());
        CHECK(delta_family(delta_family(a, DeltaOp::DeltaStar), DeltaOp::DeltaStar).is_zero());
        CHECK(proj(proj(a, Proj::PiZ), Proj::PiZbar) == delta_family(a, DeltaOp::Sigma));
    }
}

TEST_CASE("contractions and fibrewise Laplacian, flat chart") {
    int n = 1;
    auto pol = TruncationPolicy::make(2);
    JetMat ginv = flat_ginv(n);
    WeylElement zs = gen_s(n, 0, pol), zbs = gen_s(n, 1, pol);
    WeylElement one = WeylElement::from_jet(Jet::constant(n, gr(1)), pol);
    CHECK(contraction(zs, zbs, Contraction::P, ginv) == one);
    CHECK(contraction(zbs, zs, Contraction::P, ginv).is_zero());
    CHECK(contraction(zbs, zs, Contraction::Pbar, ginv) == one);
    // script-P = (2/i)(P - Pbar): on (dz_s, dzbar_s) it is -2i
    GaussianRational two_over_i = gr(2) / GaussianRational::i_unit();
    WeylElement sp = (contraction(zs, zbs, Contraction::P, ginv) -
                      contraction(zs, zbs, Contraction::Pbar, ginv))
                         .scaled(two_over_i);
    CHECK(sp == one.scaled(gr(-2) * GaussianRational::i_unit()));
    CHECK(laplace_fib(mu_product(zs, zbs), ginv) == one);
    CHECK(laplace_fib(mu_product(zs, zs), ginv).is_zero());
}

TEST_CASE("fibrewise equivalence S^kappa") {
    int n = 1;
    auto pol = TruncationPolicy::make(2);
    JetMat ginv = flat_ginv(n);
    Rng rng(13);
    WeylElement a = rng.element(n, pol);
    CHECK(s_kappa(a, 0, ginv) == a);
    WeylElement m = mu_product(gen_s(n, 0, pol), gen_s(n, 1, pol));
    CHECK(s_kappa(m, 1, ginv) == m + lambda_unit(n, pol));
    // S^kappa S^{-kappa} = id
    CHECK(s_kappa(s_kappa(a, 1, ginv), -1, ginv) == a);
}

TEST_CASE("kappa-ordered product, flat chart") {
    int n = 1;
    auto pol = TruncationPolicy::make(2);
    JetMat ginv = flat_ginv(n);
    WeylElement zs = gen_s(n, 0, pol), zbs = gen_s(n, 1, pol);
    WeylElement m = mu_product(zs, zbs);
    CHECK(circ_kappa(zs, zbs, 1, ginv) == m + lambda_unit(n, pol).scaled(gr(2)));
    CHECK(circ_kappa(zbs, zs, 1, ginv) == m);
    CHECK(circ_kappa(zs, zbs, 0, ginv) == m + lambda_unit(n, pol));
    CHECK(circ_kappa(zbs, zs, 0, ginv) == m - lambda_unit(n, pol));
}

TEST_CASE("kappa-product associativity and S-intertwining") {
    int n = 2;
    auto pol = TruncationPolicy::make(3, 6);
    Rng rng(17);
    // non-constant central coefficients: any Hermitian invertible jet matrix
    JetMat ginv(n, n, n);
    Jet u = Jet::coordinate(n, 0) * Jet::coordinate(n, 2); // z^1 zbar^1
    ginv.at(0, 0) = (Jet::constant(n, gr(1)) + u).truncated(pol.jet_order);
    ginv.at(1, 1) = Jet::constant(n, gr(2)).truncated(pol.jet_order);
    ginv.at(0, 1) = Jet::coordinate(n, 1).truncated(pol.jet_order); // z^2
    ginv.at(1, 0) = Jet::coordinate(n, 2).truncated(pol.jet_order); // zbar^1
    for (mpq_class kappa : {mpq_class(-1), mpq_class(0), mpq_class(1)}) {
        WeylElement a = rng.element(n, pol), b = rng.element(n, pol), c = rng.element(n, pol);
        CHECK(circ_kappa(circ_kappa(a, b, kappa, ginv), c, kappa, ginv) ==
              circ_kappa(a, circ_kappa(b, c, kappa, ginv), kappa, ginv));
        CHECK(circ_kappa(a, b, kappa, ginv) ==
              s_kappa(circ_kappa(s_kappa(a, -kappa, ginv), s_kappa(b, -kappa, ginv), 0, ginv),
                      kappa, ginv));
        // lambda^0 part is the undeformed product
        WeylElement d = circ_kappa(a, b, kappa, ginv) - mu_product(a, b);
        for (const auto& [k, v] : d.terms()) CHECK(k.lambda > 0);
    }
}

TEST_CASE("Leibniz relation for the fibrewise Laplacian") {
    int n = 1;
    // cap must fit the full product before the Laplacian lowers it
    auto pol = TruncationPolicy::make(2, 8);
    JetMat ginv = flat_ginv(n);
    Rng rng(19);
    for (int t = 0; t < 6; ++t) {
        WeylElement a = rng.element(n, pol), b = rng.element(n, pol);
        WeylElement lhs = laplace_fib(mu_product(a, b), ginv);
        WeylElement rhs = mu_product(laplace_fib(a, ginv), b) +
                          mu_product(a, laplace_fib(b, ginv)) +
                          contraction(a, b, Contraction::P, ginv) +
                          contraction(a, b, Contraction::Pbar, ginv);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("Laplacian commutes with delta") {
    int n = 2;
    auto pol = TruncationPolicy::make(2);
    JetMat ginv = flat_ginv(n);
    Rng rng(23);
    for (int t = 0; t < 6; ++t) {
        WeylElement a = rng.element(n, pol);
        CHECK(laplace_fib(delta_family(a, DeltaOp::Delta), ginv) ==
              delta_family(laplace_fib(a, ginv), DeltaOp::Delta));
    }
}

TEST_CASE("super-commutator") {
    int n = 1;
    auto pol = TruncationPolicy::make(2);
    JetMat ginv = flat_ginv(n);
    WeylElement one = WeylElement::from_jet(Jet::constant(n, gr(1)), pol);
    Rng rng(29);
    WeylElement a = rng.element(n, pol);
    CHECK(ad_kappa(one, a, 0, ginv).is_zero());
    // flat Weyl: [dz_s dzbar_s, dz_s] = -2 lambda dz_s
    WeylElement m = mu_product(gen_s(n, 0, pol), gen_s(n, 1, pol));
    WeylElement ad = ad_kappa(m, gen_s(n, 0, pol), 0, ginv);
    CHECK(ad == gen_s(n, 0, pol).times_lambda(1).scaled(gr(-2)));
    CHECK(ad.div_lambda() == gen_s(n, 0, pol).scaled(gr(-2)));
    CHECK_THROWS_AS(one.div_lambda(), NegativeLambdaPower);
}

TEST_CASE("projections intertwine the Wick product") {
    int n = 1;
    auto pol = TruncationPolicy::make(3, 6);
    JetMat ginv = flat_ginv(n);
    Rng rng(31);
    for (int t = 0; t < 6; ++t) {
        WeylElement f = rng.element(n, pol), g = rng.element(n, pol);
        CHECK(proj(circ_kappa(f, g, 1, ginv), Proj::PiZ) ==
              proj(circ_kappa(proj(f, Proj::PiZ), g, 1, ginv), Proj::PiZ));
        CHECK(proj(circ_kappa(f, g, 1, ginv), Proj::PiZbar) ==
              proj(circ_kappa(f, proj(g, Proj::PiZbar), 1, ginv), Proj::PiZbar));
    }
}

TEST_CASE("star involution") {
    int n = 1;
    auto pol = TruncationPolicy::make(3, 6);
    JetMat ginv = flat_ginv(n);
    WeylElement iu = WeylElement::from_jet(Jet::constant(n, GaussianRational::i_unit()), pol);
    CHECK(star_involution(iu, nullptr) ==
          WeylElement::from_jet(Jet::constant(n, -GaussianRational::i_unit()), pol));
    Rng rng(37);
    for (int t = 0; t < 6; ++t) {
        WeylElement a = rng.element(n, pol), b = rng.element(n, pol);
        CHECK(star_involution(star_involution(a, nullptr), nullptr) == a);
        // super-anti-homomorphism for the Wick product, graded by deg_a parity
        WeylElement lhs = star_involution(circ_kappa(a, b, 1, ginv), nullptr);
        WeylElement rhs = WeylElement::scalar(n, pol);
        for (int pa = 0; pa <= a.max_deg_a(); ++pa)
            for (int pb = 0; pb <= b.max_deg_a(); ++pb) {
                WeylElement t2 = circ_kappa(star_involution(b.part_deg_a(pb), nullptr),
                                            star_involution(a.part_deg_a(pa), nullptr), 1, ginv);
                rhs += (pa % 2 && pb % 2) ? -t2 : t2;
            }
        CHECK(lhs == rhs);
    }
    // endomorphism adjoint with identity fibre metric is the conjugate transpose
    JetMat h = JetMat::identity(2, n);
    WeylElement ea(n, ValueKind::Endo, 2, pol);
    WeylKey k;
    k.sym = Multi(static_cast<size_t>(2 * n), 0);
    JetMat v(2, 2, n);
    v.at(0, 1) = Jet::constant(n, GaussianRational::i_unit());
    ea.add_term(k, v);
    WeylElement star = star_involution(ea, &h);
    JetMat w(2, 2, n);
    w.at(1, 0) = Jet::constant(n, -GaussianRational::i_unit());
    WeylElement expect(n, ValueKind::Endo, 2, pol);
    expect.add_term(k, w);
    CHECK(star == expect);
    CHECK_THROWS_AS(star_involution(ea, nullptr), ConfigError);
}
