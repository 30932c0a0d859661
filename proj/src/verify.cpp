#include "wick/verify.hpp"

#include <chrono>
#include <functional>
#include <sstream>

#include "wick/errors.hpp"

namespace wick {

namespace {

GaussianRational gr(long p, long q = 1) { return GaussianRational(mpq_class(p, q)); }

std::string key_str(const WeylKey& k) {
    std::ostringstream os;
    os << "{lambda=" << k.lambda << " sym=(";
    for (size_t i = 0; i < k.sym.size(); ++i) os << (i ? "," : "") << k.sym[i];
    os << ") asym=" << k.asym << "}";
    return os.str();
}

// All multi-indices over cur.size() slots with total weight <= budget.
void enum_multi(int budget, Multi& cur, size_t pos, const std::function<void(const Multi&)>& fn) {
    if (pos == cur.size()) {
        fn(cur);
        return;
    }
    for (int v = 0; v <= budget; ++v) {
        cur[pos] = v;
        enum_multi(budget - v, cur, pos + 1, fn);
    }
    cur[pos] = 0;
}

Jet derive_multi(Jet f, const Multi& alpha, int offset) {
    for (size_t i = 0; i < alpha.size(); ++i)
        for (int t = 0; t < alpha[i]; ++t) f = f.derived(static_cast<int>(i) + offset);
    return f;
}

mpq_class multi_factorial(const Multi& m) {
    mpq_class out = 1;
    for (int v : m)
        for (int t = 2; t <= v; ++t) out *= t;
    return out;
}

Jet coeff_at(const WeylElement& a, int lam) {
    WeylKey k;
    k.lambda = lam;
    k.sym = Multi(static_cast<size_t>(2 * a.dim()), 0);
    auto it = a.terms().find(k);
    if (it == a.terms().end()) return Jet(a.dim());
    return it->second.at(0, 0);
}

TruncationPolicy drop_cap(TruncationPolicy pol, int by = 1) {
    pol.total_cap -= by;
    return pol;
}

KaehlerChart suite_chart(const SuiteConfig& cfg) {
    Jet K = cfg.potential ? *cfg.potential
                          : builtin_potential(cfg.chart, cfg.n, cfg.pol.jet_order + 2);
    return chart_from_potential(K, cfg.n, cfg.pol, cfg.sabotage_curvature_sign);
}

WeylElement suite_omega(const SuiteConfig& cfg, const KaehlerChart& c) {
    return cfg.with_omega ? c.omega.times_lambda(1) : WeylElement::scalar(cfg.n, cfg.pol);
}

// Rank-2 Hermitian metric with a nontrivial off-diagonal jet, used by the
// bundle-flavoured suites.
JetMat rank2_metric(int n) {
    JetMat H = JetMat::identity(2, n);
    H.at(0, 1) = Jet::coordinate(n, 0);
    H.at(1, 0) = Jet::coordinate(n, n);
    return H;
}

// Collects timed reports; a check body returns an empty witness on success.
struct Runner {
    const SuiteConfig& cfg;
    std::vector<CheckReport> out;

    void check(const std::string& id, const std::string& anchor,
               const std::function<std::string()>& body) {
        CheckReport r;
        r.id = id;
        r.anchor = anchor;
        r.lambda_order = cfg.pol.lambda_order;
        r.total_cap = cfg.pol.total_cap;
        auto t0 = std::chrono::steady_clock::now();
        try {
            r.witness = body();
        } catch (const EngineError& e) {
            r.witness = std::string("error: ") + e.what();
        }
        r.pass = r.witness.empty();
        r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                             .count();
        out.push_back(std::move(r));
    }

    void push(CheckReport r) { out.push_back(std::move(r)); }
};

std::string diff(const WeylElement& a, const WeylElement& b) {
    if (a == b) return {};
    std::string w = first_difference(a, b);
    return w.empty() ? "elements differ" : w;
}

std::string expect_zero(const WeylElement& a) {
    if (a.is_zero()) return {};
    const auto& [k, v] = *a.terms().begin();
    for (int r = 0; r < v.rows(); ++r)
        for (int c = 0; c < v.cols(); ++c)
            if (!v.at(r, c).is_zero())
                return "nonzero at key " + key_str(k) + " entry (" + std::to_string(r) + "," +
                       std::to_string(c) + "): " + v.at(r, c).str();
    return "nonzero term with empty matrix";
}

// (i/lambda) ad_kappa with cap headroom.
WeylElement iad(const WeylElement& r, const WeylElement& a, const mpq_class& kappa,
                const JetMat& ginv) {
    TruncationPolicy big = a.policy();
    big.total_cap += 2;
    big.lambda_order += 1;
    return ad_kappa(r.with_policy(big), a.with_policy(big), kappa, ginv)
        .scaled(GaussianRational::i_unit())
        .div_lambda()
        .with_policy(a.policy());
}

void suite_graded(Runner& rn) {
    const SuiteConfig& cfg = rn.cfg;
    auto c = suite_chart(cfg);
    auto span = spanning_set(cfg.n, cfg.pol, ValueKind::Scalar, 1, cfg.seed);

    rn.check("graded.delta-squared", "the degree-shift differential is a differential", [&] {
        for (const auto& x : span) {
            auto w = expect_zero(delta_family(delta_family(x, DeltaOp::Delta), DeltaOp::Delta));
            if (!w.empty()) return w;
        }
        return std::string();
    });
    rn.check("graded.hodge", "delta delta^{-1} + delta^{-1} delta + sigma = id", [&] {
        // the inverse passes through keys one degree above the cap
        TruncationPolicy big = cfg.pol;
        big.total_cap += 1;
        for (const auto& x : span) {
            WeylElement xb = x.with_policy(big);
            WeylElement rec = delta_family(delta_family(xb, DeltaOp::DeltaInv), DeltaOp::Delta) +
                              delta_family(delta_family(xb, DeltaOp::Delta), DeltaOp::DeltaInv) +
                              delta_family(xb, DeltaOp::Sigma);
            auto w = diff(x, rec.with_policy(cfg.pol));
            if (!w.empty()) return w;
        }
        return std::string();
    });
    rn.check("graded.split-hodge", "the split differentials decompose the full one", [&] {
        for (const auto& x : span) {
            auto w = diff(delta_family(x, DeltaOp::Delta),
                          delta_family(x, DeltaOp::DeltaZ) +
                              delta_family(x, DeltaOp::DeltaZbar));
            if (!w.empty()) return w;
        }
        return std::string();
    });
    SampleGen gen(cfg.seed + 1);
    rn.check("graded.circ-associative", "the fibrewise product is associative", [&] {
        for (int t = 0; t < 4; ++t) {
            WeylElement a = gen.element(cfg.n, cfg.pol);
            WeylElement b = gen.element(cfg.n, cfg.pol);
            WeylElement d = gen.element(cfg.n, cfg.pol);
            auto w = diff(circ_kappa(circ_kappa(a, b, cfg.kappa, c.ginv), d, cfg.kappa, c.ginv),
                          circ_kappa(a, circ_kappa(b, d, cfg.kappa, c.ginv), cfg.kappa, c.ginv));
            if (!w.empty()) return w;
        }
        return std::string();
    });
    rn.check("graded.circ-unit", "the constant one is the fibrewise unit", [&] {
        WeylElement one = WeylElement::from_jet(Jet::constant(cfg.n, gr(1)), cfg.pol);
        for (const auto& x : span) {
            auto w = diff(circ_kappa(one, x, cfg.kappa, c.ginv), x);
            if (!w.empty()) return w;
            w = diff(circ_kappa(x, one, cfg.kappa, c.ginv), x);
            if (!w.empty()) return w;
        }
        return std::string();
    });
    rn.check("graded.ordering-equivalence", "the ordering transformations invert each other",
             [&] {
                 SampleGen g2(cfg.seed + 2);
                 for (int t = 0; t < 4; ++t) {
                     WeylElement a = g2.element(cfg.n, cfg.pol);
                     auto w = diff(s_kappa(s_kappa(a, cfg.kappa, c.ginv), -cfg.kappa, c.ginv), a);
                     if (!w.empty()) return w;
                 }
                 return std::string();
             });
    rn.check("graded.super-commutator", "the commutator matches its parity-graded definition",
             [&] {
                 SampleGen g2(cfg.seed + 3);
                 WeylElement a = g2.element(cfg.n, cfg.pol);
                 WeylElement b = g2.element(cfg.n, cfg.pol);
                 for (int p = 0; p <= a.max_deg_a(); ++p)
                     for (int q = 0; q <= b.max_deg_a(); ++q) {
                         WeylElement ap = a.part_deg_a(p), bq = b.part_deg_a(q);
                         if (ap.is_zero() || bq.is_zero()) continue;
                         GaussianRational sg((p * q) % 2 ? -1 : 1);
                         auto w = diff(ad_kappa(ap, bq, cfg.kappa, c.ginv),
                                       circ_kappa(ap, bq, cfg.kappa, c.ginv) -
                                           circ_kappa(bq, ap, cfg.kappa, c.ginv).scaled(sg));
                         if (!w.empty()) return w;
                     }
                 return std::string();
             });
    rn.check("graded.conjugation-involutive", "conjugation applied twice is the identity", [&] {
        for (const auto& x : span) {
            auto w = diff(weyl_conj(weyl_conj(x)), x);
            if (!w.empty()) return w;
        }
        return std::string();
    });
}

void suite_geometry(Runner& rn) {
    const SuiteConfig& cfg = rn.cfg;
    auto c = suite_chart(cfg);

    rn.check("geometry.metric-hermitian", "the Kaehler metric tensor is Hermitian", [&] {
        return c.g.is_hermitian() ? std::string() : "g is not Hermitian";
    });
    rn.check("geometry.christoffel-symmetric", "Christoffel symbols are symmetric below", [&] {
        for (int l = 0; l < cfg.n; ++l)
            for (int k = 0; k < cfg.n; ++k)
                for (int m = 0; m < cfg.n; ++m)
                    if (c.christoffel(l, k, m) != c.christoffel(l, m, k))
                        return "Gamma^" + std::to_string(l) + "_{" + std::to_string(k) + "," +
                               std::to_string(m) + "} is not symmetric";
        return std::string();
    });
    rn.check("geometry.omega-closed", "the Kaehler form is closed", [&] {
        return expect_zero(weyl_exterior_d(c.omega));
    });
    rn.check("geometry.laplacian-of-curvature", "the fibre Laplacian of R is the Ricci form",
             [&] { return diff(laplace_fib(c.symplectic_R, c.ginv), c.ricci_form); });
    rn.check("geometry.ricci-vs-canonical", "the Ricci form is i/2 times the L_can curvature",
             [&] {
                 return diff(c.ricci_form,
                             c.r_can_curv.scaled(gr(1, 2) * GaussianRational::i_unit()));
             });
    rn.check("geometry.bianchi", "the symplectic curvature is delta- and D-closed", [&] {
        auto w = expect_zero(delta_family(c.symplectic_R, DeltaOp::Delta));
        if (!w.empty()) return w;
        return expect_zero(connection_apply(c.symplectic_R, c, nullptr, Conn::D));
    });
    rn.check("geometry.ordering-shift", "reordering shifts the curvature by the Ricci form",
             [&] {
                 for (long kap : {-1L, 0L, 1L}) {
                     auto w = diff(s_kappa(c.symplectic_R, kap, c.ginv),
                                   c.symplectic_R +
                                       c.ricci_form.times_lambda(1).scaled(gr(kap)));
                     if (!w.empty()) return w;
                 }
                 return std::string();
             });
    rn.check("geometry.ricci-central", "the Ricci form commutes with everything", [&] {
        SampleGen gen(cfg.seed + 4);
        for (long kap : {-1L, 0L, 1L}) {
            auto w = expect_zero(
                ad_kappa(c.ricci_form, gen.element(cfg.n, cfg.pol), kap, c.ginv));
            if (!w.empty()) return w;
        }
        return std::string();
    });
    rn.check("geometry.d-squared", "the connection squares to the curvature commutator", [&] {
        TruncationPolicy pol2 = cfg.pol;
        pol2.total_cap = std::max(pol2.total_cap, 2 * pol2.lambda_order + 1);
        SampleGen gen(cfg.seed + 5);
        for (int t = 0; t < 3; ++t) {
            WeylElement a = gen.element(cfg.n, pol2);
            WeylElement d2 = connection_apply(connection_apply(a, c, nullptr, Conn::D), c,
                                              nullptr, Conn::D);
            auto w = diff(d2, iad(c.symplectic_R, a, cfg.kappa, c.ginv));
            if (!w.empty()) return w;
        }
        return std::string();
    });
    rn.check("geometry.bundle-compatibility", "dH = i(A^dagger H - H A) directionwise", [&] {
        auto b = bundle_from_metric(rank2_metric(cfg.n), BundleKind::Holomorphic, c);
        for (int d = 0; d < 2 * cfg.n; ++d) {
            int cd = d < cfg.n ? d + cfg.n : d - cfg.n;
            JetMat lhs = b.H.derived(d);
            JetMat rhs = (b.A[static_cast<size_t>(cd)].conj_transposed() * b.H -
                          b.H * b.A[static_cast<size_t>(d)])
                             .scaled(GaussianRational::i_unit());
            if (lhs != rhs) return "compatibility fails in direction " + std::to_string(d);
        }
        return std::string();
    });
    rn.check("geometry.dprime-squared", "the twisted connection squares to its curvature", [&] {
        TruncationPolicy pol2 = cfg.pol;
        pol2.total_cap = std::max(pol2.total_cap, 2 * pol2.lambda_order + 1);
        auto b = bundle_from_metric(rank2_metric(cfg.n), BundleKind::Holomorphic, c);
        WeylElement twisted = c.symplectic_R.with_policy(pol2).as_endo(2) -
                              b.curv.with_policy(pol2).times_lambda(1).scaled(
                                  GaussianRational::i_unit());
        SampleGen gen(cfg.seed + 6);
        WeylElement a = gen.element(cfg.n, pol2, ValueKind::Endo, 2);
        WeylElement d2 = connection_apply(connection_apply(a, c, &b, Conn::Dprime), c, &b,
                                          Conn::Dprime);
        return diff(d2, iad(twisted, a, cfg.kappa, c.ginv));
    });
}

void suite_fedosov(Runner& rn) {
    const SuiteConfig& cfg = rn.cfg;
    auto c = suite_chart(cfg);
    auto sol = solve_fedosov(c, nullptr, cfg.kappa, suite_omega(cfg, c), cfg.pol);

    rn.check("fedosov.residual", "the curvature recursion residual vanishes",
             [&] { return expect_zero(fedosov_residual(sol, false)); });
    rn.check("fedosov.normalisation", "the solution is delta^{-1}- and sigma-normalised", [&] {
        auto w = expect_zero(delta_family(sol.r, DeltaOp::DeltaInv));
        if (!w.empty()) return w;
        return expect_zero(delta_family(sol.r, DeltaOp::Sigma));
    });
    rn.check("fedosov.lowest-degree", "every term has one-form degree and total degree >= 3",
             [&] {
                 for (const auto& [k, v] : sol.r.terms()) {
                     if (deg_a(k) != 1) return "term of form degree != 1 at " + key_str(k);
                     if (total_degree(k) < 3)
                         return "term of total degree < 3 at " + key_str(k);
                 }
                 return std::string();
             });
    if (cfg.kappa != 0) {
        rn.check("fedosov.type-projections",
                 "no purely holomorphic or anti-holomorphic terms survive", [&] {
                     auto w = expect_zero(proj(sol.r, Proj::PiZ));
                     if (!w.empty()) return w;
                     return expect_zero(proj(sol.r, Proj::PiZbar));
                 });
    }
    rn.check("fedosov.derivation-squared", "the flat derivation squares to zero", [&] {
        auto check = drop_cap(cfg.pol);
        SampleGen gen(cfg.seed + 7);
        for (int t = 0; t < 3; ++t) {
            WeylElement a = gen.element(cfg.n, cfg.pol);
            auto w = expect_zero(
                fedosov_derivative(fedosov_derivative(a, sol, Conn::D), sol, Conn::D)
                    .with_policy(check));
            if (!w.empty()) return w;
        }
        return std::string();
    });
    rn.check("fedosov.taylor-kernel", "the Taylor lift is flat and sigma-normalised", [&] {
        auto check = drop_cap(cfg.pol);
        SampleGen gen(cfg.seed + 8);
        WeylElement x = WeylElement::from_jet(gen.jet(cfg.n, 3, cfg.pol.jet_order), cfg.pol) +
                        WeylElement::from_jet(gen.jet(cfg.n, 2, cfg.pol.jet_order), cfg.pol, 1);
        WeylElement t = taylor_series(x, sol, Conn::D);
        auto w = diff(delta_family(t, DeltaOp::Sigma), x);
        if (!w.empty()) return w;
        return expect_zero(fedosov_derivative(t, sol, Conn::D).with_policy(check));
    });
}

void suite_wick(Runner& rn) {
    const SuiteConfig& cfg = rn.cfg;
    auto c = suite_chart(cfg);
    auto sol = solve_fedosov(c, nullptr, cfg.kappa, suite_omega(cfg, c), cfg.pol);
    SampleGen gen(cfg.seed + 9);

    rn.check("wick.flat-oracle", "the pipeline matches the closed flat-chart product", [&] {
        auto flat = chart_from_potential(builtin_potential("flat", cfg.n, cfg.pol.jet_order + 2),
                                         cfg.n, cfg.pol);
        auto fsol = solve_fedosov(flat, nullptr, cfg.kappa,
                                  WeylElement::scalar(cfg.n, cfg.pol), cfg.pol);
        for (int t = 0; t < 5; ++t) {
            Jet f = gen.jet(cfg.n, 3, cfg.pol.jet_order);
            Jet g = gen.jet(cfg.n, 3, cfg.pol.jet_order);
            auto w = diff(star(WeylElement::from_jet(f, cfg.pol),
                               WeylElement::from_jet(g, cfg.pol), fsol),
                          oracle_flat_star(f, g, cfg.kappa, cfg.n, cfg.pol));
            if (!w.empty()) return w;
        }
        return std::string();
    });
    rn.check("wick.unit", "the constant one is the unit of the deformed product", [&] {
        WeylElement one = WeylElement::from_jet(Jet::constant(cfg.n, gr(1)), cfg.pol);
        WeylElement sf = WeylElement::from_jet(gen.jet(cfg.n, 3, cfg.pol.jet_order), cfg.pol);
        auto w = diff(star(one, sf, sol), sf);
        if (!w.empty()) return w;
        return diff(star(sf, one, sol), sf);
    });
    {
        std::vector<std::array<Jet, 3>> triples;
        for (int t = 0; t < 3; ++t)
            triples.push_back({gen.jet(cfg.n, 3, cfg.pol.jet_order),
                               gen.jet(cfg.n, 3, cfg.pol.jet_order),
                               gen.jet(cfg.n, 3, cfg.pol.jet_order)});
        auto t0 = std::chrono::steady_clock::now();
        CheckReport r = check_associativity(sol, triples);
        r.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rn.push(std::move(r));
    }
    if (cfg.kappa == 1) {
        auto t0 = std::chrono::steady_clock::now();
        CheckReport r = check_separation(sol);
        r.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rn.push(std::move(r));
    }
    rn.check("wick.first-order-commutator",
             "the commutator starts with the Poisson bracket", [&] {
                 Jet f = gen.jet(cfg.n, 3, cfg.pol.jet_order);
                 Jet g = gen.jet(cfg.n, 3, cfg.pol.jet_order);
                 WeylElement comm = star(WeylElement::from_jet(f, cfg.pol),
                                         WeylElement::from_jet(g, cfg.pol), sol) -
                                    star(WeylElement::from_jet(g, cfg.pol),
                                         WeylElement::from_jet(f, cfg.pol), sol);
                 Jet pb(cfg.n);
                 for (int k = 0; k < cfg.n; ++k)
                     for (int l = 0; l < cfg.n; ++l) {
                         Jet w = c.ginv.at(k, l);
                         pb += (w * (f.derived(k) * g.derived(cfg.n + l))).scaled(gr(2));
                         pb -= (w * (f.derived(cfg.n + l) * g.derived(k))).scaled(gr(2));
                     }
                 if (!coeff_at(comm, 0).is_zero())
                     return std::string("nonzero classical commutator: ") +
                            coeff_at(comm, 0).str();
                 if (coeff_at(comm, 1) != pb)
                     return "first-order coefficient " + coeff_at(comm, 1).str() +
                            " differs from the Poisson bracket " + pb.str();
                 return std::string();
             });
    rn.check("wick.hermitian", "conjugation reverses the product for a real series", [&] {
        if (cfg.with_omega && weyl_conj(suite_omega(cfg, c)) != suite_omega(cfg, c))
            return std::string();  // only meaningful for a real series
        Jet f = gen.jet(cfg.n, 3, cfg.pol.jet_order);
        Jet g = gen.jet(cfg.n, 3, cfg.pol.jet_order);
        return diff(weyl_conj(star(WeylElement::from_jet(f, cfg.pol),
                                   WeylElement::from_jet(g, cfg.pol), sol)),
                    star(WeylElement::from_jet(g.conjugated(), cfg.pol),
                         WeylElement::from_jet(f.conjugated(), cfg.pol), sol));
    });
}

void suite_hermitian(Runner& rn) {
    const SuiteConfig& cfg = rn.cfg;
    auto c = suite_chart(cfg);
    auto b = bundle_from_metric(rank2_metric(cfg.n), BundleKind::Holomorphic, c);
    WeylElement om = suite_omega(cfg, c);
    auto sol = solve_fedosov(c, &b, 1, om, cfg.pol);
    auto ssol = solve_fedosov(c, nullptr, 1, om, cfg.pol);
    SampleGen gen(cfg.seed + 10);
    auto section = [&] {
        std::vector<Jet> comps;
        for (int i = 0; i < 2; ++i) comps.push_back(gen.jet(cfg.n, 2, cfg.pol.jet_order));
        JetMat m(2, 1, cfg.n);
        for (int i = 0; i < 2; ++i) m.at(i, 0) = comps[static_cast<size_t>(i)];
        WeylElement e(cfg.n, ValueKind::Section, 2, cfg.pol);
        WeylKey k;
        k.sym = Multi(static_cast<size_t>(2 * cfg.n), 0);
        e.add_term(k, m);
        return e;
    };

    rn.check("hermitian.primed-residual", "the twisted recursion residual vanishes",
             [&] { return expect_zero(fedosov_residual(sol, true)); });
    rn.check("hermitian.twist-involution", "the bundle curvature element is anti-Hermitian",
             [&] { return diff(star_involution(sol.r_E, &b.H), -sol.r_E); });
    rn.check("hermitian.product-involution",
             "the involution reverses the endomorphism product", [&] {
                 JetMat Am(2, 2, cfg.n), Bm(2, 2, cfg.n);
                 for (int r = 0; r < 2; ++r)
                     for (int cc = 0; cc < 2; ++cc) {
                         Am.at(r, cc) = gen.jet(cfg.n, 2, cfg.pol.jet_order);
                         Bm.at(r, cc) = gen.jet(cfg.n, 2, cfg.pol.jet_order);
                     }
                 WeylElement sA(cfg.n, ValueKind::Endo, 2, cfg.pol);
                 WeylElement sB(cfg.n, ValueKind::Endo, 2, cfg.pol);
                 WeylKey k;
                 k.sym = Multi(static_cast<size_t>(2 * cfg.n), 0);
                 sA.add_term(k, Am);
                 sB.add_term(k, Bm);
                 return diff(star_involution(star_prime(sA, sB, sol), &b.H),
                             star_prime(star_involution(sB, &b.H), star_involution(sA, &b.H),
                                        sol));
             });
    rn.check("hermitian.conjugate-symmetry", "the deformed metric is conjugate-symmetric",
             [&] {
                 WeylElement s = section(), s2 = section();
                 return diff(metric_h(s, s2, sol), weyl_conj(metric_h(s2, s, sol)));
             });
    rn.check("hermitian.classical-limit", "the deformed metric starts at the fibre metric",
             [&] {
                 WeylElement s = section(), s2 = section();
                 WeylElement h = metric_h(s, s2, sol);
                 Jet want(cfg.n);
                 for (int i = 0; i < 2; ++i)
                     for (int j = 0; j < 2; ++j)
                         want += coeff_at(section_component(s, i), 0).conjugated() *
                                 b.H.at(i, j) * coeff_at(section_component(s2, j), 0);
                 if (coeff_at(h, 0) != want)
                     return "classical part " + coeff_at(h, 0).str() + " differs from " +
                            want.str();
                 return std::string();
             });
    rn.check("hermitian.module-compatibility",
             "right factors pull out and adjoints move across", [&] {
                 WeylElement s = section(), s2 = section();
                 WeylElement sf =
                     WeylElement::from_jet(gen.jet(cfg.n, 2, cfg.pol.jet_order), cfg.pol);
                 auto w = diff(metric_h(s, module_right(s2, sf, sol), sol),
                               star(metric_h(s, s2, sol), sf, ssol));
                 if (!w.empty()) return w;
                 JetMat Am(2, 2, cfg.n);
                 for (int r = 0; r < 2; ++r)
                     for (int cc = 0; cc < 2; ++cc)
                         Am.at(r, cc) = gen.jet(cfg.n, 2, cfg.pol.jet_order);
                 WeylElement sA(cfg.n, ValueKind::Endo, 2, cfg.pol);
                 WeylKey k;
                 k.sym = Multi(static_cast<size_t>(2 * cfg.n), 0);
                 sA.add_term(k, Am);
                 return diff(metric_h(module_left(sA, s, sol), s2, sol),
                             metric_h(s, module_left(star_involution(sA, &b.H), s2, sol), sol));
             });
}

void suite_morita(Runner& rn) {
    const SuiteConfig& cfg = rn.cfg;
    auto c = suite_chart(cfg);
    auto mb = morita_bimodule(c, suite_omega(cfg, c), cfg.pol);
    SampleGen gen(cfg.seed + 11);
    auto check = drop_cap(cfg.pol);
    auto section = [&] {
        WeylElement e(cfg.n, ValueKind::Section, 1, cfg.pol);
        WeylKey k;
        k.sym = Multi(static_cast<size_t>(2 * cfg.n), 0);
        JetMat m(1, 1, cfg.n);
        m.at(0, 0) = gen.jet(cfg.n, 2, cfg.pol.jet_order);
        e.add_term(k, m);
        return e;
    };

    rn.check("morita.derivation-squared", "the line-bundle derivation squares to zero", [&] {
        WeylElement psi = gen.element(cfg.n, cfg.pol, ValueKind::Section, 1);
        return expect_zero(
            morita_derivative(morita_derivative(psi, mb), mb).with_policy(check));
    });
    rn.check("morita.tau-kernel", "the line-bundle Taylor lift is flat and normalised", [&] {
        WeylElement s = section();
        WeylElement tl = tau_line(s, mb);
        auto w = diff(delta_family(tl, DeltaOp::Sigma), s);
        if (!w.empty()) return w;
        return expect_zero(morita_derivative(tl, mb).with_policy(check));
    });
    rn.check("morita.units", "the constant one acts as the unit on both sides", [&] {
        WeylElement one = WeylElement::from_jet(Jet::constant(cfg.n, gr(1)), cfg.pol);
        WeylElement s = section();
        auto w = diff(morita_left(one, s, mb), s);
        if (!w.empty()) return w;
        return diff(morita_right(s, one, mb), s);
    });
    rn.check("morita.module-laws", "the two-sided module laws hold", [&] {
        WeylElement s = section();
        WeylElement sf = WeylElement::from_jet(gen.jet(cfg.n, 3, cfg.pol.jet_order), cfg.pol);
        WeylElement sg = WeylElement::from_jet(gen.jet(cfg.n, 3, cfg.pol.jet_order), cfg.pol);
        auto w = diff(morita_left(star(sf, sg, mb.wick), s, mb),
                      morita_left(sf, morita_left(sg, s, mb), mb));
        if (!w.empty()) return w;
        w = diff(morita_right(s, star(sf, sg, mb.antiwick), mb),
                 morita_right(morita_right(s, sf, mb), sg, mb));
        if (!w.empty()) return w;
        return diff(morita_right(morita_left(sf, s, mb), sg, mb),
                    morita_left(sf, morita_right(s, sg, mb), mb));
    });
    rn.check("morita.classical-limit", "the module products start multiplicatively", [&] {
        WeylElement s = section();
        Jet f = gen.jet(cfg.n, 3, cfg.pol.jet_order);
        WeylElement sf = WeylElement::from_jet(f, cfg.pol);
        Jet got = coeff_at(section_component(morita_left(sf, s, mb), 0), 0);
        Jet want = (f * coeff_at(section_component(s, 0), 0)).truncated(cfg.pol.jet_order);
        if (got != want)
            return "classical part " + got.str() + " differs from " + want.str();
        return std::string();
    });
}

} // namespace

std::string format_report(const CheckReport& r) {
    std::ostringstream os;
    os << (r.pass ? "pass" : "FAIL") << " id=" << r.id << " anchor=\"" << r.anchor << "\""
       << " N=" << r.lambda_order << " cap=" << r.total_cap << " t=" << r.wall_seconds << "s";
    if (!r.pass) os << " witness=\"" << r.witness << "\"";
    return os.str();
}

std::string first_difference(const WeylElement& a, const WeylElement& b) {
    std::map<WeylKey, int> keys;
    for (const auto& [k, v] : a.terms()) keys.emplace(k, 0);
    for (const auto& [k, v] : b.terms()) keys.emplace(k, 0);
    int rows = std::max(a.value_rows(), b.value_rows());
    int cols = std::max(a.value_cols(), b.value_cols());
    int dim = std::max(a.dim(), b.dim());
    JetMat zero(rows, cols, dim);
    for (const auto& [k, unused] : keys) {
        auto ia = a.terms().find(k);
        auto ib = b.terms().find(k);
        const JetMat& va = ia == a.terms().end() ? zero : ia->second;
        const JetMat& vb = ib == b.terms().end() ? zero : ib->second;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if (va.at(r, c) != vb.at(r, c))
                    return "key " + key_str(k) + " entry (" + std::to_string(r) + "," +
                           std::to_string(c) + "): lhs=" + va.at(r, c).str() +
                           " rhs=" + vb.at(r, c).str();
    }
    return {};
}

WeylElement oracle_flat_star(const Jet& f, const Jet& g, const mpq_class& kappa, int n,
                             TruncationPolicy pol) {
    WeylElement out = WeylElement::scalar(n, pol);
    Multi alpha(static_cast<size_t>(n), 0);
    enum_multi(pol.lambda_order, alpha, 0, [&](const Multi& a) {
        Multi beta(static_cast<size_t>(n), 0);
        enum_multi(pol.lambda_order - multi_total(a), beta, 0, [&](const Multi& b) {
            int lam = multi_total(a) + multi_total(b);
            mpq_class w = 1;
            for (int t = 0; t < multi_total(a); ++t) w *= kappa + 1;
            for (int t = 0; t < multi_total(b); ++t) w *= kappa - 1;
            if (w == 0) return;
            Jet lhs = derive_multi(derive_multi(f, a, 0), b, n);
            Jet rhs = derive_multi(derive_multi(g, a, n), b, 0);
            Jet term = (lhs * rhs).scaled(
                GaussianRational(w / (multi_factorial(a) * multi_factorial(b))));
            out += WeylElement::from_jet(term, pol, lam);
        });
    });
    return out;
}

int SampleGen::ri(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

GaussianRational SampleGen::coeff() {
    return GaussianRational(mpq_class(ri(-3, 3), ri(1, 3)), mpq_class(ri(-3, 3), ri(1, 3)));
}

Jet SampleGen::jet(int n, int deg, int trusted) {
    Jet f(n, trusted);
    for (int t = 0; t < 3; ++t) {
        Multi m(static_cast<size_t>(2 * n), 0);
        int d = ri(0, deg);
        for (int i = 0; i < d; ++i) m[static_cast<size_t>(ri(0, 2 * n - 1))]++;
        f.set_coeff(m, f.coeff(m) + coeff());
    }
    return f;
}

WeylElement SampleGen::element(int n, TruncationPolicy pol, ValueKind kind, int rank) {
    WeylElement e(n, kind, rank, pol);
    for (int t = 0; t < 4; ++t) {
        WeylKey k;
        k.lambda = ri(0, 1);
        k.sym = Multi(static_cast<size_t>(2 * n), 0);
        int ds = ri(0, 2);
        for (int i = 0; i < ds; ++i) k.sym[static_cast<size_t>(ri(0, 2 * n - 1))]++;
        k.asym = static_cast<std::uint32_t>(ri(0, (1 << (2 * n)) - 1));
        JetMat v(kind == ValueKind::Scalar ? 1 : rank, kind == ValueKind::Endo ? rank : 1, n);
        for (int r = 0; r < v.rows(); ++r)
            for (int c = 0; c < v.cols(); ++c) v.at(r, c) = jet(n, 2, pol.jet_order);
        e.add_term(k, v);
    }
    return e;
}

std::vector<WeylElement> spanning_set(int n, TruncationPolicy pol, ValueKind kind, int rank,
                                      std::uint64_t seed, int max_deg_s, int extra) {
    std::vector<WeylElement> out;
    JetMat unit(kind == ValueKind::Scalar ? 1 : rank, kind == ValueKind::Endo ? rank : 1, n);
    if (kind == ValueKind::Endo)
        unit = JetMat::identity(rank, n);
    else
        for (int r = 0; r < unit.rows(); ++r) unit.at(r, 0) = Jet::constant(n, gr(1));
    Multi sym(static_cast<size_t>(2 * n), 0);
    for (int lam = 0; lam <= pol.lambda_order; ++lam) {
        int budget = std::min(max_deg_s, pol.total_cap - 2 * lam);
        if (budget < 0) continue;
        enum_multi(budget, sym, 0, [&](const Multi& m) {
            for (std::uint32_t mask = 0; mask < (1u << (2 * n)); ++mask) {
                WeylKey k;
                k.lambda = lam;
                k.sym = m;
                k.asym = mask;
                WeylElement e(n, kind, rank, pol);
                e.add_term(k, unit);
                if (!e.is_zero()) out.push_back(std::move(e));
            }
        });
    }
    SampleGen gen(seed);
    for (int t = 0; t < extra; ++t) out.push_back(gen.element(n, pol, kind, rank));
    return out;
}

CheckReport check_associativity(const FedosovSolution& sol,
                                const std::vector<std::array<Jet, 3>>& triples) {
    CheckReport r;
    r.id = "wick.associativity";
    r.anchor = "both association orders of the deformed product agree";
    r.lambda_order = sol.pol.lambda_order;
    r.total_cap = sol.pol.total_cap;
    for (const auto& [f, g, h] : triples) {
        WeylElement sf = WeylElement::from_jet(f, sol.pol);
        WeylElement sg = WeylElement::from_jet(g, sol.pol);
        WeylElement sh = WeylElement::from_jet(h, sol.pol);
        std::string w =
            first_difference(star(star(sf, sg, sol), sh, sol), star(sf, star(sg, sh, sol), sol));
        if (!w.empty()) {
            r.pass = false;
            r.witness = w;
            return r;
        }
    }
    r.pass = true;
    return r;
}

CheckReport check_separation(const FedosovSolution& sol) {
    CheckReport r;
    r.id = "wick.separation";
    r.anchor = "(anti-)holomorphic factors multiply pointwise on their side";
    r.lambda_order = sol.pol.lambda_order;
    r.total_cap = sol.pol.total_cap;
    if (sol.kappa != 1) {
        r.pass = false;
        r.witness = "error: separation of variables needs the kappa = 1 product";
        return r;
    }
    int n = sol.chart.n;
    TruncationPolicy pol = sol.pol;
    Jet z = Jet::coordinate(n, 0), zb = Jet::coordinate(n, n);
    Jet ghol = Jet::constant(n, gr(2)) + z + (z * z).scaled(gr(1, 3));
    Jet gbar = ghol.conjugated();
    SampleGen gen(5);
    Jet f = gen.jet(n, 3, pol.jet_order);
    WeylElement sf = WeylElement::from_jet(f, pol);
    std::string w = first_difference(star(sf, WeylElement::from_jet(ghol, pol), sol),
                                     WeylElement::from_jet(f * ghol, pol));
    if (w.empty())
        w = first_difference(star(WeylElement::from_jet(gbar, pol), sf, sol),
                             WeylElement::from_jet(gbar * f, pol));
    if (w.empty()) {
        // negative control: a mixed factor deforms at first order with
        // coefficient 2 g^{k lbar} d_k f d_lbar g
        Jet gmix = (z * zb).truncated(pol.jet_order);
        WeylElement prod = star(sf, WeylElement::from_jet(gmix, pol), sol);
        Jet expect(n);
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l)
                expect += (sol.chart.ginv.at(k, l) *
                           (f.derived(k) * gmix.derived(n + l)))
                              .scaled(gr(2));
        if (coeff_at(prod, 1) != expect)
            w = "mixed-factor first order " + coeff_at(prod, 1).str() +
                " differs from the contraction formula " + expect.str();
        else if (!expect.is_zero() && prod == WeylElement::from_jet(f * gmix, pol))
            w = "mixed factor multiplied pointwise although the contraction is nonzero";
    }
    r.pass = w.empty();
    r.witness = w;
    return r;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"graded",   "geometry",  "fedosov",
                                                   "wick",     "hermitian", "morita"};
    return names;
}

std::vector<CheckReport> run_suite(const std::string& name, const SuiteConfig& cfg) {
    Runner rn{cfg, {}};
    try {
        if (name == "graded")
            suite_graded(rn);
        else if (name == "geometry")
            suite_geometry(rn);
        else if (name == "fedosov")
            suite_fedosov(rn);
        else if (name == "wick")
            suite_wick(rn);
        else if (name == "hermitian")
            suite_hermitian(rn);
        else if (name == "morita")
            suite_morita(rn);
        else
            throw ConfigError("unknown suite: " + name);
    } catch (const EngineError& e) {
        if (name != "graded" && name != "geometry" && name != "fedosov" && name != "wick" &&
            name != "hermitian" && name != "morita")
            throw;
        CheckReport r;
        r.id = name + ".setup";
        r.anchor = "suite setup";
        r.pass = false;
        r.witness = std::string("error: ") + e.what();
        r.lambda_order = cfg.pol.lambda_order;
        r.total_cap = cfg.pol.total_cap;
        rn.out.push_back(std::move(r));
    }
    return rn.out;
}

} // namespace wick
