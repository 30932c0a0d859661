#include "wick/fedosov.hpp"

#include <utility>

#include "wick/errors.hpp"

namespace wick {

namespace {

// Products followed by a division by lambda are evaluated above the cap so
// that no key that would land back under it is lost.
TruncationPolicy headroom(TruncationPolicy pol) {
    pol.total_cap += 2;
    pol.lambda_order += 1;
    return pol;
}

void check_series(const WeylElement& x, ValueKind kind, const char* what) {
    if (x.kind() != kind) throw KindMismatch(std::string(what) + ": wrong value kind");
    for (const auto& [k, v] : x.terms())
        if (deg_s(k) != 0 || deg_a(k) != 0)
            throw ConfigError(std::string(what) + ": input must be a parameter series");
}

} // namespace

WeylElement iad_over_lambda(const WeylElement& r, const WeylElement& a,
                            const mpq_class& kappa, const JetMat& ginv) {
    TruncationPolicy big = headroom(a.policy());
    return ad_kappa(r.with_policy(big), a.with_policy(big), kappa, ginv)
        .scaled(GaussianRational::i_unit())
        .div_lambda()
        .with_policy(a.policy());
}

WeylElement icirc_over_lambda(const WeylElement& a, const WeylElement& b,
                              const mpq_class& kappa, const JetMat& ginv) {
    TruncationPolicy big = headroom(a.policy());
    return circ_kappa(a.with_policy(big), b.with_policy(big), kappa, ginv)
        .scaled(GaussianRational::i_unit())
        .div_lambda()
        .with_policy(a.policy());
}

FedosovSolution solve_fedosov(const KaehlerChart& chart, const BundleChart* bundle,
                              const mpq_class& kappa, const WeylElement& Omega,
                              TruncationPolicy pol) {
    if (pol.total_cap < 3)
        throw ConfigError("total degree cap must be at least three to solve the recursion");
    if (!Omega.is_zero()) {
        if (Omega.kind() != ValueKind::Scalar || Omega.dim() != chart.n)
            throw ConfigError("the two-form series must be scalar-valued on the chart");
        for (const auto& [k, v] : Omega.terms())
            if (deg_s(k) != 0 || deg_a(k) != 2 || k.lambda < 1)
                throw ConfigError("the two-form series must be a two-form starting at first order");
        if (!weyl_exterior_d(Omega).is_zero())
            throw NonClosedOmega("the two-form series must have closed coefficients");
        if (kappa != 0 && !is_type_one_one(Omega))
            throw NonTypeOneOne("a nonzero ordering parameter requires a (1,1) two-form");
    }

    FedosovSolution sol;
    sol.chart = chart;
    if (bundle) sol.bundle = *bundle;
    sol.kappa = kappa;
    sol.pol = pol;
    sol.cache = std::make_shared<FedosovSolution::Cache>();

    // Solve above the cap, then truncate: the recursion is filtered by total
    // degree, so the extra rounds only refine keys beyond the requested cap
    // and make the derived quotient r_E exact through it.
    TruncationPolicy big = headroom(pol);
    WeylElement R = chart.symplectic_R.with_policy(big);
    WeylElement Om = Omega.with_policy(big);
    sol.Omega = Omega.with_policy(pol);

    WeylElement r = WeylElement::scalar(chart.n, big);
    for (int it = 0; it <= big.total_cap + 1; ++it) {
        WeylElement rhs = R + Om + connection_apply(r, chart, nullptr, Conn::D) +
                          icirc_over_lambda(r, r, kappa, chart.ginv);
        WeylElement rn = delta_family(rhs, DeltaOp::DeltaInv);
        if (rn == r) break;
        if (it == big.total_cap + 1)
            throw EngineError("curvature recursion did not stabilize under the cap");
        r = std::move(rn);
    }
    sol.r_big = r;
    sol.r = r.with_policy(pol);

    if (bundle) {
        int rank = bundle->rank;
        WeylElement base = R.as_endo(rank) + Om.as_endo(rank) -
                           bundle->curv.with_policy(big).times_lambda(1).scaled(
                               GaussianRational::i_unit());
        WeylElement rp(chart.n, ValueKind::Endo, rank, big);
        for (int it = 0; it <= big.total_cap + 1; ++it) {
            WeylElement rhs = base + connection_apply(rp, chart, bundle, Conn::Dprime) +
                              icirc_over_lambda(rp, rp, kappa, chart.ginv);
            WeylElement rn = delta_family(rhs, DeltaOp::DeltaInv);
            if (rn == rp) break;
            if (it == big.total_cap + 1)
                throw EngineError("bundle curvature recursion did not stabilize under the cap");
            rp = std::move(rn);
        }
        sol.r_prime_big = rp;
        sol.r_prime = rp.with_policy(pol);
        sol.r_E_big = (rp - r.as_endo(rank))
                          .scaled(GaussianRational::i_unit())
                          .div_lambda();
        sol.r_E = sol.r_E_big.with_policy(pol);
    }
    return sol;
}

WeylElement fedosov_residual(const FedosovSolution& sol, bool primed) {
    const KaehlerChart& chart = sol.chart;
    TruncationPolicy pol = sol.pol;
    WeylElement resid;
    if (!primed) {
        const WeylElement& r = sol.r;
        resid = delta_family(r, DeltaOp::Delta) - chart.symplectic_R.with_policy(pol) -
                sol.Omega - connection_apply(r, chart, nullptr, Conn::D) -
                icirc_over_lambda(r, r, sol.kappa, chart.ginv);
    } else {
        if (!sol.bundle) throw ConfigError("no bundle data in this solution");
        const BundleChart& bundle = *sol.bundle;
        const WeylElement& rp = sol.r_prime;
        resid = delta_family(rp, DeltaOp::Delta) -
                chart.symplectic_R.with_policy(pol).as_endo(bundle.rank) -
                sol.Omega.as_endo(bundle.rank) +
                bundle.curv.with_policy(pol).times_lambda(1).scaled(GaussianRational::i_unit()) -
                connection_apply(rp, chart, &bundle, Conn::Dprime) -
                icirc_over_lambda(rp, rp, sol.kappa, chart.ginv);
    }
    // The degree-d component of the equation needs r through degree d+1, so
    // the residual of the truncated solution is meaningful one step below
    // the cap.
    TruncationPolicy check = pol;
    check.total_cap -= 1;
    return resid.with_policy(check);
}

WeylElement fedosov_derivative(const WeylElement& a, const FedosovSolution& sol, Conn which) {
    const KaehlerChart& chart = sol.chart;
    const BundleChart* bundle = sol.bundle ? &*sol.bundle : nullptr;
    switch (which) {
        case Conn::D: {
            if (a.kind() != ValueKind::Scalar)
                throw KindMismatch("the scalar derivation acts on scalar-valued elements");
            return -delta_family(a, DeltaOp::Delta) +
                   connection_apply(a, chart, nullptr, Conn::D) +
                   iad_over_lambda(sol.r_big, a, sol.kappa, chart.ginv);
        }
        case Conn::Dprime: {
            if (!bundle) throw ConfigError("no bundle data in this solution");
            if (a.kind() != ValueKind::Endo)
                throw KindMismatch("the primed derivation acts on endomorphism-valued elements");
            return -delta_family(a, DeltaOp::Delta) +
                   connection_apply(a, chart, bundle, Conn::Dprime) +
                   iad_over_lambda(sol.r_prime_big, a, sol.kappa, chart.ginv);
        }
        case Conn::DE: {
            if (!bundle) throw ConfigError("no bundle data in this solution");
            if (a.kind() != ValueKind::Section)
                throw KindMismatch("the module derivation acts on section-valued elements");
            return -delta_family(a, DeltaOp::Delta) +
                   connection_apply(a, chart, bundle, Conn::DE) +
                   iad_over_lambda(sol.r_big, a, sol.kappa, chart.ginv) +
                   circ_kappa(sol.r_E_big.with_policy(a.policy()), a, sol.kappa, chart.ginv);
        }
    }
    throw ConfigError("unknown derivation selector");
}

WeylElement taylor_series(const WeylElement& x, const FedosovSolution& sol, Conn which) {
    const KaehlerChart& chart = sol.chart;
    const BundleChart* bundle = sol.bundle ? &*sol.bundle : nullptr;
    switch (which) {
        case Conn::D:
            check_series(x, ValueKind::Scalar, "Taylor lift");
            break;
        case Conn::Dprime:
            if (!bundle) throw ConfigError("no bundle data in this solution");
            check_series(x, ValueKind::Endo, "Taylor lift");
            break;
        case Conn::DE:
            if (!bundle) throw ConfigError("no bundle data in this solution");
            check_series(x, ValueKind::Section, "Taylor lift");
            break;
    }

    std::string key = std::to_string(static_cast<int>(which)) + "|" + x.str();
    {
        std::lock_guard<std::mutex> lock(sol.cache->mutex);
        auto it = sol.cache->memo.find(key);
        if (it != sol.cache->memo.end()) return it->second;
    }

    auto step = [&](const WeylElement& t) {
        WeylElement d;
        switch (which) {
            case Conn::D:
                d = connection_apply(t, chart, nullptr, Conn::D) +
                    iad_over_lambda(sol.r_big, t, sol.kappa, chart.ginv);
                break;
            case Conn::Dprime:
                d = connection_apply(t, chart, bundle, Conn::Dprime) +
                    iad_over_lambda(sol.r_prime_big, t, sol.kappa, chart.ginv);
                break;
            case Conn::DE:
                d = connection_apply(t, chart, bundle, Conn::DE) +
                    iad_over_lambda(sol.r_big, t, sol.kappa, chart.ginv) +
                    circ_kappa(sol.r_E_big.with_policy(t.policy()), t, sol.kappa, chart.ginv);
                break;
        }
        return x + delta_family(d, DeltaOp::DeltaInv);
    };

    WeylElement t = x;
    for (int it = 0; it <= sol.pol.total_cap + 1; ++it) {
        WeylElement tn = step(t);
        if (tn == t) break;
        if (it == sol.pol.total_cap + 1)
            throw EngineError("Taylor lift did not stabilize under the cap");
        t = std::move(tn);
    }

    std::lock_guard<std::mutex> lock(sol.cache->mutex);
    return sol.cache->memo.emplace(std::move(key), std::move(t)).first->second;
}

WeylElement star(const WeylElement& f, const WeylElement& g, const FedosovSolution& sol) {
    WeylElement tf = taylor_series(f, sol, Conn::D);
    WeylElement tg = taylor_series(g, sol, Conn::D);
    return delta_family(circ_kappa(tf, tg, sol.kappa, sol.chart.ginv), DeltaOp::Sigma);
}

WeylElement star_prime(const WeylElement& A, const WeylElement& B, const FedosovSolution& sol) {
    WeylElement ta = taylor_series(A, sol, Conn::Dprime);
    WeylElement tb = taylor_series(B, sol, Conn::Dprime);
    return delta_family(circ_kappa(ta, tb, sol.kappa, sol.chart.ginv), DeltaOp::Sigma);
}

WeylElement module_right(const WeylElement& s, const WeylElement& f, const FedosovSolution& sol) {
    WeylElement ts = taylor_series(s, sol, Conn::DE);
    WeylElement tf = taylor_series(f, sol, Conn::D);
    return delta_family(circ_kappa(ts, tf, sol.kappa, sol.chart.ginv), DeltaOp::Sigma);
}

WeylElement module_left(const WeylElement& A, const WeylElement& s, const FedosovSolution& sol) {
    WeylElement ta = taylor_series(A, sol, Conn::Dprime);
    WeylElement ts = taylor_series(s, sol, Conn::DE);
    return delta_family(circ_kappa(ta, ts, sol.kappa, sol.chart.ginv), DeltaOp::Sigma);
}

WeylElement pairing_H(const WeylElement& a, const WeylElement& b, const JetMat& H,
                      const KaehlerChart& chart) {
    if (a.kind() != ValueKind::Section || b.kind() != ValueKind::Section)
        throw KindMismatch("the fibre pairing takes section-valued elements");
    if (a.rank() != H.rows() || b.rank() != H.rows() || H.rows() != H.cols())
        throw ConfigError("fibre metric size does not match the section rank");
    WeylElement out = WeylElement::scalar(chart.n, a.policy());
    for (int i = 0; i < a.rank(); ++i) {
        WeylElement ai = weyl_conj(section_component(a, i));
        for (int j = 0; j < b.rank(); ++j) {
            WeylElement bj = section_component(b, j);
            out += circ_kappa(ai, bj, 1, chart.ginv).scaled_jet(H.at(i, j));
        }
    }
    return out;
}

WeylElement metric_h(const WeylElement& s, const WeylElement& s_prime,
                     const FedosovSolution& sol) {
    if (!sol.bundle) throw ConfigError("no bundle data in this solution");
    WeylElement ts = taylor_series(s, sol, Conn::DE);
    WeylElement tsp = taylor_series(s_prime, sol, Conn::DE);
    return delta_family(pairing_H(ts, tsp, sol.bundle->H, sol.chart), DeltaOp::Sigma);
}

MoritaBimodule morita_bimodule(const KaehlerChart& chart, const WeylElement& Omega,
                               TruncationPolicy pol) {
    MoritaBimodule mb;
    mb.chart = chart;
    mb.lcan = canonical_line_bundle(chart);
    mb.pol = pol;
    mb.wick = solve_fedosov(chart, nullptr, 1, Omega, pol);
    mb.antiwick = solve_fedosov(chart, nullptr, -1, Omega, pol);
    mb.cache = std::make_shared<FedosovSolution::Cache>();
    return mb;
}

WeylElement diamond(const WeylElement& a, const WeylElement& psi, const MoritaBimodule& mb) {
    return circ_kappa(s_kappa(a, -1, mb.chart.ginv), psi, 0, mb.chart.ginv);
}

WeylElement diamond_bar(const WeylElement& psi, const WeylElement& b, const MoritaBimodule& mb) {
    return circ_kappa(psi, s_kappa(b, 1, mb.chart.ginv), 0, mb.chart.ginv);
}

namespace {

// (i/lambda)(r <> psi - (-1)^{deg_a psi} psi <>' rbar); the parameter-free
// parts of the two curvature elements agree, so the combination divides.
WeylElement line_curvature_terms(const WeylElement& psi, const MoritaBimodule& mb) {
    TruncationPolicy big = headroom(psi.policy());
    WeylElement rw = mb.wick.r_big.with_policy(big);
    WeylElement ra = mb.antiwick.r_big.with_policy(big);
    WeylElement p = psi.with_policy(big);
    WeylElement sum(psi.dim(), psi.kind(), psi.rank(), big);
    for (int d = 0; d <= p.max_deg_a(); ++d) {
        WeylElement pd = p.part_deg_a(d);
        if (pd.is_zero()) continue;
        GaussianRational sg(d % 2 ? -1 : 1);
        sum += diamond(rw, pd, mb) - diamond_bar(pd, ra, mb).scaled(sg);
    }
    return sum.scaled(GaussianRational::i_unit()).div_lambda().with_policy(psi.policy());
}

WeylElement line_connection_terms(const WeylElement& psi, const MoritaBimodule& mb) {
    return connection_apply(psi, mb.chart, &mb.lcan, Conn::DE) +
           line_curvature_terms(psi, mb);
}

} // namespace

WeylElement morita_derivative(const WeylElement& psi, const MoritaBimodule& mb) {
    if (psi.kind() != ValueKind::Section || psi.rank() != 1)
        throw KindMismatch("the line-bundle derivation acts on rank-one sections");
    return -delta_family(psi, DeltaOp::Delta) + line_connection_terms(psi, mb);
}

WeylElement tau_line(const WeylElement& s, const MoritaBimodule& mb) {
    if (s.rank() != 1) throw ConfigError("line-bundle sections have rank one");
    check_series(s, ValueKind::Section, "Taylor lift");

    std::string key = "L|" + s.str();
    {
        std::lock_guard<std::mutex> lock(mb.cache->mutex);
        auto it = mb.cache->memo.find(key);
        if (it != mb.cache->memo.end()) return it->second;
    }

    WeylElement t = s;
    for (int it = 0; it <= mb.pol.total_cap + 1; ++it) {
        WeylElement tn = s + delta_family(line_connection_terms(t, mb), DeltaOp::DeltaInv);
        if (tn == t) break;
        if (it == mb.pol.total_cap + 1)
            throw EngineError("line-bundle Taylor lift did not stabilize under the cap");
        t = std::move(tn);
    }

    std::lock_guard<std::mutex> lock(mb.cache->mutex);
    return mb.cache->memo.emplace(std::move(key), std::move(t)).first->second;
}

WeylElement morita_left(const WeylElement& f, const WeylElement& s, const MoritaBimodule& mb) {
    WeylElement tf = taylor_series(f, mb.wick, Conn::D);
    WeylElement ts = tau_line(s, mb);
    return delta_family(diamond(tf, ts, mb), DeltaOp::Sigma);
}

WeylElement morita_right(const WeylElement& s, const WeylElement& g, const MoritaBimodule& mb) {
    WeylElement ts = tau_line(s, mb);
    WeylElement tg = taylor_series(g, mb.antiwick, Conn::D);
    return delta_family(diamond_bar(ts, tg, mb), DeltaOp::Sigma);
}

} // namespace wick
