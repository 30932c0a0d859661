#include "wick/geometry.hpp"

#include "wick/errors.hpp"

namespace wick {

namespace {

WeylKey form_key(int n, int k, int l) {
    WeylKey key;
    key.sym = Multi(static_cast<size_t>(2 * n), 0);
    key.asym = (1u << k) | (1u << (n + l));
    return key;
}

} // namespace

Jet builtin_potential(const std::string& name, int n, int jet_order) {
    Jet u(n); // sum_k z^k zbar^k
    for (int k = 0; k < n; ++k) u += Jet::coordinate(n, k) * Jet::coordinate(n, n + k);
    if (name == "flat") return u;
    if (name == "fubini_study" || name == "hyperbolic_disc") {
        bool fs = name == "fubini_study";
        // log(1+u) resp. -log(1-u), expanded through jet_order
        Jet acc(n);
        Jet pw = Jet::constant(n, GaussianRational(1));
        for (int m = 1; 2 * m <= jet_order; ++m) {
            pw = pw * u;
            GaussianRational c(mpq_class(fs && m % 2 == 0 ? -1 : 1, m));
            acc += pw.scaled(c);
        }
        return acc.truncated(jet_order);
    }
    throw ConfigError("unknown built-in potential: '" + name + "'");
}

KaehlerChart chart_from_metric(const JetMat& gin, int n, TruncationPolicy pol) {
    if (pol.jet_order < pol.total_cap + 2)
        throw ConfigError("jet order must be at least the total-degree cap plus two");
    KaehlerChart c;
    c.n = n;
    c.pol = pol;
    c.g = JetMat(n, n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) c.g.at(k, l) = gin.at(k, l).truncated(pol.jet_order);
    if (!c.g.is_hermitian()) throw NonHermitianMetric("metric jet matrix is not Hermitian");
    if (c.g.det().at_origin().is_zero())
        throw DegenerateMetric("metric degenerate at the basepoint");

    // ginv.at(k,l) = g^{k lbar}: sum_l g^{k lbar} g_{m lbar} = delta^k_m
    JetMat gt(n, n, n, pol.jet_order);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) gt.at(k, l) = c.g.at(l, k);
    c.ginv = gt.inverted();

    c.gamma.assign(static_cast<size_t>(n * n * n), Jet(n));
    for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k)
            for (int m = 0; m < n; ++m) {
                Jet s(n);
                for (int nn = 0; nn < n; ++nn) s += c.ginv.at(l, nn) * c.g.at(m, nn).derived(k);
                c.gamma[static_cast<size_t>((l * n + k) * n + m)] = s;
            }

    c.riem.assign(static_cast<size_t>(n * n * n * n), Jet(n));
    for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    c.riem[static_cast<size_t>(((j * n + m) * n + k) * n + l)] =
                        -c.christoffel(j, k, m).derived(n + l);

    GaussianRational half_i = GaussianRational(mpq_class(1, 2)) * GaussianRational::i_unit();
    c.r_can_curv = WeylElement::scalar(n, pol);
    c.ricci_form = WeylElement::scalar(n, pol);
    c.omega = WeylElement::scalar(n, pol);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            Jet t(n); // Gamma^j_{kj,lbar} = -R^j_{jk lbar}
            for (int j = 0; j < n; ++j) t -= c.riemann(j, j, k, l);
            c.r_can_curv.add_term(form_key(n, k, l), t);
            c.ricci_form.add_term(form_key(n, k, l), t.scaled(half_i));
            c.omega.add_term(form_key(n, k, l), c.g.at(k, l).scaled(half_i));
        }

    // R = -(i/2) g_{m lbar} R^m_{k i jbar} dz^k_s dzbar^l_s (x) dz^i_a ^ dzbar^j_a
    c.symplectic_R = WeylElement::scalar(n, pol);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Jet t(n);
                    for (int m = 0; m < n; ++m) t += c.g.at(m, l) * c.riemann(m, k, i, j);
                    WeylKey key = form_key(n, i, j);
                    key.sym[static_cast<size_t>(k)] += 1;
                    key.sym[static_cast<size_t>(n + l)] += 1;
                    c.symplectic_R.add_term(key, t.scaled(-half_i));
                }
    return c;
}

KaehlerChart chart_from_potential(const Jet& K, int n, TruncationPolicy pol,
                                  bool sabotage_curvature_sign) {
    if (K.trusted_order() < pol.jet_order + 2)
        throw JetOrderExhausted("potential jet too shallow for the requested truncation");
    Jet kk = K.truncated(pol.jet_order + 2);
    JetMat g(n, n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) g.at(k, l) = kk.derived(k).derived(n + l);
    KaehlerChart c = chart_from_metric(g, n, pol);
    c.potential = kk;
    if (sabotage_curvature_sign) {
        for (auto& r : c.riem) r = -r;
        c.symplectic_R = -c.symplectic_R;
    }
    return c;
}

BundleChart bundle_from_metric(const JetMat& Hin, BundleKind kind, const KaehlerChart& chart) {
    int n = chart.n;
    int rank = Hin.rows();
    if (Hin.cols() != rank) throw DimensionMismatch("fibre metric must be square");
    BundleChart b;
    b.rank = rank;
    b.kind = kind;
    b.H = JetMat(rank, rank, n);
    for (int r = 0; r < rank; ++r)
        for (int cidx = 0; cidx < rank; ++cidx)
            b.H.at(r, cidx) = Hin.at(r, cidx).truncated(chart.pol.jet_order);
    if (!b.H.is_hermitian()) throw NonHermitianMetric("fibre metric jet matrix is not Hermitian");
    JetMat hinv = b.H.inverted();

    b.A.assign(static_cast<size_t>(2 * n), JetMat(rank, rank, n));
    GaussianRational iu = GaussianRational::i_unit();
    for (int d = 0; d < n; ++d) {
        int dir = kind == BundleKind::Holomorphic ? d : n + d;
        b.A[static_cast<size_t>(dir)] = (hinv * b.H.derived(dir)).scaled(iu);
    }

    // R^E = -i dA - A^A over all direction pairs
    b.curv = WeylElement(n, ValueKind::Endo, rank, chart.pol);
    for (int p = 0; p < 2 * n; ++p)
        for (int q = p + 1; q < 2 * n; ++q) {
            JetMat ap = b.A[static_cast<size_t>(p)], aq = b.A[static_cast<size_t>(q)];
            JetMat v = (aq.derived(p) - ap.derived(q)).scaled(-iu) - (ap * aq - aq * ap);
            if (v.is_zero()) continue;
            WeylKey key;
            key.sym = Multi(static_cast<size_t>(2 * n), 0);
            key.asym = (1u << p) | (1u << q);
            b.curv.add_term(key, v);
        }
    return b;
}

BundleChart canonical_line_bundle(const KaehlerChart& chart) {
    JetMat H(1, 1, chart.n);
    H.at(0, 0) = chart.g.det().truncated(chart.pol.jet_order).inverted();
    return bundle_from_metric(H, BundleKind::Holomorphic, chart);
}

WeylElement connection_apply(const WeylElement& a, const KaehlerChart& chart,
                             const BundleChart* bundle, Conn which, ConnPart part) {
    int n = chart.n;
    if (which == Conn::D && a.kind() != ValueKind::Scalar)
        throw KindMismatch("D acts on scalar-valued elements");
    if (which == Conn::DE && (a.kind() != ValueKind::Section || bundle == nullptr))
        throw KindMismatch("D^E needs section values and a bundle");
    if (which == Conn::Dprime && (a.kind() != ValueKind::Endo || bundle == nullptr))
        throw KindMismatch("D' needs endomorphism values and a bundle");

    int lo = part == ConnPart::AntiHol ? n : 0;
    int hi = part == ConnPart::Hol ? n : 2 * n;
    WeylElement out(a.dim(), a.kind(), a.rank(), a.policy());
    GaussianRational iu = GaussianRational::i_unit();
    // accumulate every contribution per output key before handing it to the
    // element: a coefficient derivative that happens to vanish still limits
    // the trusted order of the other terms at the same key
    std::map<WeylKey, JetMat> acc;
    auto merge = [&acc](const WeylKey& k, const JetMat& v) {
        auto [it, fresh] = acc.try_emplace(k, v);
        if (!fresh) it->second += v;
    };
    for (const auto& [k, v] : a.terms()) {
        for (int d = lo; d < hi; ++d) {
            std::uint32_t bit = 1u << d;
            int sg = wedge_sign(bit, k.asym);
            if (sg == 0) continue;
            GaussianRational s(sg);
            WeylKey nk(k);
            nk.asym |= bit;
            // coefficient derivative
            merge(nk, v.derived(d).scaled(s));
            // Christoffel rotation of the symmetric generators (Kähler: the
            // dz-direction only rotates dz_s indices, mirrored for dzbar)
            bool hol_dir = d < n;
            int base = hol_dir ? 0 : n;
            int idir = hol_dir ? d : d - n;
            for (int m = 0; m < n; ++m) {
                int e = k.sym[static_cast<size_t>(base + m)];
                if (e == 0) continue;
                for (int t = 0; t < n; ++t) {
                    Jet gam = chart.christoffel(m, idir, t);
                    if (!hol_dir) gam = gam.conjugated();
                    if (gam.is_zero()) continue;
                    WeylKey rk(nk);
                    rk.sym[static_cast<size_t>(base + m)] -= 1;
                    rk.sym[static_cast<size_t>(base + t)] += 1;
                    merge(rk, v.scaled(gam.scaled(s * GaussianRational(-e))));
                }
            }
            // bundle term
            if (which != Conn::D) {
                const JetMat& ad = bundle->A[static_cast<size_t>(d)];
                if (!ad.is_zero()) {
                    JetMat w = which == Conn::DE ? ad * v : ad * v - v * ad;
                    merge(nk, w.scaled(s * -iu));
                }
            }
        }
    }
    for (const auto& [k, v] : acc) out.add_term(k, v);
    return out;
}

} // namespace wick
