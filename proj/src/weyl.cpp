#include "wick/weyl.hpp"

#include <bit>
#include <functional>
#include <sstream>

namespace wick {

int deg_s(const WeylKey& k) { return multi_total(k.sym); }
int deg_a(const WeylKey& k) { return std::popcount(k.asym); }
int total_degree(const WeylKey& k) { return 2 * k.lambda + deg_s(k); }

int wedge_sign(std::uint32_t a, std::uint32_t b) {
    if (a & b) return 0;
    int inv = 0;
    for (std::uint32_t bb = b; bb; bb &= bb - 1) {
        int i = std::countr_zero(bb);
        inv += std::popcount(a >> (i + 1));
    }
    return inv % 2 ? -1 : 1;
}

namespace {

// Sign for pulling generator g to the front of the mask (g present).
int pull_front_sign(std::uint32_t mask, int g) {
    return std::popcount(mask & ((1u << g) - 1)) % 2 ? -1 : 1;
}

ValueKind product_kind(ValueKind a, ValueKind b) {
    if (a == ValueKind::Scalar && b == ValueKind::Scalar) return ValueKind::Scalar;
    if (a == ValueKind::Scalar) return b;
    if (b == ValueKind::Scalar) {
        if (a == ValueKind::Endo || a == ValueKind::Section) return a;
    }
    if (a == ValueKind::Endo && (b == ValueKind::Endo || b == ValueKind::Section)) return b;
    throw KindMismatch("incompatible value kinds in fibrewise product");
}

JetMat value_mul(ValueKind ka, const JetMat& va, ValueKind kb, const JetMat& vb) {
    if (ka == ValueKind::Scalar && kb == ValueKind::Scalar) return va * vb;
    if (ka == ValueKind::Scalar) return vb.scaled(va.at(0, 0));
    if (kb == ValueKind::Scalar) return va.scaled(vb.at(0, 0));
    return va * vb; // endo*endo, endo*section
}

} // namespace

WeylElement WeylElement::from_jet(const Jet& f, TruncationPolicy pol, int lambda_power) {
    WeylElement e(f.dim(), ValueKind::Scalar, 1, pol);
    WeylKey k;
    k.lambda = lambda_power;
    k.sym = Multi(static_cast<size_t>(2 * f.dim()), 0);
    e.add_term(k, f);
    return e;
}

int WeylElement::value_rows() const { return kind_ == ValueKind::Scalar ? 1 : rank_; }
int WeylElement::value_cols() const { return kind_ == ValueKind::Endo ? rank_ : 1; }

void WeylElement::add_term(const WeylKey& k, const JetMat& v) {
    if (k.lambda > pol_.lambda_order || total_degree(k) > pol_.total_cap) return;
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        // a zero matrix still lowers the trusted order of an existing term,
        // but carries no information on its own
        if (!v.is_zero()) terms_.emplace(k, v);
    } else {
        it->second += v;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

void WeylElement::add_term(const WeylKey& k, const Jet& f) {
    JetMat v(1, 1, dim_);
    v.at(0, 0) = f;
    add_term(k, v);
}

WeylElement WeylElement::operator-() const {
    WeylElement r(dim_, kind_, rank_, pol_);
    for (const auto& [k, v] : terms_) r.terms_.emplace(k, -v);
    return r;
}

WeylElement& WeylElement::operator+=(const WeylElement& o) {
    if (terms_.empty() && o.dim_ != 0 && dim_ == 0) {
        *this = o;
        return *this;
    }
    if (o.terms_.empty() && o.dim_ == 0) return *this;
    if (dim_ != o.dim_) throw DimensionMismatch("graded element dimension mismatch");
    if (kind_ != o.kind_ || rank_ != o.rank_) throw KindMismatch("adding elements of different kinds");
    for (const auto& [k, v] : o.terms_) add_term(k, v);
    return *this;
}

WeylElement& WeylElement::operator-=(const WeylElement& o) { return *this += -o; }

WeylElement WeylElement::with_policy(TruncationPolicy pol) const {
    WeylElement r(dim_, kind_, rank_, pol);
    for (const auto& [k, v] : terms_) r.add_term(k, v);
    return r;
}

WeylElement WeylElement::as_endo(int rank) const {
    if (kind_ == ValueKind::Endo && rank_ == rank) return *this;
    if (kind_ != ValueKind::Scalar) throw KindMismatch("only scalar elements promote to endomorphisms");
    WeylElement r(dim_, ValueKind::Endo, rank, pol_);
    for (const auto& [k, v] : terms_)
        r.add_term(k, JetMat::identity(rank, dim_).scaled(v.at(0, 0)));
    return r;
}

WeylElement WeylElement::scaled(const GaussianRational& c) const {
    WeylElement r(dim_, kind_, rank_, pol_);
    if (c.is_zero()) return r;
    for (const auto& [k, v] : terms_) {
        JetMat w = v.scaled(c);
        if (!w.is_zero()) r.terms_.emplace(k, std::move(w));
    }
    return r;
}

WeylElement WeylElement::scaled_jet(const Jet& f) const {
    WeylElement r(dim_, kind_, rank_, pol_);
    for (const auto& [k, v] : terms_) r.add_term(k, v.scaled(f));
    return r;
}

WeylElement WeylElement::times_lambda(int p) const {
    WeylElement r(dim_, kind_, rank_, pol_);
    for (const auto& [k, v] : terms_) {
        WeylKey kk(k);
        kk.lambda += p;
        r.add_term(kk, v);
    }
    return r;
}

WeylElement WeylElement::div_lambda() const {
    WeylElement r(dim_, kind_, rank_, pol_);
    for (const auto& [k, v] : terms_) {
        if (k.lambda == 0)
            throw NegativeLambdaPower("formal-parameter division hit an order-zero term");
        WeylKey kk(k);
        kk.lambda -= 1;
        r.add_term(kk, v);
    }
    return r;
}

WeylElement WeylElement::part_deg_a(int d) const {
    WeylElement r(dim_, kind_, rank_, pol_);
    for (const auto& [k, v] : terms_)
        if (deg_a(k) == d) r.terms_.emplace(k, v);
    return r;
}

int WeylElement::max_deg_a() const {
    int m = 0;
    for (const auto& [k, v] : terms_) m = std::max(m, deg_a(k));
    return m;
}

bool operator==(const WeylElement& a, const WeylElement& b) {
    WeylElement d = a;
    d -= b;
    return d.is_zero();
}

std::string WeylElement::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    for (const auto& [k, v] : terms_) {
        os << "L^" << k.lambda << " sym[";
        for (size_t i = 0; i < k.sym.size(); ++i) os << (i ? "," : "") << k.sym[i];
        os << "] asym[";
        bool first = true;
        for (int g = 0; g < 2 * dim_; ++g)
            if (k.asym & (1u << g)) {
                if (!first) os << "^";
                first = false;
                os << (g < dim_ ? "dz" : "dzbar") << (g < dim_ ? g + 1 : g - dim_ + 1);
            }
        os << "] : ";
        if (kind_ == ValueKind::Scalar) {
            os << v.at(0, 0).str();
        } else {
            os << "[";
            for (int i = 0; i < v.rows(); ++i)
                for (int j = 0; j < v.cols(); ++j)
                    os << v.at(i, j).str() << ((i == v.rows() - 1 && j == v.cols() - 1) ? "" : "; ");
            os << "]";
        }
        os << "\n";
    }
    return os.str();
}

WeylElement mu_product(const WeylElement& a, const WeylElement& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("fibrewise product dimension mismatch");
    ValueKind rk = product_kind(a.kind(), b.kind());
    int rank = std::max(a.rank(), b.rank());
    WeylElement r(a.dim(), rk, rank, a.policy());
    for (const auto& [ka, va] : a.terms()) {
        for (const auto& [kb, vb] : b.terms()) {
            int sg = wedge_sign(ka.asym, kb.asym);
            if (sg == 0) continue;
            WeylKey k;
            k.lambda = ka.lambda + kb.lambda;
            if (k.lambda > r.policy().lambda_order) continue;
            k.sym = ka.sym;
            for (size_t i = 0; i < k.sym.size(); ++i) k.sym[i] += kb.sym[i];
            k.asym = ka.asym | kb.asym;
            if (total_degree(k) > r.policy().total_cap) continue;
            JetMat v = value_mul(a.kind(), va, b.kind(), vb);
            if (sg < 0) v = -v;
            r.add_term(k, v);
        }
    }
    return r;
}

namespace {

// Formal derivative with respect to a symmetric generator.
WeylElement sym_derive(const WeylElement& a, int gen) {
    WeylElement r(a.dim(), a.kind(), a.rank(), a.policy());
    for (const auto& [k, v] : a.terms()) {
        int e = k.sym[static_cast<size_t>(gen)];
        if (e == 0) continue;
        WeylKey kk(k);
        kk.sym[static_cast<size_t>(gen)] = e - 1;
        r.add_term(kk, v.scaled(GaussianRational(e)));
    }
    return r;
}

} // namespace

WeylElement delta_family(const WeylElement& a, DeltaOp op) {
    int n = a.dim();
    WeylElement r(n, a.kind(), a.rank(), a.policy());
    auto lower = [&](const WeylElement& x, int g0, int g1, WeylElement& out) {
        for (const auto& [k, v] : x.terms()) {
            for (int g = g0; g < g1; ++g) {
                int e = k.sym[static_cast<size_t>(g)];
                if (e == 0) continue;
                std::uint32_t bit = 1u << g;
                int sg = wedge_sign(bit, k.asym);
                if (sg == 0) continue;
                WeylKey kk(k);
                kk.sym[static_cast<size_t>(g)] = e - 1;
                kk.asym |= bit;
                out.add_term(kk, v.scaled(GaussianRational(sg * e)));
            }
        }
    };
    auto raise = [&](const WeylKey& k, const JetMat& v, int g0, int g1, const GaussianRational& c,
                     WeylElement& out) {
        for (int g = g0; g < g1; ++g) {
            std::uint32_t bit = 1u << g;
            if (!(k.asym & bit)) continue;
            int sg = pull_front_sign(k.asym, g);
            WeylKey kk(k);
            kk.asym &= ~bit;
            kk.sym[static_cast<size_t>(g)] += 1;
            out.add_term(kk, v.scaled(c * GaussianRational(sg)));
        }
    };
    auto hol_count = [&](const WeylKey& k) {
        int c = 0;
        for (int g = 0; g < n; ++g) c += k.sym[static_cast<size_t>(g)] + ((k.asym >> g) & 1);
        return c;
    };
    auto antihol_count = [&](const WeylKey& k) {
        int c = 0;
        for (int g = n; g < 2 * n; ++g) c += k.sym[static_cast<size_t>(g)] + ((k.asym >> g) & 1);
        return c;
    };

    switch (op) {
    case DeltaOp::Delta:
        lower(a, 0, 2 * n, r);
        break;
    case DeltaOp::DeltaZ:
        lower(a, 0, n, r);
        break;
    case DeltaOp::DeltaZbar:
        lower(a, n, 2 * n, r);
        break;
    case DeltaOp::DeltaStar:
        for (const auto& [k, v] : a.terms()) raise(k, v, 0, 2 * n, GaussianRational(1), r);
        break;
    case DeltaOp::DeltaZStar:
        for (const auto& [k, v] : a.terms()) raise(k, v, 0, n, GaussianRational(1), r);
        break;
    case DeltaOp::DeltaZbarStar:
        for (const auto& [k, v] : a.terms()) raise(k, v, n, 2 * n, GaussianRational(1), r);
        break;
    case DeltaOp::DeltaInv:
        for (const auto& [k, v] : a.terms()) {
            int norm = deg_s(k) + deg_a(k);
            if (norm == 0) continue;
            raise(k, v, 0, 2 * n, GaussianRational(mpq_class(1, norm)), r);
        }
        break;
    case DeltaOp::DeltaZInv:
        for (const auto& [k, v] : a.terms()) {
            int norm = hol_count(k);
            if (norm == 0) continue;
            raise(k, v, 0, n, GaussianRational(mpq_class(1, norm)), r);
        }
        break;
    case DeltaOp::DeltaZbarInv:
        for (const auto& [k, v] : a.terms()) {
            int norm = antihol_count(k);
            if (norm == 0) continue;
            raise(k, v, n, 2 * n, GaussianRational(mpq_class(1, norm)), r);
        }
        break;
    case DeltaOp::Sigma:
        for (const auto& [k, v] : a.terms())
            if (deg_s(k) == 0 && deg_a(k) == 0) r.add_term(k, v);
        break;
    }
    return r;
}

WeylElement proj(const WeylElement& a, Proj which) {
    int n = a.dim();
    WeylElement r(n, a.kind(), a.rank(), a.policy());
    std::uint32_t anti_mask = ((1u << n) - 1u) << n;
    std::uint32_t hol_mask = (1u << n) - 1u;
    for (const auto& [k, v] : a.terms()) {
        bool keep = true;
        if (which == Proj::PiZ) {
            if (k.asym & anti_mask) keep = false;
            for (int g = n; keep && g < 2 * n; ++g)
                if (k.sym[static_cast<size_t>(g)]) keep = false;
        } else {
            if (k.asym & hol_mask) keep = false;
            for (int g = 0; keep && g < n; ++g)
                if (k.sym[static_cast<size_t>(g)]) keep = false;
        }
        if (keep) r.add_term(k, v);
    }
    return r;
}

WeylElement contraction(const WeylElement& a, const WeylElement& b, Contraction which,
                         const JetMat& ginv) {
    int n = a.dim();
    WeylElement acc(n, product_kind(a.kind(), b.kind()), std::max(a.rank(), b.rank()), a.policy());
    for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
            WeylElement da = which == Contraction::P ? sym_derive(a, k) : sym_derive(a, n + l);
            if (da.is_zero()) continue;
            WeylElement db = which == Contraction::P ? sym_derive(b, n + l) : sym_derive(b, k);
            if (db.is_zero()) continue;
            acc += mu_product(da.scaled_jet(ginv.at(k, l)), db);
        }
    }
    return acc;
}

WeylElement laplace_fib(const WeylElement& a, const JetMat& ginv) {
    int n = a.dim();
    WeylElement acc(n, a.kind(), a.rank(), a.policy());
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            WeylElement d = sym_derive(sym_derive(a, k), n + l);
            if (d.is_zero()) continue;
            acc += d.scaled_jet(ginv.at(k, l));
        }
    return acc;
}

WeylElement s_kappa(const WeylElement& a, const mpq_class& kappa, const JetMat& ginv) {
    // exp(kappa * lambda * Delta_fib), finite on truncated elements
    WeylElement acc = a;
    if (kappa == 0) return acc;
    WeylElement pw = a;
    mpq_class fact = 1;
    mpq_class kp = 1;
    for (int m = 1; !pw.is_zero(); ++m) {
        pw = laplace_fib(pw, ginv).times_lambda(1);
        if (pw.is_zero()) break;
        fact *= m;
        kp *= kappa;
        acc += pw.scaled(GaussianRational(kp / fact));
    }
    return acc;
}

namespace {

// Enumerates n x n contraction-count matrices with the given row/column
// capacity bounds, invoking fn on each (including the zero matrix).
void enumerate_matrices(int n, const std::vector<int>& row_cap, const std::vector<int>& col_cap,
                        std::vector<int>& m, size_t pos, std::vector<int>& row_used,
                        std::vector<int>& col_used, const std::function<void(const std::vector<int>&)>& fn) {
    if (pos == m.size()) {
        fn(m);
        return;
    }
    int r = static_cast<int>(pos) / n;
    int c = static_cast<int>(pos) % n;
    int cap = std::min(row_cap[static_cast<size_t>(r)] - row_used[static_cast<size_t>(r)],
                       col_cap[static_cast<size_t>(c)] - col_used[static_cast<size_t>(c)]);
    for (int v = 0; v <= cap; ++v) {
        m[pos] = v;
        row_used[static_cast<size_t>(r)] += v;
        col_used[static_cast<size_t>(c)] += v;
        enumerate_matrices(n, row_cap, col_cap, m, pos + 1, row_used, col_used, fn);
        row_used[static_cast<size_t>(r)] -= v;
        col_used[static_cast<size_t>(c)] -= v;
    }
    m[pos] = 0;
}

mpz_class factorial(int k) {
    mpz_class f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace

WeylElement circ_kappa(const WeylElement& a, const WeylElement& b, const mpq_class& kappa,
                        const JetMat& ginv) {
    if (a.dim() != b.dim()) throw DimensionMismatch("kappa-product dimension mismatch");
    int n = a.dim();
    const TruncationPolicy& pol = a.policy();
    ValueKind rk = product_kind(a.kind(), b.kind());
    int rank = std::max(a.rank(), b.rank());
    WeylElement r(n, rk, rank, pol);

    mpq_class wp = kappa + 1; // weight of P per contraction (times lambda)
    mpq_class wq = kappa - 1; // weight of Pbar per contraction (times lambda)

    for (const auto& [ka, va] : a.terms()) {
        std::vector<int> hol_a(static_cast<size_t>(n)), anti_a(static_cast<size_t>(n));
        for (int g = 0; g < n; ++g) {
            hol_a[static_cast<size_t>(g)] = ka.sym[static_cast<size_t>(g)];
            anti_a[static_cast<size_t>(g)] = ka.sym[static_cast<size_t>(n + g)];
        }
        for (const auto& [kb, vb] : b.terms()) {
            int base_sign = wedge_sign(ka.asym, kb.asym);
            if (base_sign == 0) continue;
            std::vector<int> hol_b(static_cast<size_t>(n)), anti_b(static_cast<size_t>(n));
            for (int g = 0; g < n; ++g) {
                hol_b[static_cast<size_t>(g)] = kb.sym[static_cast<size_t>(g)];
                anti_b[static_cast<size_t>(g)] = kb.sym[static_cast<size_t>(n + g)];
            }
            std::vector<int> zero(static_cast<size_t>(n), 0);
            // m[k*n+l]: P contractions pairing dz^k on a with dzbar^l on b.
            std::vector<int> m(static_cast<size_t>(n * n), 0), ru(static_cast<size_t>(n)),
                cu(static_cast<size_t>(n));
            std::vector<int> row_cap_p = wp == 0 ? zero : hol_a;
            std::vector<int> col_cap_p = wp == 0 ? zero : anti_b;
            enumerate_matrices(n, row_cap_p, col_cap_p, m, 0, ru, cu, [&](const std::vector<int>& mp) {
                int p = 0;
                for (int v : mp) p += v;
                // mbar[k*n+l]: Pbar contractions pairing dzbar^l on a with dz^k on b.
                std::vector<int> rowb(static_cast<size_t>(n)), colb(static_cast<size_t>(n));
                for (int g = 0; g < n; ++g) {
                    int used_anti_b = 0, used_hol_a = 0;
                    for (int k2 = 0; k2 < n; ++k2) {
                        used_anti_b += mp[static_cast<size_t>(k2 * n + g)];
                        used_hol_a += mp[static_cast<size_t>(g * n + k2)];
                    }
                    (void)used_anti_b;
                    (void)used_hol_a;
                    rowb[static_cast<size_t>(g)] = wq == 0 ? 0 : hol_b[static_cast<size_t>(g)];
                    colb[static_cast<size_t>(g)] = wq == 0 ? 0 : anti_a[static_cast<size_t>(g)];
                }
                std::vector<int> mb(static_cast<size_t>(n * n), 0), ru2(static_cast<size_t>(n)),
                    cu2(static_cast<size_t>(n));
                enumerate_matrices(n, rowb, colb, mb, 0, ru2, cu2, [&](const std::vector<int>& mq) {
                    int q = 0;
                    for (int v : mq) q += v;
                    WeylKey k;
                    k.lambda = ka.lambda + kb.lambda + p + q;
                    if (k.lambda > pol.lambda_order) return;
                    k.sym = Multi(static_cast<size_t>(2 * n), 0);
                    mpz_class denom = 1;
                    bool ok = true;
                    // remaining symmetric exponents and derivative factors
                    mpz_class numer = 1;
                    for (int g = 0; g < n && ok; ++g) {
                        int dza = 0, dzbara = 0, dzb = 0, dzbarb = 0;
                        for (int h = 0; h < n; ++h) {
                            dza += mp[static_cast<size_t>(g * n + h)];      // dz^g removed from a
                            dzbarb += mp[static_cast<size_t>(h * n + g)];   // dzbar^g removed from b
                            dzbara += mq[static_cast<size_t>(h * n + g)];   // dzbar^g removed from a
                            dzb += mq[static_cast<size_t>(g * n + h)];      // dz^g removed from b
                        }
                        if (dza > hol_a[static_cast<size_t>(g)] || dzbara > anti_a[static_cast<size_t>(g)] ||
                            dzb > hol_b[static_cast<size_t>(g)] || dzbarb > anti_b[static_cast<size_t>(g)]) {
                            ok = false;
                            break;
                        }
                        k.sym[static_cast<size_t>(g)] =
                            hol_a[static_cast<size_t>(g)] - dza + hol_b[static_cast<size_t>(g)] - dzb;
                        k.sym[static_cast<size_t>(n + g)] = anti_a[static_cast<size_t>(g)] - dzbara +
                                                             anti_b[static_cast<size_t>(g)] - dzbarb;
                        // falling factorials from the formal derivatives
                        for (int t = 0; t < dza; ++t) numer *= hol_a[static_cast<size_t>(g)] - t;
                        for (int t = 0; t < dzbara; ++t) numer *= anti_a[static_cast<size_t>(g)] - t;
                        for (int t = 0; t < dzb; ++t) numer *= hol_b[static_cast<size_t>(g)] - t;
                        for (int t = 0; t < dzbarb; ++t) numer *= anti_b[static_cast<size_t>(g)] - t;
                    }
                    if (!ok) return;
                    k.asym = ka.asym | kb.asym;
                    if (total_degree(k) > pol.total_cap) return;
                    for (size_t i = 0; i < mp.size(); ++i) {
                        denom *= factorial(mp[i]);
                        denom *= factorial(mq[i]);
                    }
                    mpq_class weight(numer, denom);
                    weight.canonicalize();
                    for (int t = 0; t < p; ++t) weight *= wp;
                    for (int t = 0; t < q; ++t) weight *= wq;
                    if (weight == 0) return;
                    // product of inverse-metric jets
                    Jet gprod = Jet::constant(n, GaussianRational(1));
                    for (int kk = 0; kk < n; ++kk)
                        for (int ll = 0; ll < n; ++ll) {
                            int e = mp[static_cast<size_t>(kk * n + ll)] + mq[static_cast<size_t>(kk * n + ll)];
                            for (int t = 0; t < e; ++t) gprod = gprod * ginv.at(kk, ll);
                        }
                    JetMat v = value_mul(a.kind(), va, b.kind(), vb);
                    v = v.scaled(gprod).scaled(GaussianRational(weight * base_sign));
                    r.add_term(k, v);
                });
            });
        }
    }
    return r;
}

WeylElement ad_kappa(const WeylElement& r, const WeylElement& a, const mpq_class& kappa,
                      const JetMat& ginv) {
    // super-commutator: split both operands by antisymmetric parity
    WeylElement out = circ_kappa(r, a, kappa, ginv);
    int da_max = a.max_deg_a();
    int dr_max = r.max_deg_a();
    for (int da = 0; da <= da_max; ++da) {
        WeylElement ap = a.part_deg_a(da);
        if (ap.is_zero()) continue;
        for (int dr = 0; dr <= dr_max; ++dr) {
            WeylElement rp = r.part_deg_a(dr);
            if (rp.is_zero()) continue;
            WeylElement t = circ_kappa(ap, rp, kappa, ginv);
            out += ((da % 2) && (dr % 2)) ? t : -t;
        }
    }
    return out;
}

WeylElement weyl_conj(const WeylElement& a) {
    if (a.kind() != ValueKind::Scalar)
        throw KindMismatch("complex conjugation defined on scalar-valued elements");
    int n = a.dim();
    WeylElement r(n, a.kind(), a.rank(), a.policy());
    for (const auto& [k, v] : a.terms()) {
        WeylKey kk;
        kk.lambda = k.lambda;
        kk.sym = Multi(static_cast<size_t>(2 * n), 0);
        for (int g = 0; g < n; ++g) {
            kk.sym[static_cast<size_t>(g)] = k.sym[static_cast<size_t>(n + g)];
            kk.sym[static_cast<size_t>(n + g)] = k.sym[static_cast<size_t>(g)];
        }
        std::uint32_t hol = k.asym & ((1u << n) - 1u);
        std::uint32_t anti = (k.asym >> n) & ((1u << n) - 1u);
        kk.asym = (hol << n) | anti;
        int h = std::popcount(hol), ah = std::popcount(anti);
        int sg = (h * ah) % 2 ? -1 : 1;
        r.add_term(kk, v.conjugated().scaled(GaussianRational(sg)));
    }
    return r;
}

WeylElement section_component(const WeylElement& a, int i) {
    if (a.kind() != ValueKind::Section)
        throw KindMismatch("component extraction defined on section-valued elements");
    if (i < 0 || i >= a.rank()) throw ConfigError("section component index out of range");
    WeylElement r = WeylElement::scalar(a.dim(), a.policy());
    for (const auto& [k, v] : a.terms()) r.add_term(k, v.at(i, 0));
    return r;
}

WeylElement section_from_components(const std::vector<WeylElement>& comps) {
    if (comps.empty()) throw ConfigError("section assembly needs at least one component");
    int rank = static_cast<int>(comps.size());
    int n = comps[0].dim();
    WeylElement r(n, ValueKind::Section, rank, comps[0].policy());
    for (int i = 0; i < rank; ++i) {
        const WeylElement& c = comps[static_cast<size_t>(i)];
        if (c.kind() != ValueKind::Scalar)
            throw KindMismatch("section assembly takes scalar-valued components");
        if (c.dim() != n || !(c.policy() == comps[0].policy()))
            throw ConfigError("section components disagree on dimension or policy");
        for (const auto& [k, v] : c.terms()) {
            JetMat m(rank, 1, n);
            m.at(i, 0) = v.at(0, 0);
            r.add_term(k, m);
        }
    }
    return r;
}

WeylElement star_involution(const WeylElement& a, const JetMat* fibre_metric) {
    if (a.kind() == ValueKind::Scalar) return weyl_conj(a);
    if (a.kind() == ValueKind::Section)
        throw KindMismatch("star involution undefined for section values");
    if (fibre_metric == nullptr)
        throw ConfigError("star involution on endomorphism values requires a fibre metric");
    int n = a.dim();
    JetMat hinv = fibre_metric->inverted();
    WeylElement r(n, a.kind(), a.rank(), a.policy());
    for (const auto& [k, v] : a.terms()) {
        WeylKey kk;
        kk.lambda = k.lambda;
        kk.sym = Multi(static_cast<size_t>(2 * n), 0);
        for (int g = 0; g < n; ++g) {
            kk.sym[static_cast<size_t>(g)] = k.sym[static_cast<size_t>(n + g)];
            kk.sym[static_cast<size_t>(n + g)] = k.sym[static_cast<size_t>(g)];
        }
        std::uint32_t hol = k.asym & ((1u << n) - 1u);
        std::uint32_t anti = (k.asym >> n) & ((1u << n) - 1u);
        kk.asym = (hol << n) | anti;
        int h = std::popcount(hol), ah = std::popcount(anti);
        int sg = (h * ah) % 2 ? -1 : 1;
        JetMat w = hinv * v.conj_transposed() * (*fibre_metric);
        r.add_term(kk, w.scaled(GaussianRational(sg)));
    }
    return r;
}

WeylElement weyl_exterior_d(const WeylElement& a) {
    int n = a.dim();
    WeylElement r(n, a.kind(), a.rank(), a.policy());
    for (const auto& [k, v] : a.terms()) {
        for (int g = 0; g < 2 * n; ++g) {
            std::uint32_t bit = 1u << g;
            int sg = wedge_sign(bit, k.asym);
            if (sg == 0) continue;
            JetMat dv = v.derived(g);
            if (dv.is_zero()) continue;
            WeylKey kk(k);
            kk.asym |= bit;
            r.add_term(kk, dv.scaled(GaussianRational(sg)));
        }
    }
    return r;
}

bool is_type_one_one(const WeylElement& a) {
    int n = a.dim();
    std::uint32_t hol_mask = (1u << n) - 1u;
    for (const auto& [k, v] : a.terms()) {
        if (deg_a(k) != 2) return false;
        if (std::popcount(k.asym & hol_mask) != 1) return false;
    }
    return true;
}

} // namespace wick
