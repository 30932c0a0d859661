#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>

#include "wick/jet.hpp"

namespace wick {

// Finite truncation of the formal series: formal-parameter order N, total
// degree cap T (total degree = 2*lambda + deg_s), jet order J.
struct TruncationPolicy {
    int lambda_order = 2;
    int total_cap = 4;
    int jet_order = 6;

    static TruncationPolicy make(int lambda_order, int total_cap = -1, int jet_order = -1) {
        TruncationPolicy p;
        p.lambda_order = lambda_order;
        p.total_cap = total_cap >= 0 ? total_cap : 2 * lambda_order;
        p.jet_order = jet_order >= 0 ? jet_order : p.total_cap + 2;
        return p;
    }
    friend bool operator==(const TruncationPolicy&, const TruncationPolicy&) = default;
};

// One sparse key of the graded algebra: formal-parameter power, symmetric
// monomial exponents over the 2n generators, and an antisymmetric monomial
// as a bitmask over the same generators (canonical generator order, signs
// absorbed into the coefficients).
struct WeylKey {
    int lambda = 0;
    Multi sym;
    std::uint32_t asym = 0;

    auto operator<=>(const WeylKey&) const = default;
};

int deg_s(const WeylKey& k);
int deg_a(const WeylKey& k);
int total_degree(const WeylKey& k);

// Sign for wedging mask a (on the left) with mask b; 0 when they overlap.
int wedge_sign(std::uint32_t a, std::uint32_t b);

enum class ValueKind { Scalar, Endo, Section };

// Sparse element of the truncated formal Weyl algebra tensored with forms,
// with scalar, endomorphism-valued or section-valued jet coefficients.
class WeylElement {
public:
    WeylElement() = default;
    WeylElement(int dim, ValueKind kind, int rank, TruncationPolicy pol)
        : dim_(dim), kind_(kind), rank_(rank), pol_(pol) {}

    static WeylElement scalar(int dim, TruncationPolicy pol) {
        return WeylElement(dim, ValueKind::Scalar, 1, pol);
    }
    static WeylElement from_jet(const Jet& f, TruncationPolicy pol, int lambda_power = 0);

    int dim() const { return dim_; }
    ValueKind kind() const { return kind_; }
    int rank() const { return rank_; }
    const TruncationPolicy& policy() const { return pol_; }
    const std::map<WeylKey, JetMat>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    int value_rows() const;
    int value_cols() const;

    // Adds a term, canonically: over-cap keys are dropped, zero values erased.
    void add_term(const WeylKey& k, const JetMat& v);
    void add_term(const WeylKey& k, const Jet& f);

    WeylElement operator-() const;
    WeylElement& operator+=(const WeylElement& o);
    WeylElement& operator-=(const WeylElement& o);
    friend WeylElement operator+(WeylElement a, const WeylElement& b) { return a += b; }
    friend WeylElement operator-(WeylElement a, const WeylElement& b) { return a -= b; }

    // Re-truncates the element under a different policy.
    WeylElement with_policy(TruncationPolicy pol) const;

    // Promotes a scalar-valued element to rank x rank diagonal endomorphisms.
    WeylElement as_endo(int rank) const;

    WeylElement scaled(const GaussianRational& c) const;
    WeylElement scaled_jet(const Jet& f) const;
    WeylElement times_lambda(int p) const;
    // Divides by the formal parameter; throws NegativeLambdaPower on a
    // nonzero order-zero remnant.
    WeylElement div_lambda() const;

    // Restriction to the keys with deg_a == d (resp. a parity class).
    WeylElement part_deg_a(int d) const;
    int max_deg_a() const;

    friend bool operator==(const WeylElement& a, const WeylElement& b);
    friend bool operator!=(const WeylElement& a, const WeylElement& b) { return !(a == b); }

    std::string str() const;

private:
    int dim_ = 0;
    ValueKind kind_ = ValueKind::Scalar;
    int rank_ = 1;
    TruncationPolicy pol_;
    std::map<WeylKey, JetMat> terms_;
};

// Fibrewise undeformed super-commutative product (and its module versions).
WeylElement mu_product(const WeylElement& a, const WeylElement& b);

enum class DeltaOp {
    Delta,
    DeltaStar,
    DeltaInv,
    Sigma,
    DeltaZ,
    DeltaZbar,
    DeltaZStar,
    DeltaZbarStar,
    DeltaZInv,
    DeltaZbarInv,
};

WeylElement delta_family(const WeylElement& a, DeltaOp op);

enum class Proj { PiZ, PiZbar };

// PiZ keeps keys whose symmetric and antisymmetric parts contain no
// anti-holomorphic generator; PiZbar is the mirror.
WeylElement proj(const WeylElement& a, Proj which);

enum class Contraction { P, Pbar };

// One application of the bilinear contraction with the inverse metric:
// P removes a holomorphic symmetric generator from a and an anti-holomorphic
// one from b (mirrored for Pbar).
WeylElement contraction(const WeylElement& a, const WeylElement& b, Contraction which,
                         const JetMat& ginv);

// One application of the fibrewise Laplace operator.
WeylElement laplace_fib(const WeylElement& a, const JetMat& ginv);

// Fibrewise equivalence transformation exp(kappa * lambda * laplace).
WeylElement s_kappa(const WeylElement& a, const mpq_class& kappa, const JetMat& ginv);

// The kappa-ordered fibrewise product.
WeylElement circ_kappa(const WeylElement& a, const WeylElement& b, const mpq_class& kappa,
                        const JetMat& ginv);

// Super-commutator with respect to circ_kappa.
WeylElement ad_kappa(const WeylElement& r, const WeylElement& a, const mpq_class& kappa,
                      const JetMat& ginv);

// Complex conjugation (scalar-valued elements).
WeylElement weyl_conj(const WeylElement& a);

// Component i of a section-valued element as a scalar element, and the
// inverse assembly.
WeylElement section_component(const WeylElement& a, int i);
WeylElement section_from_components(const std::vector<WeylElement>& comps);

// Super-*-involution; endomorphism values need the fibre metric h (adjoint
// taken in the local frame).
WeylElement star_involution(const WeylElement& a, const JetMat* fibre_metric);

// Exterior derivative of the jet coefficients only (no connection terms).
WeylElement weyl_exterior_d(const WeylElement& a);

bool is_type_one_one(const WeylElement& a);

} // namespace wick
