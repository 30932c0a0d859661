#pragma once

#include <map>
#include <string>
#include <vector>

#include "wick/rational.hpp"

namespace wick {

// Multi-index over the 2n generators z^1..z^n, zbar^1..zbar^n.
// Entry k (k < n) is the z^{k+1} exponent, entry n+k the zbar^{k+1} exponent.
using Multi = std::vector<int>;

int multi_total(const Multi& m);

// Truncated Taylor expansion at the chart basepoint with exact
// Gaussian-rational coefficients. trusted_order is the largest total degree
// to which the stored coefficients are guaranteed correct; monomials beyond
// it are never stored.
class Jet {
public:
    // Sentinel for jets that are exact polynomials (trusted to every order).
    static constexpr int kExactOrder = 1 << 20;

    Jet() : dim_(0), trusted_(kExactOrder) {}
    explicit Jet(int dim, int trusted = kExactOrder) : dim_(dim), trusted_(trusted) {}

    static Jet constant(int dim, GaussianRational c, int trusted = kExactOrder);
    // gen in [0, 2n): the degree-one jet of that coordinate.
    static Jet coordinate(int dim, int gen, int trusted = kExactOrder);

    int dim() const { return dim_; }
    int trusted_order() const { return trusted_; }
    bool is_zero() const { return coeffs_.empty(); }

    const std::map<Multi, GaussianRational>& coeffs() const { return coeffs_; }
    GaussianRational coeff(const Multi& m) const;
    void set_coeff(const Multi& m, GaussianRational c);
    GaussianRational at_origin() const { return coeff(Multi(2 * dim_, 0)); }

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);

    Jet scaled(const GaussianRational& c) const;
    Jet derived(int gen) const;  // formal partial derivative, trusted order - 1
    Jet conjugated() const;      // swaps z and zbar indices, conjugates coefficients
    Jet inverted() const;        // requires nonzero value at the basepoint
    Jet truncated(int order) const;

    // Equality of the coefficient maps up to the common trusted order.
    friend bool operator==(const Jet& a, const Jet& b);
    friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

    std::string str() const;

private:
    int dim_;
    int trusted_;
    std::map<Multi, GaussianRational> coeffs_;

    void check_dim(const Jet& o) const;
};

// Dense matrix of jets; used for metric/Christoffel data and for
// endomorphism- and section-valued coefficients.
class JetMat {
public:
    JetMat() : rows_(0), cols_(0) {}
    JetMat(int rows, int cols, int dim, int trusted = Jet::kExactOrder)
        : rows_(rows), cols_(cols), m_(static_cast<size_t>(rows * cols), Jet(dim, trusted)) {}

    static JetMat identity(int n, int dim);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Jet& at(int r, int c) { return m_[static_cast<size_t>(r * cols_ + c)]; }
    const Jet& at(int r, int c) const { return m_[static_cast<size_t>(r * cols_ + c)]; }

    bool is_zero() const;
    int min_trusted() const;

    JetMat operator-() const;
    JetMat& operator+=(const JetMat& o);
    JetMat& operator-=(const JetMat& o);
    friend JetMat operator+(JetMat a, const JetMat& b) { return a += b; }
    friend JetMat operator-(JetMat a, const JetMat& b) { return a -= b; }
    friend JetMat operator*(const JetMat& a, const JetMat& b);

    JetMat scaled(const GaussianRational& c) const;
    JetMat scaled(const Jet& f) const;
    JetMat derived(int gen) const;
    JetMat conjugated() const;           // entrywise
    JetMat conj_transposed() const;      // Hermitian adjoint
    JetMat inverted() const;             // value at basepoint must be invertible
    Jet det() const;                     // cofactor expansion, small sizes only
    bool is_hermitian() const;

    friend bool operator==(const JetMat& a, const JetMat& b);
    friend bool operator!=(const JetMat& a, const JetMat& b) { return !(a == b); }

private:
    int rows_, cols_;
    std::vector<Jet> m_;
};

} // namespace wick
