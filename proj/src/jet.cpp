#include "wick/jet.hpp"

#include <algorithm>
#include <sstream>

namespace wick {

int multi_total(const Multi& m) {
    int t = 0;
    for (int e : m) t += e;
    return t;
}

Jet Jet::constant(int dim, GaussianRational c, int trusted) {
    Jet j(dim, trusted);
    if (!c.is_zero()) j.coeffs_.emplace(Multi(2 * dim, 0), std::move(c));
    return j;
}

Jet Jet::coordinate(int dim, int gen, int trusted) {
    Jet j(dim, trusted);
    Multi m(2 * dim, 0);
    m[static_cast<size_t>(gen)] = 1;
    j.coeffs_.emplace(std::move(m), GaussianRational(1));
    return j;
}

GaussianRational Jet::coeff(const Multi& m) const {
    auto it = coeffs_.find(m);
    return it == coeffs_.end() ? GaussianRational() : it->second;
}

void Jet::set_coeff(const Multi& m, GaussianRational c) {
    if (multi_total(m) > trusted_) return;
    if (c.is_zero())
        coeffs_.erase(m);
    else
        coeffs_[m] = std::move(c);
}

void Jet::check_dim(const Jet& o) const {
    if (dim_ != o.dim_)
        throw DimensionMismatch("jet dimension mismatch: " + std::to_string(dim_) + " vs " +
                                std::to_string(o.dim_));
}

Jet Jet::operator-() const {
    Jet r(dim_, trusted_);
    for (const auto& [m, c] : coeffs_) r.coeffs_.emplace(m, -c);
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    check_dim(o);
    trusted_ = std::min(trusted_, o.trusted_);
    for (const auto& [m, c] : o.coeffs_) {
        auto it = coeffs_.find(m);
        if (it == coeffs_.end()) {
            coeffs_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) coeffs_.erase(it);
        }
    }
    // drop coefficients beyond the (possibly lowered) trusted order
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (multi_total(it->first) > trusted_)
            it = coeffs_.erase(it);
        else
            ++it;
    }
    return *this;
}

Jet& Jet::operator-=(const Jet& o) { return *this += -o; }

Jet operator*(const Jet& a, const Jet& b) {
    a.check_dim(b);
    Jet r(a.dim_, std::min(a.trusted_, b.trusted_));
    for (const auto& [ma, ca] : a.coeffs_) {
        int ta = multi_total(ma);
        if (ta > r.trusted_) continue;
        for (const auto& [mb, cb] : b.coeffs_) {
            if (ta + multi_total(mb) > r.trusted_) continue;
            Multi m(ma);
            for (size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
            GaussianRational c = ca * cb;
            if (c.is_zero()) continue;
            auto it = r.coeffs_.find(m);
            if (it == r.coeffs_.end()) {
                r.coeffs_.emplace(std::move(m), std::move(c));
            } else {
                it->second += c;
                if (it->second.is_zero()) r.coeffs_.erase(it);
            }
        }
    }
    return r;
}

Jet Jet::scaled(const GaussianRational& c) const {
    Jet r(dim_, trusted_);
    if (c.is_zero()) return r;
    for (const auto& [m, v] : coeffs_) {
        GaussianRational w = v * c;
        if (!w.is_zero()) r.coeffs_.emplace(m, std::move(w));
    }
    return r;
}

Jet Jet::derived(int gen) const {
    if (trusted_ < 1) throw JetOrderExhausted("derivative on a jet with exhausted trusted order");
    Jet r(dim_, trusted_ == kExactOrder ? kExactOrder : trusted_ - 1);
    for (const auto& [m, c] : coeffs_) {
        int e = m[static_cast<size_t>(gen)];
        if (e == 0) continue;
        Multi mm(m);
        mm[static_cast<size_t>(gen)] = e - 1;
        if (multi_total(mm) > r.trusted_) continue;
        r.coeffs_.emplace(std::move(mm), c * GaussianRational(e));
    }
    return r;
}

Jet Jet::conjugated() const {
    Jet r(dim_, trusted_);
    for (const auto& [m, c] : coeffs_) {
        Multi mm(m);
        for (int k = 0; k < dim_; ++k) std::swap(mm[static_cast<size_t>(k)], mm[static_cast<size_t>(dim_ + k)]);
        r.coeffs_.emplace(std::move(mm), c.conj());
    }
    return r;
}

Jet Jet::inverted() const {
    GaussianRational c0 = at_origin();
    if (c0.is_zero()) throw NotInvertible("jet has zero constant term");
    // a = c0 (1 + u) with u vanishing at the basepoint; invert by the
    // geometric series, which terminates at the trusted order.
    GaussianRational c0inv = GaussianRational(1) / c0;
    Jet u = scaled(c0inv);
    u.set_coeff(Multi(2 * dim_, 0), GaussianRational());
    if (trusted_ == kExactOrder && !u.is_zero())
        throw ConfigError("inverting a non-constant exact jet; truncate to a finite order first");
    int steps = u.is_zero() ? 0 : trusted_;
    Jet acc = Jet::constant(dim_, GaussianRational(1), trusted_);
    Jet pw = Jet::constant(dim_, GaussianRational(1), trusted_);
    for (int k = 1; k <= steps; ++k) {
        pw = pw * u;
        if (pw.is_zero()) break;
        acc += (k % 2 == 1) ? -pw : pw;
    }
    return acc.scaled(c0inv);
}

Jet Jet::truncated(int order) const {
    Jet r(dim_, std::min(trusted_, order));
    for (const auto& [m, c] : coeffs_)
        if (multi_total(m) <= r.trusted_) r.coeffs_.emplace(m, c);
    return r;
}

bool operator==(const Jet& a, const Jet& b) {
    if (a.dim_ != b.dim_) return false;
    int ord = std::min(a.trusted_, b.trusted_);
    return a.truncated(ord).coeffs_ == b.truncated(ord).coeffs_;
}

std::string Jet::str() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : coeffs_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.str() << ")";
        for (int k = 0; k < 2 * dim_; ++k) {
            int e = m[static_cast<size_t>(k)];
            if (e == 0) continue;
            os << (k < dim_ ? " z" : " zbar") << (k < dim_ ? k + 1 : k - dim_ + 1);
            if (e > 1) os << "^" << e;
        }
    }
    return os.str();
}

JetMat JetMat::identity(int n, int dim) {
    JetMat r(n, n, dim);
    for (int i = 0; i < n; ++i) r.at(i, i) = Jet::constant(dim, GaussianRational(1));
    return r;
}

bool JetMat::is_zero() const {
    return std::all_of(m_.begin(), m_.end(), [](const Jet& j) { return j.is_zero(); });
}

int JetMat::min_trusted() const {
    int t = Jet::kExactOrder;
    for (const auto& j : m_) t = std::min(t, j.trusted_order());
    return t;
}

JetMat JetMat::operator-() const {
    JetMat r(*this);
    for (auto& j : r.m_) j = -j;
    return r;
}

JetMat& JetMat::operator+=(const JetMat& o) {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("jet matrix shape mismatch");
    for (size_t i = 0; i < m_.size(); ++i) m_[i] += o.m_[i];
    return *this;
}

JetMat& JetMat::operator-=(const JetMat& o) { return *this += -o; }

JetMat operator*(const JetMat& a, const JetMat& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("jet matrix product shape mismatch");
    int dim = a.m_.empty() ? (b.m_.empty() ? 0 : b.m_[0].dim()) : a.m_[0].dim();
    JetMat r(a.rows_, b.cols_, dim);
    for (int i = 0; i < a.rows_; ++i)
        for (int j = 0; j < b.cols_; ++j) {
            Jet s(dim);
            for (int k = 0; k < a.cols_; ++k) s += a.at(i, k) * b.at(k, j);
            r.at(i, j) = std::move(s);
        }
    return r;
}

JetMat JetMat::scaled(const GaussianRational& c) const {
    JetMat r(*this);
    for (auto& j : r.m_) j = j.scaled(c);
    return r;
}

JetMat JetMat::scaled(const Jet& f) const {
    JetMat r(*this);
    for (auto& j : r.m_) j = j * f;
    return r;
}

JetMat JetMat::derived(int gen) const {
    JetMat r(*this);
    for (auto& j : r.m_) j = j.derived(gen);
    return r;
}

JetMat JetMat::conjugated() const {
    JetMat r(*this);
    for (auto& j : r.m_) j = j.conjugated();
    return r;
}

JetMat JetMat::conj_transposed() const {
    JetMat r(cols_, rows_, m_.empty() ? 0 : m_[0].dim());
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j).conjugated();
    return r;
}

Jet JetMat::det() const {
    if (rows_ != cols_) throw DimensionMismatch("determinant of non-square jet matrix");
    int dim = m_.empty() ? 0 : m_[0].dim();
    if (rows_ == 0) return Jet::constant(dim, GaussianRational(1));
    if (rows_ == 1) return at(0, 0);
    Jet d(dim);
    for (int j = 0; j < cols_; ++j) {
        JetMat minor(rows_ - 1, cols_ - 1, dim);
        for (int r = 1; r < rows_; ++r)
            for (int c = 0, cc = 0; c < cols_; ++c)
                if (c != j) minor.at(r - 1, cc++) = at(r, c);
        Jet t = at(0, j) * minor.det();
        d += (j % 2 == 0) ? t : -t;
    }
    return d;
}

JetMat JetMat::inverted() const {
    if (rows_ != cols_) throw DimensionMismatch("inverse of non-square jet matrix");
    int n = rows_;
    int dim = m_.empty() ? 0 : m_[0].dim();
    int trusted = min_trusted();
    // Exact Gaussian elimination on the basepoint value.
    std::vector<GaussianRational> a(static_cast<size_t>(n * n)), inv(static_cast<size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(i * n + j)] = at(i, j).at_origin();
            inv[static_cast<size_t>(i * n + j)] = GaussianRational(i == j ? 1 : 0);
        }
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!a[static_cast<size_t>(r * n + col)].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw NotInvertible("jet matrix singular at the basepoint");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a[static_cast<size_t>(piv * n + j)], a[static_cast<size_t>(col * n + j)]);
                std::swap(inv[static_cast<size_t>(piv * n + j)], inv[static_cast<size_t>(col * n + j)]);
            }
        GaussianRational p = GaussianRational(1) / a[static_cast<size_t>(col * n + col)];
        for (int j = 0; j < n; ++j) {
            a[static_cast<size_t>(col * n + j)] *= p;
            inv[static_cast<size_t>(col * n + j)] *= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            GaussianRational f = a[static_cast<size_t>(r * n + col)];
            if (f.is_zero()) continue;
            for (int j = 0; j < n; ++j) {
                a[static_cast<size_t>(r * n + j)] -= f * a[static_cast<size_t>(col * n + j)];
                inv[static_cast<size_t>(r * n + j)] -= f * inv[static_cast<size_t>(col * n + j)];
            }
        }
    }
    JetMat m0inv(n, n, dim, trusted);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m0inv.at(i, j) = Jet::constant(dim, inv[static_cast<size_t>(i * n + j)], trusted);
    // M^{-1} = (sum (-U)^k) M0^{-1} with U = M0^{-1} M - I nilpotent modulo
    // the trusted order.
    JetMat u = m0inv * (*this);
    for (int i = 0; i < n; ++i) u.at(i, i) -= Jet::constant(dim, GaussianRational(1), trusted);
    if (trusted == Jet::kExactOrder && !u.is_zero())
        throw ConfigError("inverting a non-constant exact jet matrix; truncate to a finite order first");
    JetMat acc = JetMat::identity(n, dim);
    JetMat pw = JetMat::identity(n, dim);
    for (int k = 1; k <= trusted; ++k) {
        pw = pw * u;
        if (pw.is_zero()) break;
        acc += (k % 2 == 1) ? -pw : pw;
    }
    return acc * m0inv;
}

bool JetMat::is_hermitian() const { return rows_ == cols_ && conj_transposed() == *this; }

bool operator==(const JetMat& a, const JetMat& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
    for (size_t i = 0; i < a.m_.size(); ++i)
        if (a.m_[i] != b.m_[i]) return false;
    return true;
}

} // namespace wick
