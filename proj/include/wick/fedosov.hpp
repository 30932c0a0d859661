#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>

#include "wick/geometry.hpp"

namespace wick {

// (i/lambda) ad_kappa(r, a) and (i/lambda) a circ_kappa b; the products are
// evaluated with truncation headroom before dividing by the parameter so no
// cap-boundary keys are lost.
WeylElement iad_over_lambda(const WeylElement& r, const WeylElement& a,
                            const mpq_class& kappa, const JetMat& ginv);
WeylElement icirc_over_lambda(const WeylElement& a, const WeylElement& b,
                              const mpq_class& kappa, const JetMat& ginv);

// The solved connection data of the deformation on one chart: the scalar
// curvature element r, and, when a bundle is present, the endomorphism-valued
// r' together with r_E = (i/lambda)(r' - r).
struct FedosovSolution {
    KaehlerChart chart;
    std::optional<BundleChart> bundle;
    mpq_class kappa = 0;
    TruncationPolicy pol;
    WeylElement Omega;
    WeylElement r;
    WeylElement r_prime;
    WeylElement r_E;
    // The same elements solved with cap headroom; derivations use these so
    // that boundary keys survive the division by the formal parameter.
    WeylElement r_big;
    WeylElement r_prime_big;
    WeylElement r_E_big;

    struct Cache {
        std::mutex mutex;
        std::map<std::string, WeylElement> memo;
    };
    std::shared_ptr<Cache> cache;
};

// Solves the two recursions (bundle may be null). Omega must be a scalar
// two-form series in lambda * Lambda^2 with closed coefficients; for
// kappa != 0 it must in addition be of type (1,1).
FedosovSolution solve_fedosov(const KaehlerChart& chart, const BundleChart* bundle,
                              const mpq_class& kappa, const WeylElement& Omega,
                              TruncationPolicy pol);

// Residual of the quadratic equation for r (primed: for r'); zero on a
// valid solution through the cap.
WeylElement fedosov_residual(const FedosovSolution& sol, bool primed);

// The flat derivation: Conn::D acts on scalar elements via r, Conn::Dprime
// on endomorphism-valued elements via r', Conn::DE on section-valued
// elements via r and the left multiplication by r_E.
WeylElement fedosov_derivative(const WeylElement& a, const FedosovSolution& sol, Conn which);

// The inverse of sigma on the kernel of the flat derivation in antisymmetric
// degree zero, per value kind as in fedosov_derivative. The input must be a
// lambda-series (deg_s = deg_a = 0 keys only). Results are memoized.
WeylElement taylor_series(const WeylElement& x, const FedosovSolution& sol, Conn which);

// Deformed products: star for two scalar series, star_prime for two
// endomorphism-valued series.
WeylElement star(const WeylElement& f, const WeylElement& g, const FedosovSolution& sol);
WeylElement star_prime(const WeylElement& A, const WeylElement& B, const FedosovSolution& sol);

// Bimodule multiplications on section series: s . f from the right and
// A .' s from the left.
WeylElement module_right(const WeylElement& s, const WeylElement& f, const FedosovSolution& sol);
WeylElement module_left(const WeylElement& A, const WeylElement& s, const FedosovSolution& sol);

// Fibrewise metric pairing of two section-valued elements: conjugate the
// first argument, multiply with the Wick product, and contract with the
// fibre metric H.
WeylElement pairing_H(const WeylElement& a, const WeylElement& b, const JetMat& H,
                      const KaehlerChart& chart);

// The deformed Hermitian metric h(s, s') = sigma(H(tau_E s, tau_E s')).
WeylElement metric_h(const WeylElement& s, const WeylElement& s_prime,
                     const FedosovSolution& sol);

// Canonical equivalence bimodule data on the canonical line bundle: the
// kappa = +1 and kappa = -1 scalar solutions share one Omega.
struct MoritaBimodule {
    KaehlerChart chart;
    BundleChart lcan;
    TruncationPolicy pol;
    FedosovSolution wick;
    FedosovSolution antiwick;
    std::shared_ptr<FedosovSolution::Cache> cache;
};

MoritaBimodule morita_bimodule(const KaehlerChart& chart, const WeylElement& Omega,
                               TruncationPolicy pol);

// Fibrewise bimodule multiplications a <>  Psi = S^{-1} a o_Weyl Psi and
// Psi <>' b = Psi o_Weyl S b.
WeylElement diamond(const WeylElement& a, const WeylElement& psi, const MoritaBimodule& mb);
WeylElement diamond_bar(const WeylElement& psi, const WeylElement& b, const MoritaBimodule& mb);

// The flat module derivation on section-valued elements of the line bundle.
WeylElement morita_derivative(const WeylElement& psi, const MoritaBimodule& mb);

// Inverse of sigma on its kernel in antisymmetric degree zero (memoized).
WeylElement tau_line(const WeylElement& s, const MoritaBimodule& mb);

// The deformed bimodule multiplications on section series of the line
// bundle: f from the left (Wick side), g from the right (anti-Wick side).
WeylElement morita_left(const WeylElement& f, const WeylElement& s, const MoritaBimodule& mb);
WeylElement morita_right(const WeylElement& s, const WeylElement& g, const MoritaBimodule& mb);

} // namespace wick
