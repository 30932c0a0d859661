#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wick/fedosov.hpp"

namespace wick {

// Result of one named identity check. A failing report always carries a
// witness: the first offending monomial key with both coefficient values,
// or the error text when setup itself failed.
struct CheckReport {
    std::string id;
    std::string anchor;  // the identity under test, in words
    bool pass = true;
    std::string witness;
    int lambda_order = 0;
    int total_cap = 0;
    double wall_seconds = 0.0;
};

// One structured text record per check: id, anchor, status, witness.
std::string format_report(const CheckReport& r);

// Empty string when the elements agree (up to common trusted orders);
// otherwise the first differing key with both entry values.
std::string first_difference(const WeylElement& a, const WeylElement& b);

// Closed form of the flat-chart product: sum over bi-indices (alpha, beta)
// of (kappa+1)^|alpha| (kappa-1)^|beta| lambda^{|alpha|+|beta|} / (alpha! beta!)
// (d_z^alpha d_zbar^beta f)(d_zbar^alpha d_z^beta g). Independent of the
// curvature recursion; the reference oracle for every flat-chart test.
WeylElement oracle_flat_star(const Jet& f, const Jet& g, const mpq_class& kappa, int n,
                             TruncationPolicy pol);

// Deterministic generator of small exact Gaussian-rational jets and sparse
// algebra elements for seeded property checks.
class SampleGen {
public:
    explicit SampleGen(std::uint64_t seed) : eng_(seed) {}
    GaussianRational coeff();
    Jet jet(int n, int deg, int trusted);
    WeylElement element(int n, TruncationPolicy pol, ValueKind kind = ValueKind::Scalar,
                        int rank = 1);

private:
    std::mt19937_64 eng_;
    int ri(int lo, int hi);
};

// Monomial keys up to the cap with unit jet coefficients, plus `extra`
// seeded random elements. Operator identities are multilinear, so the
// monomials span; the random elements guard against bookkeeping slips.
std::vector<WeylElement> spanning_set(int n, TruncationPolicy pol, ValueKind kind, int rank,
                                      std::uint64_t seed, int max_deg_s = 2, int extra = 10);

// Both association orders of the deformed product on the supplied jet
// triples, compared exactly.
CheckReport check_associativity(const FedosovSolution& sol,
                                const std::vector<std::array<Jet, 3>>& triples);

// Separation of variables for the kappa = 1 product: an anti-holomorphic
// left factor and a holomorphic right factor multiply pointwise, plus a
// mixed-witness negative control at first order.
CheckReport check_separation(const FedosovSolution& sol);

// Shared configuration of a suite run; checks are deterministic given the
// seed.
struct SuiteConfig {
    std::string chart = "fubini_study";
    std::optional<Jet> potential;  // explicit potential overriding the name
    int n = 1;
    mpq_class kappa = 1;
    bool with_omega = false;  // add the formal two-form lambda * omega
    TruncationPolicy pol = TruncationPolicy::make(2);
    std::uint64_t seed = 1;
    bool sabotage_curvature_sign = false;  // negative-control hook
};

const std::vector<std::string>& suite_names();

// Runs one named suite ("graded", "geometry", "fedosov", "wick",
// "hermitian", "morita"). Configuration errors surface as a failed setup
// report, not as exceptions; an unknown suite name throws ConfigError.
std::vector<CheckReport> run_suite(const std::string& name, const SuiteConfig& cfg);

} // namespace wick
