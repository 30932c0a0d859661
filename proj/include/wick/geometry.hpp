#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wick/weyl.hpp"

namespace wick {

// All geometric data of a Kähler chart derived from a potential jet.
// Index conventions: g.at(k,l) = g_{k lbar} = d_k d_lbar K;
// christoffel(l,k,m) = Gamma^l_{km} = g^{l nbar} d_k g_{m nbar};
// riemann(j,m,k,l) = R^j_{m k lbar} = -d_lbar Gamma^j_{km}.
struct KaehlerChart {
    int n = 0;
    TruncationPolicy pol;
    Jet potential;
    JetMat g;     // n x n, g_{k lbar}
    JetMat ginv;  // n x n, g^{k lbar} with sum_l g^{k lbar} g_{m lbar} = delta^k_m
    std::vector<Jet> gamma;     // Gamma^l_{km}, index (l*n + k)*n + m
    std::vector<Jet> riem;      // R^j_{m k lbar}, index ((j*n + m)*n + k)*n + l
    WeylElement ricci_form;     // rho = (i/2) R^{L_can}
    WeylElement r_can_curv;     // R^{L_can} = Gamma^j_{kj,lbar} dz^k ^ dzbar^l
    WeylElement symplectic_R;   // deg_s = 2, deg_a = 2 curvature element
    WeylElement omega;          // (i/2) g_{k lbar} dz^k ^ dzbar^l

    const Jet& christoffel(int l, int k, int m) const {
        return gamma[static_cast<size_t>((l * n + k) * n + m)];
    }
    const Jet& riemann(int j, int m, int k, int l) const {
        return riem[static_cast<size_t>(((j * n + m) * n + k) * n + l)];
    }
};

// Flips the Riemann-tensor sign; only for negative-control diagnostics.
KaehlerChart chart_from_potential(const Jet& K, int n, TruncationPolicy pol,
                                  bool sabotage_curvature_sign = false);
KaehlerChart chart_from_metric(const JetMat& g, int n, TruncationPolicy pol);

// "flat", "fubini_study", "hyperbolic_disc"; series expanded to jet_order.
Jet builtin_potential(const std::string& name, int n, int jet_order);

enum class BundleKind { Holomorphic, AntiHolomorphic };

struct BundleChart {
    int rank = 1;
    BundleKind kind = BundleKind::Holomorphic;
    JetMat H;                // fibre metric, rank x rank
    std::vector<JetMat> A;   // connection one-form over the 2n directions
    WeylElement curv;        // R^E = -i dA - A^A, endomorphism-valued (1,1)
    std::optional<JetMat> transition;
};

// Canonical Hermitian connection A = i H^{-1} dH (holomorphic kind takes the
// holomorphic derivative, anti-holomorphic the conjugate one).
BundleChart bundle_from_metric(const JetMat& H, BundleKind kind, const KaehlerChart& chart);

// L_can with fibre metric 1/det(g); curvature equals chart.r_can_curv.
BundleChart canonical_line_bundle(const KaehlerChart& chart);

enum class Conn { D, DE, Dprime };
enum class ConnPart { Full, Hol, AntiHol };

// The super-derivation D (scalar), D^E (sections), D' (endomorphisms); the
// part selector picks the dz- or dzbar-direction summands.
WeylElement connection_apply(const WeylElement& a, const KaehlerChart& chart,
                             const BundleChart* bundle, Conn which,
                             ConnPart part = ConnPart::Full);

} // namespace wick
