#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zeitlin/algebra.hpp"
#include "zeitlin/spectral.hpp"
#include "zeitlin/tolerances.hpp"

namespace zeitlin {

// Second variation of the energy along the orbit direction X at the steady
// pair (W0, P0):
//   Q(X) = <dW, -lap^{-1} dW> + <dW, [X, P0]>,   dW = [X, W0].
// Scale factors are dropped throughout; only the sign pattern matters.
// Throws InputError unless the pair is steady to `steady_tol`.
double quadratic_form_Q(const SpinBasis& basis, const cmat& x, const cmat& w0,
                        const cmat& p0,
                        double steady_tol = default_tolerances().steady_pair);

// Two-sided bound on the cross term M = <dW, [X, P0]>:
//   c ||dW||^2 <= M <= C ||dW||^2,
// plus the sharpened bounds on Q itself.  Q >= c||dW||^2 needs nothing
// extra (the inverse Laplace term is nonnegative); Q <= (1/6 + C)||dW||^2
// additionally needs dW free of first-eigenspace content, so that bound is
// only evaluated when the measured leakage is below `leakage_tol`.
struct SandwichReport {
  bool applicable = false;       // finite c and C
  double delta_norm = 0.0;       // ||[X, W0]||
  double lower_slack = 0.0;      // M - c ||dW||^2
  double upper_slack = 0.0;      // C ||dW||^2 - M
  double refined_lower_slack = 0.0;  // Q - c ||dW||^2
  bool refined_upper_applicable = false;
  double refined_upper_slack = 0.0;  // (1/6 + C) ||dW||^2 - Q
  double p1_leakage = 0.0;           // ||P1 dW|| / ||dW||
};

SandwichReport sandwich_check(const SpinBasis& basis, const cmat& x,
                              const cmat& w0, const cmat& p0,
                              const RatioExtrema& ratios,
                              double leakage_tol = 1e-10);

// Dense realization of Q on the orbit tangent space {[X, W0]}.
//
// Over the real orthonormal basis {E_k} of su(n) the map X -> [X, W0] has
// coordinate matrix Phi; its singular vectors above the truncation
// threshold give an orthonormal tangent basis u_i together with minimum-
// norm preimages xi_i.  H_ij = B(xi_i, xi_j) represents Q on tangent
// coordinates, with
//   B(E_j, E_k) = <v_j, -lap^{-1} v_k>
//               + (1/2)(<[E_j, P0], v_k> + <[E_k, P0], v_j>),
// v_k = [E_k, W0].  The constrained problem additionally intersects the
// tangent space with {dW : <dW, X_alpha> = 0}.
struct OrbitHessian {
  int tangent_dim = 0;
  int constrained_dim = 0;
  rvec full_spectrum;         // ascending
  rvec constrained_spectrum;  // ascending
  // Operator norm of the first-eigenspace projection restricted to the
  // tangent space (upper bound for the leakage of any unit tangent
  // direction).
  double p1_leakage = 0.0;
  rmat H;                     // tangent-coordinate form
  std::vector<cmat> tangent_basis;
  std::vector<cmat> preimages;
};

OrbitHessian orbit_hessian(const SpinBasis& basis, const cmat& w0,
                           const cmat& p0,
                           const Tolerances& tol = default_tolerances());

// Spec'd entry point: eigenvalues only.  Empty for W0 = 0.
rvec orbit_hessian_spectrum(const SpinBasis& basis, const cmat& w0,
                            const cmat& p0, bool constrain_momentum,
                            const Tolerances& tol = default_tolerances());

enum class Verdict { kStableByRatio, kIndeterminate, kTrivial };

struct StabilityCertificate {
  int n = 0;
  RatioExtrema ratios;
  Verdict verdict = Verdict::kIndeterminate;
  rvec hessian_full;
  rvec hessian_constrained;
  double p1_leakage = 0.0;
  // Definiteness consistency between the ratio bounds and the constrained
  // spectrum: C < -1/6 forces negative definite, c > 0 forces positive
  // definite.
  bool crosscheck_applicable = false;
  bool crosscheck_passed = true;
  std::string crosscheck_note;
  Tolerances tolerances;
  std::uint64_t w0_hash = 0;
  std::uint64_t p0_hash = 0;
};

StabilityCertificate certify(const SpinBasis& basis, const cmat& w0,
                             const cmat& p0,
                             const Tolerances& tol = default_tolerances());

const char* to_string(Verdict v);

}  // namespace zeitlin
