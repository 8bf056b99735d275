#pragma once

#include <Eigen/Dense>
#include <string>

#include "zeitlin/algebra.hpp"
#include "zeitlin/spectral.hpp"

namespace zeitlin {

enum class Provenance { kZonal, kEigenstate, kNewton, kLoaded };

// A steady configuration (W0, P0): the stream matrix P0 reproduces the
// vorticity through the Laplace operator and the pair commutes, so the
// flow generated by P0 fixes W0.
struct SteadyState {
  cmat W0;
  cmat P0;
  CommonSpectrum spectrum;
  double commutator_residual = 0.0;  // ||[P0,W0]|| / (||P0|| ||W0||)
  double laplacian_residual = 0.0;   // ||lap(P0) - W0|| / max(||W0||, eps)
  Provenance provenance = Provenance::kLoaded;
  int eigen_l = 0;     // set for kEigenstate
  std::string detail;  // functional descriptor for kNewton
};

// Validates the pair, computes the joint spectrum and residuals, throws
// InputError when the residual invariants (1e-10) fail.
SteadyState make_steady_state(const SpinBasis& basis, const cmat& w0,
                              const cmat& p0, Provenance provenance,
                              int eigen_l = 0, std::string detail = "");

// P0 = i diag(d) with sum(d) = 0; W0 its Laplace image.  Both diagonal,
// hence commuting.
SteadyState zonal_state(const SpinBasis& basis, const rvec& d);

// State inside a single Laplace eigenspace: W0 = -l(l+1) P0.  The 2l+1
// real coefficients gamma_m (index l+m, m = -l..l) set
//   P0 = gamma_0 T_{l,0}
//      + sum_{m>0} ((gamma_m + i gamma_{-m})/sqrt2) T_{l,m} + (conj pair),
// which is skew-Hermitian by the conjugation pairing of the basis and
// isometric: ||P0||^2 = sum gamma^2.
SteadyState eigen_state(const SpinBasis& basis, int l, const rvec& coeffs);

// Newton solve of lap(P0) = i f(-i P0) on the traceless-diagonal subspace,
// f a real polynomial given by ascending coefficients.  The residual is
// projected onto traceless diagonals, so the solution realizes
// w_j = f(p_j) + const with the constant removing the mean of f.
// Rank-deficient Jacobians (f' hitting a Laplace eigenvalue) fall back to
// a pseudoinverse step, which settles exactly on the kernel component for
// linear f; throws SolverError on divergence or stagnation.
SteadyState newton_functional_state(const SpinBasis& basis,
                                    const rvec& f_coeffs, const rvec& d_init,
                                    int max_iter = 100, double tol = 1e-12);

// f(x) = sum_k coeffs[k] x^k and its derivative.
double polyval(const rvec& coeffs, double x);
rvec polyder(const rvec& coeffs);
std::string poly_descriptor(const rvec& coeffs);

// Group action W -> F W F^dag with F = exp(sum rho_alpha X_alpha).
// Because [X_i, X_j] = hbar eps_ijk X_k, the induced classical rotation
// on momentum vectors is exp(hbar * hat(rho)), not exp(hat(rho)): the
// coefficient vector rho traces the rotation angle divided by hbar.
cmat so3_rotate(const SpinBasis& basis, const Eigen::Vector3d& rho,
                const cmat& w);

// Classical rotation matrix exp(hat(rho)) acting on 3-vectors.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& rho);

// Rotation parameters aligning the first-eigenspace component of W with
// the third spin axis.  rho is scaled so that so3_rotate(rho) realizes the
// classical axis-angle rotation taking a/||a|| to e3; when ||a|| is
// negligible relative to ||W|| the identity is returned.
struct Alignment {
  Eigen::Vector3d rho = Eigen::Vector3d::Zero();
  cmat aligned;
};

Alignment align_first_eigenspace(const SpinBasis& basis, const cmat& w);

enum class RigidityConclusion {
  kDiagonalConfirmed,
  kZeroConfirmed,
  kNotApplicable,
  kViolation
};

// Outcome of the rigidity checks: steep spectra (L > -2) must be zero
// states, moderately steep ones (L > -6) must be diagonal after aligning
// the first eigenspace.  kViolation under a satisfied hypothesis means a
// broken invariant and must abort any test run.
struct RigidityReport {
  double L = 0.0;
  Eigen::Vector3d alignment_rotation = Eigen::Vector3d::Zero();
  double offdiag_residual = 0.0;         // off-diagonal mass of R.W0, relative
  double x3_commutator_residual = 0.0;   // ||[R.W0, X3]|| scaled, diagnostic
  double norm_W0 = 0.0;
  RigidityConclusion conclusion = RigidityConclusion::kNotApplicable;
};

RigidityReport rigidity_report(
    const SpinBasis& basis, const SteadyState& state,
    double residual_tol = 1e-8,
    double margin = default_tolerances().ratio_margin);

const char* to_string(RigidityConclusion c);
const char* to_string(Provenance p);

}  // namespace zeitlin
