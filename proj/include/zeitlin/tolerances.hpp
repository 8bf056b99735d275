#pragma once

namespace zeitlin {

// Numerical defaults used across the library.  Every entry point that
// consumes one of these accepts an override parameter; these are the values
// used when the caller does not care.
struct Tolerances {
  // Acceptable violation of skew-Hermiticity / tracelessness on input
  // matrices, relative to the matrix norm.
  double matrix_invariant = 1e-12;
  // Commutation gate for joint diagonalization of a pair.
  double commuting_pair = 1e-8;
  // Off-diagonal residual allowed in a joint eigenframe.
  double joint_offdiag = 1e-10;
  // Eigenvalue gap below which two eigenvalues count as one cluster,
  // relative to the largest eigenvalue magnitude.
  double cluster_gap = 1e-9;
  // Two spectrum values count as equal (degenerate) below this, relative
  // to the spectrum's sup norm.  Used by the ratio extrema.
  double spectrum_degeneracy = 1e-10;
  // Residual gate for treating (W0, P0) as a steady pair.
  double steady_pair = 1e-8;
  // Margin added to the strict ratio thresholds (-6 and -2); values inside
  // the margin are treated as boundary cases.
  double ratio_margin = 1e-9;
  // Singular values below this times the largest are truncated when
  // extracting the orbit tangent space.
  double tangent_truncation = 1e-10;
  // Newton convergence threshold on the residual norm.
  double newton = 1e-12;
  // ||W0|| below this times (1 + ||P0||) makes a state trivial.
  double trivial_state = 1e-12;
  // Slack allowed when checking a Hessian spectrum for definiteness.
  double definiteness = 1e-10;
  // Inner fixed-point residual for the implicit integrator step.
  double integrator_inner = 1e-13;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace zeitlin
