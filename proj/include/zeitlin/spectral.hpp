#pragma once

#include <Eigen/Dense>

#include "zeitlin/algebra.hpp"
#include "zeitlin/tolerances.hpp"

namespace zeitlin {

// Joint eigenstructure of a commuting pair (W, P) of skew-Hermitian,
// traceless matrices: a unitary Lambda with
//   Lambda^dag P Lambda = i diag(p),   Lambda^dag W Lambda = i diag(w),
// ordered by p ascending with ties broken by w ascending.
struct CommonSpectrum {
  int n = 0;
  rvec p;
  rvec w;
  cmat Lambda;
};

// Diagonalizes the pair.  `tol` gates the commutator check
// ||[P, W]|| <= tol * max(||P||, ||W||); eigenvalues of -iP closer than
// `cluster_gap` * max|p| are treated as one cluster and resolved by
// diagonalizing -iW restricted to the cluster.  Exactly diagonal inputs
// short-circuit to a sorting permutation.  Throws SolverError when the
// joint off-diagonal residual exceeds `offdiag_tol` relative.
CommonSpectrum simultaneous_diagonalize(
    const cmat& w, const cmat& p, double tol = 1e-8,
    double cluster_gap = default_tolerances().cluster_gap,
    double offdiag_tol = default_tolerances().joint_offdiag);

// The bracket pairing <[X, W], [X, P]> evaluated through the joint
// spectrum: with Y = Lambda^dag X Lambda,
//   (1/n) sum_{j != k} |Y_{jk}|^2 (p_k - p_j)(w_k - w_j),
// grouping the sum by matrix diagonal.  X may be any element of u(n).
double diagonal_pairing(const CommonSpectrum& spec, const cmat& x);

// Extreme ratios of eigenvalue differences over all unordered pairs.
//   L = min (w_k - w_j) / (p_k - p_j)   over pairs with p_k != p_j,
//   c = min (p_k - p_j) / (w_k - w_j),  C = max of the same,
//                                       over pairs with w_k != w_j.
// Conventions for degenerate spectra: a pair with p_k = p_j but
// w_k != w_j forces L = -inf (flagged); a pair with w_k = w_j but
// p_k != p_j forces c = -inf, C = +inf (flagged); with no admissible
// pairs at all the min is +inf and the max is -inf (vacuous).
// Equality of spectrum values is relative to `degeneracy_tol` times the
// sup norm of the respective vector.
struct RatioExtrema {
  double L = std::numeric_limits<double>::infinity();
  double c = std::numeric_limits<double>::infinity();
  double C = -std::numeric_limits<double>::infinity();
  bool degenerate_p = false;  // some p_j = p_k with w_j != w_k
  bool degenerate_w = false;  // some w_j = w_k with p_j != p_k
};

RatioExtrema ratio_extrema(
    const CommonSpectrum& spec,
    double degeneracy_tol = default_tolerances().spectrum_degeneracy);

}  // namespace zeitlin
