#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "zeitlin/tolerances.hpp"

namespace zeitlin {

using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

// ------------------------------------------------------------------
// Scalar product and matrix-space helpers.
//
// The algebra su(n) carries the scaled Frobenius product
//   <A, B> = tr(A^dag B) / n,
// conjugate-linear in the first slot.  All norms below are induced by it.
// ------------------------------------------------------------------

std::complex<double> inner(const cmat& a, const cmat& b);

// sqrt(<A, A>): Frobenius norm divided by sqrt(n).
double su_norm(const cmat& a);

// Matrix commutator a*b - b*a.
cmat bracket(const cmat& a, const cmat& b);

bool is_skew_hermitian(const cmat& a, double tol);
bool is_traceless(const cmat& a, double tol);

// Nearest skew-Hermitian matrix: (A - A^dag) / 2.
cmat skew_part(const cmat& a);

// Projection onto su(n): skew part minus its trace component.
cmat su_part(const cmat& a);

// Throws InputError unless `a` is square, n x n (when n > 0), and
// skew-Hermitian to `tol` relative; `traceless` adds the trace check.
void require_skew_hermitian(const cmat& a, double tol, const char* what);
void require_su(const cmat& a, double tol, const char* what);

// ------------------------------------------------------------------
// SpinBasis: the three generators X_1, X_2, X_3 of the irreducible spin
// representation with s = (n-1)/2, scaled so that
//   [X_i, X_j] = hbar eps_{ijk} X_k,   hbar = 2 / sqrt(n^2 - 1),
// together with cached tridiagonal factorizations of the Laplace operator
// restricted to each matrix diagonal.  Immutable after construction and
// safe to share across threads.
// ------------------------------------------------------------------

class SpinBasis {
 public:
  // One diagonal-offset block of the Laplacian.  Acting on the coefficient
  // vector c of the offset-d diagonal (entries (j, j+d)):
  //   (L c)_j = diag[j] c_j + off[j] c_{j+1} + off[j-1] c_{j-1},
  // a real symmetric tridiagonal operator of size n - d.
  struct DiagonalBlock {
    rvec diag;         // main diagonal, size n - d
    rvec off;          // super/subdiagonal, size n - d - 1
    // LDL^T factors for the solve.  For d = 0 the operator has the constant
    // vector in its kernel and the factors cover the leading principal
    // (n-1) x (n-1) block, which is negative definite.
    rvec fac_d;
    rvec fac_l;
    // Spectral decomposition of the block: columns of vecs are orthonormal
    // eigenvectors, vals ascending.  Eigenvalues are -l(l+1) with
    // l = max(d,1) .. n-1 for d > 0 and l = 0 .. n-1 for d = 0.
    rvec vals;
    rmat vecs;
  };

  explicit SpinBasis(int n);

  int n() const { return n_; }
  double hbar() const { return hbar_; }

  // X_alpha for alpha in {0, 1, 2} (components 1, 2, 3).
  const cmat& X(int alpha) const { return X_[alpha]; }

  // Offset-d block, 0 <= d <= n-1.  Offsets d and -d share one block.
  const DiagonalBlock& block(int d) const { return blocks_[d]; }

 private:
  int n_;
  double hbar_;
  std::array<cmat, 3> X_;
  std::vector<DiagonalBlock> blocks_;
};

// ------------------------------------------------------------------
// Core operators on su(n).
// ------------------------------------------------------------------

// Hoppe-Yau Laplacian: (1/hbar^2) sum_alpha [X_alpha, [X_alpha, W]].
// Computed per diagonal through the cached tridiagonal blocks; preserves
// each diagonal and has spectrum {-l(l+1) : l = 1..n-1} on su(n).
cmat laplacian_apply(const SpinBasis& basis, const cmat& w);

// Unique traceless P with laplacian_apply(P) = W.  O(n) per diagonal after
// the cached factorization, O(n^2) per full solve.
cmat poisson_solve(const SpinBasis& basis, const cmat& w);

// Laplacian eigenbasis element: supported on the m-th diagonal, satisfies
// laplacian_apply(T) = -l(l+1) T, unit norm, phase fixed so the first
// nonzero entry is positive-imaginary.
struct EigenBasisEntry {
  int l = 0;
  int m = 0;
  cmat T;
};

// All entries with 1 <= l <= l_max (l_max <= n-1), ordered by (l, m),
// m = -l..l.  Entries are orthonormal under inner().
std::vector<EigenBasisEntry> eigenbasis_build(const SpinBasis& basis,
                                              int l_max);

// Orthogonal projection onto span{X_1, X_2, X_3} and its coefficients:
//   P1 W = sum_alpha <W, X_alpha> X_alpha / <X_alpha, X_alpha>.
// Returns the real coefficient triple a with P1 W = sum a_alpha X_alpha.
Eigen::Vector3d project_eigenspace_1(const SpinBasis& basis, const cmat& w);
cmat project_eigenspace_1_matrix(const SpinBasis& basis, const cmat& w);

// Casimir functional C_k(W) = tr((-iW)^k) / n, real for skew-Hermitian W.
double casimir(const cmat& w, int k);

// Momentum vector (<W, X_1>, <W, X_2>, <W, X_3>).
Eigen::Vector3d momentum(const SpinBasis& basis, const cmat& w);

// Kinetic energy H(W) = <P, W> / 2 with laplacian_apply(P) = W.
double hamiltonian(const SpinBasis& basis, const cmat& w);

// Deterministic orthonormal real basis of su(n) (dimension n^2 - 1) under
// the real part of inner().  Order: the n-1 diagonal elements first, then
// for each j < k the antisymmetric and symmetric-imaginary pair.
std::vector<cmat> real_su_basis(int n);

}  // namespace zeitlin
