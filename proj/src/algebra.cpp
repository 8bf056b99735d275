#include "zeitlin/algebra.hpp"

#include <cmath>
#include <sstream>

#include "zeitlin/errors.hpp"

namespace zeitlin {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

[[noreturn]] void fail_input(const char* what, const std::string& detail) {
  std::ostringstream os;
  os << what << ": " << detail;
  throw InputError(os.str());
}

}  // namespace

std::complex<double> inner(const cmat& a, const cmat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
    fail_input("inner", "dimension mismatch");
  }
  return (a.adjoint() * b).trace() / static_cast<double>(a.rows());
}

double su_norm(const cmat& a) {
  return a.norm() / std::sqrt(static_cast<double>(a.rows()));
}

cmat bracket(const cmat& a, const cmat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail_input("bracket", "dimension mismatch");
  }
  return a * b - b * a;
}

bool is_skew_hermitian(const cmat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a + a.adjoint()).norm() <= tol * (1.0 + a.norm());
}

bool is_traceless(const cmat& a, double tol) {
  return std::abs(a.trace()) <= tol * (1.0 + a.norm());
}

cmat skew_part(const cmat& a) { return 0.5 * (a - a.adjoint()); }

cmat su_part(const cmat& a) {
  cmat s = skew_part(a);
  s.diagonal().array() -= s.trace() / static_cast<double>(a.rows());
  return s;
}

void require_skew_hermitian(const cmat& a, double tol, const char* what) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    fail_input(what, "matrix must be square and nonempty");
  }
  if (!is_skew_hermitian(a, tol)) {
    fail_input(what, "matrix is not skew-Hermitian within tolerance");
  }
}

void require_su(const cmat& a, double tol, const char* what) {
  require_skew_hermitian(a, tol, what);
  if (!is_traceless(a, tol)) {
    fail_input(what, "matrix has nonzero trace");
  }
}

// ------------------------------------------------------------------
// SpinBasis
// ------------------------------------------------------------------

SpinBasis::SpinBasis(int n) : n_(n) {
  if (n < 2) throw InputError("SpinBasis: n must be at least 2");
  hbar_ = 2.0 / std::sqrt(static_cast<double>(n) * n - 1.0);
  const double s = 0.5 * (n - 1);

  // m_j = s - j and the ladder amplitudes a_j = sqrt(s(s+1) - m_j(m_j+1)),
  // the entries of the raising operator (row j-1, column j).
  rvec mval(n), amp(n);
  for (int j = 0; j < n; ++j) {
    mval[j] = s - j;
    amp[j] = (j == 0) ? 0.0 : std::sqrt(s * (s + 1) - mval[j] * (mval[j] + 1));
  }

  for (auto& x : X_) x = cmat::Zero(n, n);
  for (int j = 0; j < n; ++j) X_[2](j, j) = -kI * hbar_ * mval[j];
  for (int j = 1; j < n; ++j) {
    const double h = 0.5 * hbar_ * amp[j];
    X_[0](j - 1, j) = -kI * h;
    X_[0](j, j - 1) = -kI * h;
    X_[1](j - 1, j) = -h;
    X_[1](j, j - 1) = h;
  }

  // Laplacian restricted to diagonal offset d, acting on the coefficients
  // c_j of the entries (j, j+d):
  //   (L c)_j = 2 (m_j m_{j+d} - s(s+1)) c_j
  //             + a_{j+1} a_{j+d+1} c_{j+1} + a_j a_{j+d} c_{j-1}.
  // Offsets d and -d share the same block.
  blocks_.resize(n);
  for (int d = 0; d < n; ++d) {
    DiagonalBlock& blk = blocks_[d];
    const int nd = n - d;
    blk.diag.resize(nd);
    blk.off.resize(std::max(nd - 1, 0));
    for (int j = 0; j < nd; ++j) {
      blk.diag[j] = 2.0 * (mval[j] * mval[j + d] - s * (s + 1));
    }
    for (int j = 0; j + 1 < nd; ++j) {
      blk.off[j] = amp[j + 1] * amp[j + d + 1];
    }

    // LDL^T factors.  The d = 0 block is singular (kernel = constants), so
    // only its leading principal (n-1) x (n-1) block is factored; that block
    // is negative definite by eigenvalue interlacing, as are all d > 0
    // blocks, so no pivoting is needed.
    const int fn = (d == 0) ? nd - 1 : nd;
    blk.fac_d.resize(fn);
    blk.fac_l.resize(std::max(fn - 1, 0));
    for (int j = 0; j < fn; ++j) {
      double v = blk.diag[j];
      if (j > 0) v -= blk.fac_l[j - 1] * blk.fac_l[j - 1] * blk.fac_d[j - 1];
      blk.fac_d[j] = v;
      if (j + 1 < fn) blk.fac_l[j] = blk.off[j] / v;
    }

    rmat dense = rmat::Zero(nd, nd);
    for (int j = 0; j < nd; ++j) dense(j, j) = blk.diag[j];
    for (int j = 0; j + 1 < nd; ++j) {
      dense(j, j + 1) = blk.off[j];
      dense(j + 1, j) = blk.off[j];
    }
    Eigen::SelfAdjointEigenSolver<rmat> es(dense);
    blk.vals = es.eigenvalues();
    blk.vecs = es.eigenvectors();
  }
}

// ------------------------------------------------------------------
// Laplacian and Poisson solve
// ------------------------------------------------------------------

namespace {

void check_dims(const SpinBasis& basis, const cmat& w, const char* what) {
  if (w.rows() != basis.n() || w.cols() != basis.n()) {
    fail_input(what, "matrix size does not match basis");
  }
}

// Apply one tridiagonal block to a complex coefficient vector.
cvec block_apply(const SpinBasis::DiagonalBlock& blk, const cvec& c) {
  const int m = static_cast<int>(c.size());
  cvec out(m);
  for (int j = 0; j < m; ++j) {
    std::complex<double> v = blk.diag[j] * c[j];
    if (j + 1 < m) v += blk.off[j] * c[j + 1];
    if (j > 0) v += blk.off[j - 1] * c[j - 1];
    out[j] = v;
  }
  return out;
}

// Solve L D L^T x = b for the factored leading block of size fn.
void ldl_solve(const rvec& fac_d, const rvec& fac_l, cvec& b) {
  const int fn = static_cast<int>(fac_d.size());
  for (int j = 1; j < fn; ++j) b[j] -= fac_l[j - 1] * b[j - 1];
  for (int j = 0; j < fn; ++j) b[j] /= fac_d[j];
  for (int j = fn - 2; j >= 0; --j) b[j] -= fac_l[j] * b[j + 1];
}

}  // namespace

cmat laplacian_apply(const SpinBasis& basis, const cmat& w) {
  check_dims(basis, w, "laplacian_apply");
  const int n = basis.n();
  cmat out(n, n);
  for (int d = 0; d < n; ++d) {
    const auto& blk = basis.block(d);
    const int nd = n - d;
    cvec c(nd);
    for (int j = 0; j < nd; ++j) c[j] = w(j, j + d);
    cvec r = block_apply(blk, c);
    for (int j = 0; j < nd; ++j) out(j, j + d) = r[j];
    if (d > 0) {
      for (int j = 0; j < nd; ++j) c[j] = w(j + d, j);
      r = block_apply(blk, c);
      for (int j = 0; j < nd; ++j) out(j + d, j) = r[j];
    }
  }
  return out;
}

cmat poisson_solve(const SpinBasis& basis, const cmat& w) {
  check_dims(basis, w, "poisson_solve");
  if (!is_traceless(w, 1e-10)) {
    fail_input("poisson_solve", "right-hand side must be traceless");
  }
  const int n = basis.n();
  cmat out(n, n);
  for (int d = 0; d < n; ++d) {
    const auto& blk = basis.block(d);
    const int nd = n - d;
    cvec c(nd);
    if (d == 0) {
      // Solve on the mean-zero complement: factor covers the leading
      // (n-1) x (n-1) block; with c_{n-1} = 0 the remaining equation holds
      // automatically because both sides are orthogonal to the kernel.
      for (int j = 0; j < nd; ++j) c[j] = w(j, j);
      c.array() -= c.mean();
      cvec head = c.head(nd - 1);
      ldl_solve(blk.fac_d, blk.fac_l, head);
      cvec sol(nd);
      sol.head(nd - 1) = head;
      sol[nd - 1] = 0.0;
      sol.array() -= sol.mean();
      for (int j = 0; j < nd; ++j) out(j, j) = sol[j];
    } else {
      for (int j = 0; j < nd; ++j) c[j] = w(j, j + d);
      ldl_solve(blk.fac_d, blk.fac_l, c);
      for (int j = 0; j < nd; ++j) out(j, j + d) = c[j];
      for (int j = 0; j < nd; ++j) c[j] = w(j + d, j);
      ldl_solve(blk.fac_d, blk.fac_l, c);
      for (int j = 0; j < nd; ++j) out(j + d, j) = c[j];
    }
  }
  return out;
}

// ------------------------------------------------------------------
// Eigenbasis
// ------------------------------------------------------------------

std::vector<EigenBasisEntry> eigenbasis_build(const SpinBasis& basis,
                                              int l_max) {
  const int n = basis.n();
  if (l_max < 1 || l_max > n - 1) {
    fail_input("eigenbasis_build", "l_max must be in [1, n-1]");
  }
  std::vector<EigenBasisEntry> out;
  out.reserve(static_cast<std::size_t>(l_max) * (l_max + 2));
  const double rootn = std::sqrt(static_cast<double>(n));
  for (int l = 1; l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int d = std::abs(m);
      const auto& blk = basis.block(d);
      const double target = -static_cast<double>(l) * (l + 1);
      int idx = 0;
      double best = std::abs(blk.vals[0] - target);
      for (int i = 1; i < blk.vals.size(); ++i) {
        const double diff = std::abs(blk.vals[i] - target);
        if (diff < best) {
          best = diff;
          idx = i;
        }
      }
      if (best > 1e-8 * std::max(1.0, std::abs(target))) {
        throw Error("eigenbasis_build: eigenvalue -l(l+1) not found");
      }
      rvec v = blk.vecs.col(idx);
      for (int j = 0; j < v.size(); ++j) {
        if (std::abs(v[j]) > 1e-12) {
          if (v[j] < 0) v = -v;
          break;
        }
      }
      EigenBasisEntry e;
      e.l = l;
      e.m = m;
      e.T = cmat::Zero(n, n);
      // Unit norm under inner() means the coefficient vector has length
      // sqrt(n); entries i * c_j put the leading entry on the positive
      // imaginary axis.
      for (int j = 0; j < v.size(); ++j) {
        const std::complex<double> entry = kI * (rootn * v[j]);
        if (m >= 0) {
          e.T(j, j + d) = entry;
        } else {
          e.T(j + d, j) = entry;
        }
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

// ------------------------------------------------------------------
// Functionals
// ------------------------------------------------------------------

Eigen::Vector3d project_eigenspace_1(const SpinBasis& basis, const cmat& w) {
  check_dims(basis, w, "project_eigenspace_1");
  Eigen::Vector3d a;
  // <X_alpha, X_alpha> = 1/3 for every n.
  for (int alpha = 0; alpha < 3; ++alpha) {
    a[alpha] = 3.0 * inner(basis.X(alpha), w).real();
  }
  return a;
}

cmat project_eigenspace_1_matrix(const SpinBasis& basis, const cmat& w) {
  const Eigen::Vector3d a = project_eigenspace_1(basis, w);
  return a[0] * basis.X(0) + a[1] * basis.X(1) + a[2] * basis.X(2);
}

double casimir(const cmat& w, int k) {
  if (k < 1) throw InputError("casimir: power must be positive");
  require_skew_hermitian(w, 1e-8, "casimir");
  Eigen::SelfAdjointEigenSolver<cmat> es(
      ((-kI) * w + ((-kI) * w).adjoint()) * 0.5, Eigen::EigenvaluesOnly);
  const rvec& lam = es.eigenvalues();
  double acc = 0.0;
  for (int j = 0; j < lam.size(); ++j) acc += std::pow(lam[j], k);
  return acc / static_cast<double>(lam.size());
}

Eigen::Vector3d momentum(const SpinBasis& basis, const cmat& w) {
  check_dims(basis, w, "momentum");
  Eigen::Vector3d out;
  for (int alpha = 0; alpha < 3; ++alpha) {
    out[alpha] = inner(w, basis.X(alpha)).real();
  }
  return out;
}

double hamiltonian(const SpinBasis& basis, const cmat& w) {
  return 0.5 * inner(poisson_solve(basis, w), w).real();
}

// ------------------------------------------------------------------
// Real orthonormal basis of su(n)
// ------------------------------------------------------------------

std::vector<cmat> real_su_basis(int n) {
  if (n < 2) throw InputError("real_su_basis: n must be at least 2");
  std::vector<cmat> out;
  out.reserve(static_cast<std::size_t>(n) * n - 1);
  const double rootn = std::sqrt(static_cast<double>(n));
  // Helmert vectors span the mean-zero diagonals.
  for (int k = 1; k < n; ++k) {
    const double scale = rootn / std::sqrt(static_cast<double>(k) * (k + 1));
    cmat e = cmat::Zero(n, n);
    for (int j = 0; j < k; ++j) e(j, j) = kI * scale;
    e(k, k) = -kI * (scale * k);
    out.push_back(std::move(e));
  }
  const double c = std::sqrt(0.5 * n);
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      cmat a = cmat::Zero(n, n);
      a(j, k) = c;
      a(k, j) = -c;
      out.push_back(std::move(a));
      cmat b = cmat::Zero(n, n);
      b(j, k) = kI * c;
      b(k, j) = kI * c;
      out.push_back(std::move(b));
    }
  }
  return out;
}

}  // namespace zeitlin
