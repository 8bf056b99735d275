#include "zeitlin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "zeitlin/errors.hpp"

namespace zeitlin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Off-diagonal magnitude small enough to treat the matrix as exactly
// diagonal and take the permutation shortcut.
bool numerically_diagonal(const cmat& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  const double tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  for (int c = 0; c < a.cols(); ++c)
    for (int r = 0; r < a.rows(); ++r)
      if (r != c && std::abs(a(r, c)) > tol) return false;
  return true;
}

cmat hermitized(const cmat& a) { return 0.5 * (a + a.adjoint()); }

// su_norm of the part of `a` off the main diagonal plus the deviation of
// the diagonal from i*diag(d).
double joint_residual(const cmat& a, const rvec& d) {
  cmat r = a;
  for (int j = 0; j < d.size(); ++j)
    r(j, j) -= std::complex<double>(0.0, d[j]);
  return su_norm(r);
}

}  // namespace

CommonSpectrum simultaneous_diagonalize(const cmat& w, const cmat& p,
                                        double tol, double cluster_gap,
                                        double offdiag_tol) {
  require_su(w, 1e-8, "simultaneous_diagonalize: W");
  require_su(p, 1e-8, "simultaneous_diagonalize: P");
  const int n = static_cast<int>(w.rows());
  if (p.rows() != n)
    throw InputError("simultaneous_diagonalize: dimension mismatch");

  const double scale = std::max(su_norm(p), su_norm(w));
  if (su_norm(bracket(p, w)) > tol * scale)
    throw InputError(
        "simultaneous_diagonalize: inputs do not commute to tolerance, pair "
        "is not simultaneously diagonalizable");

  CommonSpectrum spec;
  spec.n = n;

  if (numerically_diagonal(p) && numerically_diagonal(w)) {
    // Permutation realizing the sort order; keeps entries bit-exact.
    rvec pd(n), wd(n);
    for (int j = 0; j < n; ++j) {
      pd[j] = p(j, j).imag();
      wd[j] = w(j, j).imag();
    }
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (pd[a] != pd[b]) return pd[a] < pd[b];
      return wd[a] < wd[b];
    });
    spec.p.resize(n);
    spec.w.resize(n);
    spec.Lambda = cmat::Zero(n, n);
    for (int k = 0; k < n; ++k) {
      spec.p[k] = pd[idx[k]];
      spec.w[k] = wd[idx[k]];
      spec.Lambda(idx[k], k) = 1.0;
    }
    return spec;
  }

  const cmat hp = hermitized(cmat(-std::complex<double>(0, 1) * p));
  const cmat hw = hermitized(cmat(-std::complex<double>(0, 1) * w));

  Eigen::SelfAdjointEigenSolver<cmat> es(hp);
  if (es.info() != Eigen::Success)
    throw SolverError("simultaneous_diagonalize: eigensolver failed on P");
  rvec pv = es.eigenvalues();
  cmat v = es.eigenvectors();

  // Within each cluster of nearly equal p the basis is only determined up
  // to unitary mixing; rotate each cluster to diagonalize W there.
  const double gap = cluster_gap * su_norm(p);
  int b = 0;
  while (b < n) {
    int e = b + 1;
    while (e < n && pv[e] - pv[e - 1] <= gap) ++e;
    if (e - b > 1) {
      const auto vc = v.middleCols(b, e - b);
      Eigen::SelfAdjointEigenSolver<cmat> ec(cmat(vc.adjoint() * hw * vc));
      if (ec.info() != Eigen::Success)
        throw SolverError(
            "simultaneous_diagonalize: eigensolver failed on a W cluster");
      v.middleCols(b, e - b) = vc * ec.eigenvectors();
    }
    b = e;
  }

  spec.p = pv;
  spec.Lambda = v;
  spec.w.resize(n);
  const cmat dw = v.adjoint() * hw * v;
  for (int j = 0; j < n; ++j) spec.w[j] = dw(j, j).real();

  const double rp =
      joint_residual(spec.Lambda.adjoint() * p * spec.Lambda, spec.p);
  const double rw =
      joint_residual(spec.Lambda.adjoint() * w * spec.Lambda, spec.w);
  if (rp > offdiag_tol * (1.0 + su_norm(p)) ||
      rw > offdiag_tol * (1.0 + su_norm(w)))
    throw SolverError(
        "simultaneous_diagonalize: joint off-diagonal residual above "
        "tolerance");
  return spec;
}

double diagonal_pairing(const CommonSpectrum& spec, const cmat& x) {
  const int n = spec.n;
  if (x.rows() != n || x.cols() != n)
    throw InputError("diagonal_pairing: dimension mismatch");
  const cmat y = spec.Lambda.adjoint() * x * spec.Lambda;
  // Each ordered pair (r, c), r != c, sits on one matrix diagonal; the
  // main diagonal contributes nothing since its spectral differences
  // vanish.
  double total = 0.0;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      total += std::norm(y(r, c)) * (spec.p[c] - spec.p[r]) *
               (spec.w[c] - spec.w[r]);
    }
  return total / n;
}

RatioExtrema ratio_extrema(const CommonSpectrum& spec, double degeneracy_tol) {
  RatioExtrema out;
  const int n = spec.n;
  const double tp =
      n > 0 ? degeneracy_tol * spec.p.cwiseAbs().maxCoeff() : 0.0;
  const double tw =
      n > 0 ? degeneracy_tol * spec.w.cwiseAbs().maxCoeff() : 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const double dp = spec.p[k] - spec.p[j];
      const double dw = spec.w[k] - spec.w[j];
      const bool zp = std::abs(dp) <= tp;
      const bool zw = std::abs(dw) <= tw;
      if (zp && zw) continue;  // 0/0, excluded
      if (zp) {
        out.degenerate_p = true;
        continue;
      }
      if (zw) {
        out.degenerate_w = true;
        continue;
      }
      out.L = std::min(out.L, dw / dp);
      out.c = std::min(out.c, dp / dw);
      out.C = std::max(out.C, dp / dw);
    }
  if (out.degenerate_p) out.L = -kInf;
  if (out.degenerate_w) {
    out.c = -kInf;
    out.C = kInf;
  }
  return out;
}

}  // namespace zeitlin
