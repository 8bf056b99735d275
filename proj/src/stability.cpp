#include "zeitlin/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "zeitlin/errors.hpp"
#include "zeitlin/hash.hpp"

namespace zeitlin {

namespace {

constexpr double kTiny = 1e-300;

void require_steady(const SpinBasis& basis, const cmat& w0, const cmat& p0,
                    double tol, const char* what) {
  require_su(w0, 1e-8, what);
  require_su(p0, 1e-8, what);
  if (w0.rows() != basis.n() || p0.rows() != basis.n())
    throw InputError(std::string(what) +
                     ": dimension does not match the basis");
  const double nw = su_norm(w0), np = su_norm(p0);
  const double comm =
      su_norm(bracket(p0, w0)) / std::max(np * nw, kTiny);
  const double lap =
      su_norm(laplacian_apply(basis, p0) - w0) / std::max(nw, kTiny);
  if (comm > tol || lap > tol) {
    std::ostringstream os;
    os << what << ": pair is not steady (commutator residual " << comm
       << ", stream residual " << lap << ", gate " << tol << ")";
    throw InputError(os.str());
  }
}

// Column-major real view of a complex matrix: interleaved re/im doubles.
Eigen::Map<const rvec> flat(const cmat& m) {
  return Eigen::Map<const rvec>(reinterpret_cast<const double*>(m.data()),
                                2 * m.size());
}

cmat unflat(const rvec& v, int n) {
  cmat m(n, n);
  std::copy(v.data(), v.data() + 2 * n * n,
            reinterpret_cast<double*>(m.data()));
  return m;
}

}  // namespace

double quadratic_form_Q(const SpinBasis& basis, const cmat& x, const cmat& w0,
                        const cmat& p0, double steady_tol) {
  require_steady(basis, w0, p0, steady_tol, "quadratic_form_Q");
  require_su(x, 1e-8, "quadratic_form_Q: X");
  const cmat dw = bracket(x, w0);
  if (su_norm(dw) == 0.0) return 0.0;
  return inner(dw, cmat(-poisson_solve(basis, dw))).real() +
         inner(dw, bracket(x, p0)).real();
}

SandwichReport sandwich_check(const SpinBasis& basis, const cmat& x,
                              const cmat& w0, const cmat& p0,
                              const RatioExtrema& ratios,
                              double leakage_tol) {
  require_steady(basis, w0, p0, default_tolerances().steady_pair,
                 "sandwich_check");
  SandwichReport rep;
  if (!std::isfinite(ratios.c) || !std::isfinite(ratios.C)) return rep;
  rep.applicable = true;

  const cmat dw = bracket(x, w0);
  rep.delta_norm = su_norm(dw);
  if (rep.delta_norm == 0.0) {
    rep.refined_upper_applicable = true;
    return rep;  // every bound degenerates to 0 <= 0
  }
  const double n2 = rep.delta_norm * rep.delta_norm;
  const double m = inner(dw, bracket(x, p0)).real();
  rep.lower_slack = m - ratios.c * n2;
  rep.upper_slack = ratios.C * n2 - m;

  const double q =
      inner(dw, cmat(-poisson_solve(basis, dw))).real() + m;
  rep.refined_lower_slack = q - ratios.c * n2;
  rep.p1_leakage =
      su_norm(project_eigenspace_1_matrix(basis, dw)) / rep.delta_norm;
  if (rep.p1_leakage <= leakage_tol) {
    rep.refined_upper_applicable = true;
    rep.refined_upper_slack = (1.0 / 6.0 + ratios.C) * n2 - q;
  }
  return rep;
}

OrbitHessian orbit_hessian(const SpinBasis& basis, const cmat& w0,
                           const cmat& p0, const Tolerances& tol) {
  require_steady(basis, w0, p0, tol.steady_pair, "orbit_hessian");
  const int n = basis.n();
  const int dim = n * n - 1;
  OrbitHessian out;

  const auto e = real_su_basis(n);
  rmat em(2 * n * n, dim), vm(2 * n * n, dim), pvm(2 * n * n, dim),
      cm(2 * n * n, dim);
  for (int k = 0; k < dim; ++k) {
    em.col(k) = flat(e[k]);
    const cmat v = bracket(e[k], w0);
    vm.col(k) = flat(v);
    pvm.col(k) = flat(cmat(-poisson_solve(basis, v)));
    cm.col(k) = flat(cmat(bracket(e[k], p0)));
  }

  const double inv_n = 1.0 / n;
  rmat phi = inv_n * (em.transpose() * vm);
  rmat b = inv_n * (vm.transpose() * pvm);
  b += (0.5 * inv_n) * (cm.transpose() * vm + vm.transpose() * cm);
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::BDCSVD<rmat> svd(phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const rvec& sv = svd.singularValues();
  const double cutoff =
      sv.size() ? tol.tangent_truncation * sv[0] : 0.0;
  int rank = 0;
  while (rank < sv.size() && sv[rank] > cutoff) ++rank;
  out.tangent_dim = rank;
  if (rank == 0) {
    out.full_spectrum = rvec(0);
    out.constrained_spectrum = rvec(0);
    out.H = rmat(0, 0);
    return out;
  }

  const rmat ur = svd.matrixU().leftCols(rank);
  rmat vs = svd.matrixV().leftCols(rank);
  for (int i = 0; i < rank; ++i) vs.col(i) /= sv[i];

  rmat h = vs.transpose() * b * vs;
  h = 0.5 * (h + h.transpose()).eval();
  out.H = h;
  Eigen::SelfAdjointEigenSolver<rmat> es(h);
  out.full_spectrum = es.eigenvalues();

  out.tangent_basis.reserve(rank);
  out.preimages.reserve(rank);
  const rmat tb = em * ur;
  const rmat pim = em * vs;
  for (int i = 0; i < rank; ++i) {
    out.tangent_basis.push_back(unflat(tb.col(i), n));
    out.preimages.push_back(unflat(pim.col(i), n));
  }

  // Momentum constraint: coordinates of sqrt(3) X_alpha are orthonormal
  // rows, so the singular values of K measure first-eigenspace content of
  // unit tangent vectors.
  rmat k(3, rank);
  const double s3 = std::sqrt(3.0);
  for (int a = 0; a < 3; ++a)
    k.row(a) = (s3 * inv_n) * (flat(basis.X(a)).transpose() * em) * ur;
  Eigen::JacobiSVD<rmat> ksvd(k, Eigen::ComputeFullV);
  out.p1_leakage = ksvd.singularValues().size()
                       ? ksvd.singularValues()[0]
                       : 0.0;
  int krank = 0;
  const rvec& ksv = ksvd.singularValues();
  while (krank < ksv.size() && ksv[krank] > 1e-12 * std::max(ksv[0], kTiny))
    ++krank;
  out.constrained_dim = rank - krank;
  if (out.constrained_dim > 0) {
    const rmat null = ksvd.matrixV().rightCols(out.constrained_dim);
    rmat hc = null.transpose() * h * null;
    hc = 0.5 * (hc + hc.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<rmat> ec(hc);
    out.constrained_spectrum = ec.eigenvalues();
  } else {
    out.constrained_spectrum = rvec(0);
  }
  return out;
}

rvec orbit_hessian_spectrum(const SpinBasis& basis, const cmat& w0,
                            const cmat& p0, bool constrain_momentum,
                            const Tolerances& tol) {
  OrbitHessian oh = orbit_hessian(basis, w0, p0, tol);
  return constrain_momentum ? oh.constrained_spectrum : oh.full_spectrum;
}

StabilityCertificate certify(const SpinBasis& basis, const cmat& w0,
                             const cmat& p0, const Tolerances& tol) {
  require_steady(basis, w0, p0, tol.steady_pair, "certify");
  StabilityCertificate cert;
  cert.n = basis.n();
  cert.tolerances = tol;
  cert.w0_hash = matrix_hash(w0);
  cert.p0_hash = matrix_hash(p0);

  const auto spec = simultaneous_diagonalize(w0, p0, tol.steady_pair,
                                             tol.cluster_gap,
                                             tol.joint_offdiag);
  cert.ratios = ratio_extrema(spec, tol.spectrum_degeneracy);

  const bool trivial =
      su_norm(w0) <= tol.trivial_state * (1.0 + su_norm(p0));
  OrbitHessian oh = orbit_hessian(basis, w0, p0, tol);
  cert.hessian_full = oh.full_spectrum;
  cert.hessian_constrained = oh.constrained_spectrum;
  cert.p1_leakage = oh.p1_leakage;

  if (trivial) {
    cert.verdict = Verdict::kTrivial;
  } else if (cert.ratios.L > -6.0 + tol.ratio_margin) {
    cert.verdict = Verdict::kStableByRatio;
  } else {
    cert.verdict = Verdict::kIndeterminate;
  }

  if (cert.verdict == Verdict::kStableByRatio &&
      cert.hessian_constrained.size() > 0) {
    if (cert.ratios.C < -1.0 / 6.0 - tol.ratio_margin) {
      cert.crosscheck_applicable = true;
      const double top = cert.hessian_constrained.maxCoeff();
      cert.crosscheck_passed = top <= tol.definiteness;
      cert.crosscheck_note =
          "C < -1/6: constrained spectrum must be negative definite";
    } else if (cert.ratios.c > tol.ratio_margin) {
      cert.crosscheck_applicable = true;
      const double bottom = cert.hessian_constrained.minCoeff();
      cert.crosscheck_passed = bottom >= -tol.definiteness;
      cert.crosscheck_note =
          "c > 0: constrained spectrum must be positive definite";
    }
  }
  return cert;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kStableByRatio: return "STABLE_BY_RATIO";
    case Verdict::kIndeterminate: return "INDETERMINATE";
    case Verdict::kTrivial: return "TRIVIAL";
  }
  return "UNKNOWN";
}

}  // namespace zeitlin
