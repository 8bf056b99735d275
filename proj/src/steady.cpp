#include "zeitlin/steady.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <sstream>

#include "zeitlin/errors.hpp"

namespace zeitlin {

namespace {

constexpr double kTiny = 1e-300;
const std::complex<double> kI(0.0, 1.0);

double offdiag_rel(const cmat& a) {
  cmat od = a;
  od.diagonal().setZero();
  return od.norm() / std::max(a.norm(), kTiny);
}

}  // namespace

SteadyState make_steady_state(const SpinBasis& basis, const cmat& w0,
                              const cmat& p0, Provenance provenance,
                              int eigen_l, std::string detail) {
  require_su(w0, 1e-8, "steady state W0");
  require_su(p0, 1e-8, "steady state P0");
  if (w0.rows() != basis.n() || p0.rows() != basis.n())
    throw InputError("steady state: dimension does not match the basis");

  SteadyState st;
  st.W0 = w0;
  st.P0 = p0;
  st.provenance = provenance;
  st.eigen_l = eigen_l;
  st.detail = std::move(detail);

  const double nw = su_norm(w0), np = su_norm(p0);
  st.commutator_residual =
      su_norm(bracket(p0, w0)) / std::max(np * nw, kTiny);
  st.laplacian_residual =
      su_norm(laplacian_apply(basis, p0) - w0) / std::max(nw, kTiny);
  if (st.commutator_residual > 1e-10)
    throw InputError("steady state: pair does not commute (residual " +
                     std::to_string(st.commutator_residual) + ")");
  if (st.laplacian_residual > 1e-10)
    throw InputError(
        "steady state: stream matrix does not reproduce the vorticity "
        "(residual " +
        std::to_string(st.laplacian_residual) + ")");
  st.spectrum =
      simultaneous_diagonalize(w0, p0, default_tolerances().steady_pair);
  return st;
}

SteadyState zonal_state(const SpinBasis& basis, const rvec& d) {
  const int n = basis.n();
  if (d.size() != n) throw InputError("zonal_state: vector length != n");
  const double scale = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  if (std::abs(d.sum()) > 1e-12 * n * (1.0 + scale))
    throw InputError("zonal_state: diagonal must sum to zero");
  rvec dc = d.array() - d.mean();
  cmat p0 = cmat::Zero(n, n);
  for (int j = 0; j < n; ++j) p0(j, j) = kI * dc[j];
  return make_steady_state(basis, laplacian_apply(basis, p0), p0,
                           Provenance::kZonal);
}

SteadyState eigen_state(const SpinBasis& basis, int l, const rvec& coeffs) {
  const int n = basis.n();
  if (l < 1 || l > n - 1)
    throw InputError("eigen_state: l must lie in 1..n-1");
  if (coeffs.size() != 2 * l + 1)
    throw InputError("eigen_state: expected 2l+1 coefficients");

  auto eb = eigenbasis_build(basis, l);
  const int base = l * l - 1;  // entries for this l sit at base + (m + l)
  cmat p0 = cmat::Zero(n, n);
  p0 += coeffs[l] * eb[base + l].T;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int m = 1; m <= l; ++m) {
    const std::complex<double> z =
        inv_sqrt2 * std::complex<double>(coeffs[l + m], coeffs[l - m]);
    p0 += z * eb[base + l + m].T + std::conj(z) * eb[base + l - m].T;
  }
  p0 = su_part(p0);
  const double ll = static_cast<double>(l) * (l + 1);
  return make_steady_state(basis, cmat(-ll * p0), p0, Provenance::kEigenstate,
                           l);
}

double polyval(const rvec& coeffs, double x) {
  double v = 0.0;
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
    v = v * x + coeffs[k];
  return v;
}

rvec polyder(const rvec& coeffs) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg < 1) return rvec::Zero(1);
  rvec out(deg);
  for (int k = 1; k <= deg; ++k) out[k - 1] = k * coeffs[k];
  return out;
}

std::string poly_descriptor(const rvec& coeffs) {
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k] == 0.0) continue;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", std::abs(coeffs[k]));
    if (first) {
      if (coeffs[k] < 0) os << "-";
      first = false;
    } else {
      os << (coeffs[k] < 0 ? " - " : " + ");
    }
    os << buf;
    if (k == 1) os << "*x";
    if (k > 1) os << "*x^" << k;
  }
  if (first) os << "0";
  return os.str();
}

SteadyState newton_functional_state(const SpinBasis& basis,
                                    const rvec& f_coeffs, const rvec& d_init,
                                    int max_iter, double tol) {
  const int n = basis.n();
  if (d_init.size() != n)
    throw InputError("newton_functional_state: vector length != n");
  const double scale = d_init.cwiseAbs().maxCoeff();
  if (std::abs(d_init.sum()) > 1e-10 * n * (1.0 + scale))
    throw InputError("newton_functional_state: initial diagonal must sum to zero");
  if (max_iter < 1)
    throw InputError("newton_functional_state: max_iter must be positive");

  // Reduced coordinates: d = Z y over the nonzero Laplace modes of the
  // main diagonal.  The constant kernel direction carries the trace and is
  // excluded, which realizes the traceless projection of the residual.
  const auto& blk = basis.block(0);
  const rmat z = blk.vecs.leftCols(n - 1);
  const rvec lam = blk.vals.head(n - 1);
  const rvec fp_coeffs = polyder(f_coeffs);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));

  rvec y = z.transpose() * rvec(d_init.array() - d_init.mean());
  double best = std::numeric_limits<double>::infinity();
  int stall = 0;
  bool singular_seen = false;
  bool converged = false;
  double res = 0.0;

  for (int it = 0; it <= max_iter; ++it) {
    const rvec d = z * y;
    rvec fd(n), fpd(n);
    for (int j = 0; j < n; ++j) {
      fd[j] = polyval(f_coeffs, d[j]);
      fpd[j] = polyval(fp_coeffs, d[j]);
    }
    const rvec r = lam.cwiseProduct(y) - z.transpose() * fd;
    res = r.norm() * inv_sqrt_n;
    if (!std::isfinite(res))
      throw SolverError("newton_functional_state: residual is not finite");
    if (res <= tol) {
      converged = true;
      break;
    }
    if (res >= best * (1.0 - 1e-9)) {
      if (++stall >= 5)
        throw SolverError(
            singular_seen
                ? "newton_functional_state: stalled near a singular Jacobian "
                  "(f' hits a Laplace eigenvalue); perturb d_init"
                : "newton_functional_state: stalled at residual " +
                      std::to_string(res));
    } else {
      stall = 0;
    }
    best = std::min(best, res);
    if (it == max_iter) break;

    rmat jac = rmat(lam.asDiagonal()) - z.transpose() * fpd.asDiagonal() * z;
    Eigen::JacobiSVD<rmat> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const rvec& sv = svd.singularValues();
    const double cutoff = 1e-12 * sv[0];
    rvec inv = rvec::Zero(sv.size());
    int rank = 0;
    for (int k = 0; k < sv.size(); ++k)
      if (sv[k] > cutoff) {
        inv[k] = 1.0 / sv[k];
        ++rank;
      }
    if (rank < sv.size()) singular_seen = true;
    y -= svd.matrixV() *
         (inv.asDiagonal() * (svd.matrixU().transpose() * r));
  }

  if (!converged)
    throw SolverError(
        "newton_functional_state: no convergence after " +
        std::to_string(max_iter) + " iterations; last residual " +
        std::to_string(res) +
        (singular_seen ? " (singular Jacobian encountered; perturb d_init)"
                       : ""));

  rvec d = z * y;
  d.array() -= d.mean();
  cmat p0 = cmat::Zero(n, n);
  for (int j = 0; j < n; ++j) p0(j, j) = kI * d[j];
  return make_steady_state(basis, laplacian_apply(basis, p0), p0,
                           Provenance::kNewton, 0, poly_descriptor(f_coeffs));
}

cmat so3_rotate(const SpinBasis& basis, const Eigen::Vector3d& rho,
                const cmat& w) {
  const int n = basis.n();
  if (w.rows() != n || w.cols() != n)
    throw InputError("so3_rotate: dimension does not match the basis");
  if (rho.norm() == 0.0) return w;
  cmat a = rho[0] * basis.X(0) + rho[1] * basis.X(1) + rho[2] * basis.X(2);
  cmat h = -kI * a;
  h = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<cmat> es(h);
  if (es.info() != Eigen::Success)
    throw SolverError("so3_rotate: eigensolver failed");
  cvec phase(n);
  for (int j = 0; j < n; ++j)
    phase[j] = std::exp(kI * es.eigenvalues()[j]);
  const cmat f =
      es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  return f * w * f.adjoint();
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& rho) {
  const double theta = rho.norm();
  if (theta < 1e-300) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(theta, rho / theta).toRotationMatrix();
}

Alignment align_first_eigenspace(const SpinBasis& basis, const cmat& w) {
  Alignment out;
  out.aligned = w;
  const Eigen::Vector3d a = project_eigenspace_1(basis, w);
  const double na = a.norm();
  if (na <= 1e-13 * su_norm(w) || na == 0.0) return out;

  const Eigen::Vector3d ah = a / na;
  const double s = std::hypot(ah[0], ah[1]);
  Eigen::Vector3d axis;
  double theta;
  if (s <= 1e-14) {
    if (ah[2] > 0.0) return out;  // already on the third axis
    axis = Eigen::Vector3d::UnitX();  // antipodal: flip about the first axis
    theta = M_PI;
  } else {
    axis = Eigen::Vector3d(ah[1] / s, -ah[0] / s, 0.0);
    theta = std::atan2(s, ah[2]);
  }
  // The group action rotates momenta by exp(hbar hat(rho)).
  out.rho = (theta / basis.hbar()) * axis;
  out.aligned = so3_rotate(basis, out.rho, w);

  const Eigen::Vector3d check = project_eigenspace_1(basis, out.aligned);
  if (std::hypot(check[0], check[1]) > 1e-10 * na)
    throw SolverError(
        "align_first_eigenspace: residual transverse component after "
        "rotation");
  return out;
}

RigidityReport rigidity_report(const SpinBasis& basis, const SteadyState& state,
                               double residual_tol, double margin) {
  RigidityReport rep;
  rep.norm_W0 = su_norm(state.W0);
  const auto re = ratio_extrema(state.spectrum);
  rep.L = re.L;

  const auto x3_rel = [&](const cmat& m) {
    return su_norm(bracket(m, basis.X(2))) /
           std::max(rep.norm_W0 * su_norm(basis.X(2)), kTiny);
  };

  if (re.L > -2.0 + margin) {
    rep.offdiag_residual = offdiag_rel(state.W0);
    rep.x3_commutator_residual = x3_rel(state.W0);
    rep.conclusion =
        rep.norm_W0 <= residual_tol * (1.0 + su_norm(state.P0))
            ? RigidityConclusion::kZeroConfirmed
            : RigidityConclusion::kViolation;
  } else if (re.L > -6.0 + margin) {
    const Alignment al = align_first_eigenspace(basis, state.W0);
    rep.alignment_rotation = al.rho;
    rep.offdiag_residual = offdiag_rel(al.aligned);
    rep.x3_commutator_residual = x3_rel(al.aligned);
    rep.conclusion = rep.offdiag_residual <= residual_tol
                         ? RigidityConclusion::kDiagonalConfirmed
                         : RigidityConclusion::kViolation;
  } else {
    rep.offdiag_residual = offdiag_rel(state.W0);
    rep.x3_commutator_residual = x3_rel(state.W0);
    rep.conclusion = RigidityConclusion::kNotApplicable;
  }
  return rep;
}

const char* to_string(RigidityConclusion c) {
  switch (c) {
    case RigidityConclusion::kDiagonalConfirmed: return "DIAGONAL_CONFIRMED";
    case RigidityConclusion::kZeroConfirmed: return "ZERO_CONFIRMED";
    case RigidityConclusion::kNotApplicable: return "NOT_APPLICABLE";
    case RigidityConclusion::kViolation: return "VIOLATION";
  }
  return "UNKNOWN";
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kZonal: return "ZONAL";
    case Provenance::kEigenstate: return "EIGENSTATE";
    case Provenance::kNewton: return "NEWTON";
    case Provenance::kLoaded: return "LOADED";
  }
  return "UNKNOWN";
}

}  // namespace zeitlin
