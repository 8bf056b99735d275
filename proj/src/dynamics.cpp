#include "zeitlin/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <complex>
#include <string>

#include "zeitlin/errors.hpp"
#include "zeitlin/rng.hpp"

namespace zeitlin {

namespace {

const std::complex<double> kMinusI(0.0, -1.0);

// A = -(h / (2 hbar)) P with Delta P = traceless part of wt.  The midpoint
// iterate drifts off the traceless subspace at O(h^2); the solve only ever
// sees its projection, matching the kernel convention of poisson_solve.
cmat coefficient_matrix(const SpinBasis& basis, const cmat& wt, double h) {
  return (-0.5 * h / basis.hbar()) * poisson_solve(basis, su_part(wt));
}

}  // namespace

cmat vector_field(const SpinBasis& basis, const cmat& w) {
  require_su(w, 1e-8, "vector_field");
  const cmat p = poisson_solve(basis, su_part(w));
  return (-1.0 / basis.hbar()) * bracket(p, w);
}

cmat isomp_step(const SpinBasis& basis, const cmat& w, double h,
                StepStats* stats, double inner_tol, int max_inner) {
  require_su(w, 1e-8, "isomp_step");
  if (h == 0.0 || !std::isfinite(h)) {
    throw InputError("isomp_step: step size must be nonzero and finite");
  }
  if (max_inner < 1) {
    throw InputError("isomp_step: max_inner must be positive");
  }
  const int n = basis.n();
  const double scale = std::max(1.0, su_norm(w));

  cmat wt = w + (0.5 * h) * vector_field(basis, w);
  cmat a;
  StepStats local;
  bool converged = false;
  for (int it = 1; it <= max_inner; ++it) {
    a = coefficient_matrix(basis, wt, h);
    const cmat awt = a * wt;
    // Defect of wt in  w = wt - [A, wt] - A wt A;  the fixed-point update
    // adds it verbatim.
    const cmat update = w + awt - wt * a + awt * a - wt;
    const double res = su_norm(update);
    local.inner_iterations = it;
    local.inner_residual = res;
    if (res <= inner_tol * scale) {
      converged = true;
      break;
    }
    if (it > 20) {
      // Quasi-Newton correction with A frozen: solve (I-A) d (I+A) = update.
      local.newton_fallback = true;
      const cmat im = cmat::Identity(n, n) - a;
      const cmat ip = cmat::Identity(n, n) + a;
      wt += im.partialPivLu().solve(update) * ip.partialPivLu().inverse();
    } else {
      wt += update;
    }
  }
  if (!converged) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", inner_tol);
    throw IntegratorError(
        std::string("isomp_step: inner iteration did not reach tolerance ") +
        buf + " in " + std::to_string(max_inner) +
        " sweeps; reduce the step size h");
  }
  const cmat awt = a * wt;
  if (stats != nullptr) *stats = local;
  return su_part(cmat(wt + awt - wt * a - awt * a));
}

TrajectoryRecord evolve(const SpinBasis& basis, const cmat& w_init, double h,
                        double T, const MonitorConfig& config,
                        const cmat* w_ref, const MonitorObserver& observer,
                        double inner_tol, int max_inner) {
  require_su(w_init, 1e-8, "evolve");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw InputError("evolve: step size h must be positive");
  }
  if (!(T >= h)) {
    throw InputError("evolve: final time T must cover at least one step");
  }
  if (config.casimir_max < 2) {
    throw InputError("evolve: casimir_max must be at least 2");
  }
  if (config.snapshot_stride < 0) {
    throw InputError("evolve: snapshot_stride must be nonnegative");
  }
  const int n = basis.n();
  if (w_ref != nullptr && (w_ref->rows() != n || w_ref->cols() != n)) {
    throw InputError("evolve: reference state has wrong dimensions");
  }

  const int steps = static_cast<int>(std::ceil(T / h - 1e-9));
  const cmat ref = w_ref != nullptr ? *w_ref : w_init;
  const int kmax = config.casimir_max;

  TrajectoryRecord rec;
  rec.h = h;
  rec.times.resize(steps + 1);
  rec.energy.resize(steps + 1);
  rec.casimirs.resize(steps + 1, kmax - 1);
  rec.momentum.resize(steps + 1, 3);
  rec.spectra.resize(steps + 1, n);
  rec.spec_drift.resize(steps + 1);
  rec.dist.resize(steps + 1);
  rec.inner_iterations.assign(steps, 0);
  rec.inner_residuals = rvec::Zero(steps);

  Eigen::SelfAdjointEigenSolver<cmat> eig;
  cmat w = w_init;
  const auto fill = [&](int i, double t) {
    rec.times[i] = t;
    rec.energy[i] = hamiltonian(basis, w);
    for (int k = 2; k <= kmax; ++k) rec.casimirs(i, k - 2) = casimir(w, k);
    rec.momentum.row(i) = momentum(basis, w).transpose();
    eig.compute(cmat(kMinusI * w), Eigen::EigenvaluesOnly);
    rec.spectra.row(i) = eig.eigenvalues().transpose();
    rec.spec_drift[i] =
        (rec.spectra.row(i) - rec.spectra.row(0)).cwiseAbs().maxCoeff();
    rec.dist[i] = su_norm(w - ref);
    if (config.snapshot_stride > 0 && i % config.snapshot_stride == 0) {
      rec.snapshots.push_back(w);
      rec.snapshot_steps.push_back(i);
    }
    if (observer) observer(rec, i);
  };

  fill(0, 0.0);
  for (int k = 1; k <= steps; ++k) {
    StepStats st;
    try {
      w = isomp_step(basis, w, h, &st, inner_tol, max_inner);
    } catch (const IntegratorError& e) {
      throw IntegratorError(
          std::string(e.what()) + " (trajectory step " + std::to_string(k) +
              ")",
          k);
    }
    rec.inner_iterations[k - 1] = st.inner_iterations;
    rec.inner_residuals[k - 1] = st.inner_residual;
    fill(k, k * h);
  }
  rec.w_final = w;
  return rec;
}

const char* to_string(PerturbationMode mode) {
  return mode == PerturbationMode::kOrbit ? "ORBIT" : "GENERIC";
}

LyapunovReport lyapunov_experiment(const SpinBasis& basis,
                                   const SteadyState& state, double epsilon,
                                   PerturbationMode mode, std::uint64_t seed,
                                   double h, double T,
                                   const MonitorConfig& config,
                                   const MonitorObserver& observer,
                                   double inner_tol, int max_inner) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InputError("lyapunov_experiment: epsilon must be nonnegative");
  }
  const int n = basis.n();
  if (state.W0.rows() != n || state.W0.cols() != n) {
    throw InputError("lyapunov_experiment: state dimension mismatch");
  }
  cmat x = random_su(n, seed);
  x /= su_norm(x);

  cmat w_start;
  if (mode == PerturbationMode::kOrbit) {
    // exp(eps X) through the spectral decomposition of the Hermitian -iX.
    Eigen::SelfAdjointEigenSolver<cmat> eig(cmat(kMinusI * x));
    cvec phase(n);
    for (int j = 0; j < n; ++j) {
      phase[j] = std::exp(std::complex<double>(0.0, epsilon * eig.eigenvalues()[j]));
    }
    const cmat u =
        eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
    w_start = su_part(cmat(u * state.W0 * u.adjoint()));
  } else {
    w_start = state.W0 + epsilon * x;
  }

  LyapunovReport rep;
  rep.epsilon = epsilon;
  rep.mode = mode;
  rep.seed = seed;
  rep.certificate = certify(basis, state.W0, state.P0);
  rep.record = evolve(basis, w_start, h, T, config, &state.W0, observer,
                      inner_tol, max_inner);
  rep.deviation_series = rep.record.dist;
  rep.max_deviation = rep.deviation_series.maxCoeff();
  return rep;
}

}  // namespace zeitlin
