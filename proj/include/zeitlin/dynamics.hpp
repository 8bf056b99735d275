#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zeitlin/algebra.hpp"
#include "zeitlin/stability.hpp"
#include "zeitlin/steady.hpp"
#include "zeitlin/tolerances.hpp"

namespace zeitlin {

// Right-hand side of the vorticity flow: -(1/hbar) [poisson_solve(w), w].
cmat vector_field(const SpinBasis& basis, const cmat& w);

struct StepStats {
  int inner_iterations = 0;
  double inner_residual = 0.0;
  bool newton_fallback = false;
};

// One step of the isospectral midpoint map.  With A = -(h / (2 hbar))
// poisson_solve(wt) the midpoint wt solves w = wt - [A, wt] - A wt A and
// the step returns wt + [A, wt] - A wt A, a conjugation of w by a Cayley
// unitary.  The sorted spectrum of -iw is preserved to the inner tolerance,
// and the map with -h inverts the map with h.
cmat isomp_step(const SpinBasis& basis, const cmat& w, double h,
                StepStats* stats = nullptr,
                double inner_tol = default_tolerances().integrator_inner,
                int max_inner = 200);

struct MonitorConfig {
  int casimir_max = 5;      // record C_2 .. C_casimir_max
  int snapshot_stride = 0;  // capture every k-th state; 0 disables
};

struct TrajectoryRecord {
  double h = 0.0;
  rvec times;  // row 0 is the initial state at t = 0
  rvec energy;
  rmat casimirs;  // column k-2 holds C_k
  rmat momentum;  // columns L1, L2, L3
  rmat spectra;   // ascending spectrum of -iW per row
  rvec spec_drift;
  rvec dist;  // distance to the reference state (default: initial state)
  std::vector<int> inner_iterations;  // one entry per step
  rvec inner_residuals;
  std::vector<cmat> snapshots;
  std::vector<int> snapshot_steps;
  cmat w_final;
};

// Invoked after row i of the record has been filled (i = 0 included), so
// rows can be streamed out before the run finishes or aborts.
using MonitorObserver = std::function<void(const TrajectoryRecord&, int)>;

TrajectoryRecord evolve(const SpinBasis& basis, const cmat& w_init, double h,
                        double T, const MonitorConfig& config = {},
                        const cmat* w_ref = nullptr,
                        const MonitorObserver& observer = {},
                        double inner_tol = default_tolerances().integrator_inner,
                        int max_inner = 200);

enum class PerturbationMode {
  kOrbit,    // conjugate by exp(eps X / |X|): Casimirs untouched
  kGeneric,  // add eps X / |X|: leaves the coadjoint orbit
};

const char* to_string(PerturbationMode mode);

struct LyapunovReport {
  double epsilon = 0.0;
  PerturbationMode mode = PerturbationMode::kOrbit;
  std::uint64_t seed = 0;
  double max_deviation = 0.0;
  rvec deviation_series;  // su_norm distance to the unperturbed state
  StabilityCertificate certificate;
  TrajectoryRecord record;
};

LyapunovReport lyapunov_experiment(
    const SpinBasis& basis, const SteadyState& state, double epsilon,
    PerturbationMode mode, std::uint64_t seed, double h, double T,
    const MonitorConfig& config = {}, const MonitorObserver& observer = {},
    double inner_tol = default_tolerances().integrator_inner,
    int max_inner = 200);

}  // namespace zeitlin
