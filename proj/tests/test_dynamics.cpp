#include <doctest.h>

#include <cmath>
#include <vector>

#include "zeitlin/algebra.hpp"
#include "zeitlin/dynamics.hpp"
#include "zeitlin/errors.hpp"
#include "zeitlin/rng.hpp"
#include "zeitlin/steady.hpp"

using namespace zeitlin;

namespace {
rvec centered_random(int n, Rng& rng) {
  rvec v(n);
  for (int j = 0; j < n; ++j) v[j] = rng.normal();
  v.array() -= v.mean();
  return v;
}
}  // namespace

TEST_CASE("vector field") {
  SpinBasis b(8);
  Rng rng(31);

  SUBCASE("vanishes on steady states and zero") {
    cmat z = cmat::Zero(8, 8);
    CHECK(su_norm(vector_field(b, z)) == 0.0);
    auto st = zonal_state(b, centered_random(8, rng));
    CHECK(su_norm(vector_field(b, st.W0)) <= 1e-10);
    rvec c = rvec::Zero(5);
    c[1] = 0.7;
    c[3] = -0.4;
    auto se = eigen_state(b, 2, c);
    CHECK(su_norm(vector_field(b, se.W0)) <= 1e-10);
  }
  SUBCASE("is tangent to the energy level set") {
    for (int rep = 0; rep < 5; ++rep) {
      cmat w = random_su(8, rng);
      const cmat p = poisson_solve(b, w);
      CHECK(std::abs(inner(vector_field(b, w), p).real()) <= 1e-12);
    }
  }
  SUBCASE("output stays in the algebra") {
    cmat v = vector_field(b, random_su(8, rng));
    CHECK(is_skew_hermitian(v, 1e-12));
    CHECK(is_traceless(v, 1e-12));
  }
}

TEST_CASE("midpoint step") {
  Rng rng(32);

  SUBCASE("fixes steady states") {
    SpinBasis b(6);
    rvec c = rvec::Zero(3);
    c[1] = 1.0;
    auto st = eigen_state(b, 1, c);
    StepStats stats;
    cmat w1 = isomp_step(b, st.W0, 0.3, &stats);
    CHECK(su_norm(w1 - st.W0) <= 1e-12);
    CHECK(stats.inner_residual <= 1e-13 * (1.0 + su_norm(st.W0)));
  }
  SUBCASE("is exactly time reversible") {
    SpinBasis b(8);
    cmat w = random_su(8, rng);
    cmat fwd = isomp_step(b, w, 0.05);
    cmat back = isomp_step(b, fwd, -0.05);
    CHECK(su_norm(back - w) <= 1e-12 * (1.0 + su_norm(w)));
  }
  SUBCASE("preserves the sorted spectrum each step") {
    SpinBasis b(16);
    cmat w = random_su(16, rng);
    w *= 0.5 / su_norm(w);
    cmat w1 = isomp_step(b, w, 0.1);
    Eigen::SelfAdjointEigenSolver<cmat> e0(cmat(std::complex<double>(0, -1) * w));
    Eigen::SelfAdjointEigenSolver<cmat> e1(cmat(std::complex<double>(0, -1) * w1));
    CHECK((e0.eigenvalues() - e1.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(is_skew_hermitian(w1, 1e-13));
    CHECK(is_traceless(w1, 1e-13));
  }
  SUBCASE("converges to the vector field at first order") {
    SpinBasis b(8);
    cmat w = random_su(8, rng);
    const cmat v = vector_field(b, w);
    std::vector<double> err;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
      cmat w1 = isomp_step(b, w, h);
      err.push_back(su_norm(cmat((w1 - w) / h - v)));
    }
    CHECK(std::log2(err[0] / err[1]) >= 0.9);
    CHECK(std::log2(err[1] / err[2]) >= 0.9);
  }
  SUBCASE("rejects bad arguments and reports nonconvergence") {
    SpinBasis b(6);
    cmat w = random_su(6, rng);
    CHECK_THROWS_AS(isomp_step(b, w, 0.0), InputError);
    CHECK_THROWS_AS(isomp_step(b, w, 0.1, nullptr, 1e-13, 0), InputError);
    CHECK_THROWS_AS(isomp_step(b, w, 0.1, nullptr, 1e-16, 1),
                    IntegratorError);
  }
}

TEST_CASE("trajectory monitoring") {
  SpinBasis b(6);
  Rng rng(33);

  SUBCASE("steady trajectories stay put") {
    rvec c = rvec::Zero(3);
    c[1] = 1.0;
    auto st = eigen_state(b, 1, c);
    auto rec = evolve(b, st.W0, 0.1, 2.0);
    CHECK(rec.times.size() == 21);
    CHECK(rec.dist.maxCoeff() <= 100.0 * 1e-13 * 20);
  }
  SUBCASE("monitors are shaped and conserved on a short random run") {
    cmat w = random_su(6, rng);
    MonitorConfig cfg;
    cfg.snapshot_stride = 5;
    auto rec = evolve(b, w, 0.05, 1.0, cfg);
    REQUIRE(rec.times.size() == 21);
    for (int i = 1; i < 21; ++i) {
      CHECK(rec.times[i] == doctest::Approx(0.05 * i).epsilon(1e-15));
    }
    CHECK(rec.casimirs.cols() == 4);
    CHECK(rec.spec_drift.maxCoeff() <= 1e-11);
    for (int col = 0; col < 4; ++col) {
      const double base = std::max(std::abs(rec.casimirs(0, col)),
                                   std::pow(rec.casimirs(0, 0), (col + 2) / 2.0));
      CHECK((rec.casimirs.col(col).array() - rec.casimirs(0, col))
                .abs()
                .maxCoeff() <= 1e-10 * base);
    }
    CHECK(std::abs(rec.energy.maxCoeff() - rec.energy.minCoeff()) <= 1e-4);
    CHECK((rec.momentum.rowwise() - rec.momentum.row(0))
              .cwiseAbs()
              .maxCoeff() <= 1e-8);
    CHECK(rec.dist[0] == 0.0);
    REQUIRE(rec.snapshots.size() == 5);
    CHECK(rec.snapshot_steps == std::vector<int>({0, 5, 10, 15, 20}));
    CHECK(su_norm(rec.snapshots.back() - rec.w_final) == 0.0);
    CHECK(rec.inner_iterations.size() == 20);
    for (int it : rec.inner_iterations) CHECK(it >= 1);
  }
  SUBCASE("observer streams every row in order") {
    cmat w = random_su(6, rng);
    std::vector<int> seen;
    auto rec = evolve(b, w, 0.1, 0.5, {}, nullptr,
                      [&](const TrajectoryRecord&, int i) { seen.push_back(i); });
    CHECK(seen == std::vector<int>({0, 1, 2, 3, 4, 5}));
  }
  SUBCASE("validates arguments") {
    cmat w = random_su(6, rng);
    CHECK_THROWS_AS(evolve(b, w, -0.1, 1.0), InputError);
    CHECK_THROWS_AS(evolve(b, w, 0.5, 0.2), InputError);
    MonitorConfig bad;
    bad.casimir_max = 1;
    CHECK_THROWS_AS(evolve(b, w, 0.1, 1.0, bad), InputError);
  }
  SUBCASE("step failures carry the step index") {
    cmat w = random_su(6, rng);
    try {
      evolve(b, w, 0.1, 1.0, {}, nullptr, {}, 1e-16, 1);
      FAIL("expected nonconvergence");
    } catch (const IntegratorError& e) {
      CHECK(e.step == 1);
    }
  }
}

TEST_CASE("perturbation experiments") {
  SpinBasis b(6);
  rvec c = rvec::Zero(3);
  c[1] = 1.0;
  auto st = eigen_state(b, 1, c);

  SUBCASE("orbit mode preserves every recorded Casimir at t = 0") {
    auto rep = lyapunov_experiment(b, st, 1e-2, PerturbationMode::kOrbit, 7,
                                   0.1, 0.5);
    for (int k = 2; k <= 5; ++k) {
      CHECK(std::abs(rep.record.casimirs(0, k - 2) - casimir(st.W0, k)) <=
            1e-12);
    }
    CHECK(rep.certificate.verdict == Verdict::kStableByRatio);
    CHECK(rep.max_deviation == rep.deviation_series.maxCoeff());
  }
  SUBCASE("generic mode starts at distance epsilon exactly") {
    auto rep = lyapunov_experiment(b, st, 3e-3, PerturbationMode::kGeneric, 7,
                                   0.1, 0.5);
    CHECK(rep.deviation_series[0] == doctest::Approx(3e-3).epsilon(1e-13));
  }
  SUBCASE("zero amplitude reduces to the steady trajectory") {
    auto rep = lyapunov_experiment(b, st, 0.0, PerturbationMode::kOrbit, 7,
                                   0.1, 2.0);
    CHECK(rep.max_deviation <= 100.0 * 1e-13 * 20);
  }
  SUBCASE("runs are deterministic in the seed") {
    auto r1 = lyapunov_experiment(b, st, 1e-3, PerturbationMode::kGeneric, 99,
                                  0.1, 0.5);
    auto r2 = lyapunov_experiment(b, st, 1e-3, PerturbationMode::kGeneric, 99,
                                  0.1, 0.5);
    CHECK(r1.max_deviation == r2.max_deviation);
    CHECK(su_norm(r1.record.w_final - r2.record.w_final) == 0.0);
  }
  SUBCASE("mode names") {
    CHECK(std::string(to_string(PerturbationMode::kOrbit)) == "ORBIT");
    CHECK(std::string(to_string(PerturbationMode::kGeneric)) == "GENERIC");
  }
}
