#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "zeitlin/algebra.hpp"
#include "zeitlin/errors.hpp"
#include "zeitlin/rng.hpp"
#include "zeitlin/stability.hpp"
#include "zeitlin/steady.hpp"

using namespace zeitlin;

namespace {
const std::complex<double> I1(0.0, 1.0);

rvec centered_random(int n, Rng& rng) {
  rvec v(n);
  for (int j = 0; j < n; ++j) v[j] = rng.normal();
  v.array() -= v.mean();
  return v;
}

// Removes the component of x that produces first-eigenspace content in
// [x, w0]: <X_alpha, [x, w0]> = <[w0, X_alpha], x>, so it suffices to
// orthogonalize against the three matrices [w0, X_alpha].
cmat strip_p1_image(const SpinBasis& b, const cmat& w0, const cmat& x) {
  Eigen::Matrix3d gram;
  Eigen::Vector3d rhs;
  cmat g[3];
  for (int a = 0; a < 3; ++a) g[a] = bracket(w0, b.X(a));
  for (int a = 0; a < 3; ++a) {
    rhs[a] = inner(g[a], x).real();
    for (int c = 0; c < 3; ++c) gram(a, c) = inner(g[a], g[c]).real();
  }
  const Eigen::Vector3d beta =
      gram.completeOrthogonalDecomposition().solve(rhs);
  cmat out = x;
  for (int a = 0; a < 3; ++a) out -= beta[a] * g[a];
  return out;
}
}  // namespace

TEST_CASE("quadratic form basics") {
  SpinBasis b(8);
  const cmat w0 = -2.0 * b.X(2), p0 = b.X(2);
  Rng rng(11);

  SUBCASE("commuting directions give zero") {
    CHECK(quadratic_form_Q(b, w0, w0, p0) == 0.0);
    cmat s = cmat::Zero(8, 8);
    for (int j = 0; j < 8; ++j) s(j, j) = I1 * (3.5 - j);
    CHECK(quadratic_form_Q(b, su_part(s), w0, p0) == 0.0);
  }
  SUBCASE("zero state annihilates the form") {
    cmat z = cmat::Zero(8, 8);
    CHECK(quadratic_form_Q(b, random_su(8, rng), z, z) == 0.0);
  }
  SUBCASE("first spin pair closed form") {
    for (int rep = 0; rep < 5; ++rep) {
      cmat x = random_su(8, rng);
      const cmat dw = bracket(x, w0);
      const double expect =
          inner(dw, cmat(-poisson_solve(b, dw))).real() -
          0.5 * su_norm(dw) * su_norm(dw);
      CHECK(quadratic_form_Q(b, x, w0, p0) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
  }
  SUBCASE("non-steady pairs are rejected with a residual report") {
    CHECK_THROWS_AS(quadratic_form_Q(b, random_su(8, rng), b.X(2), b.X(2)),
                    InputError);
  }
  SUBCASE("stabilizer directions do not change the value") {
    auto st = zonal_state(b, centered_random(8, rng));
    for (int rep = 0; rep < 5; ++rep) {
      cmat x = random_su(8, rng);
      cmat s = cmat::Zero(8, 8);
      for (int j = 0; j < 8; ++j) s(j, j) = I1 * rng.normal();
      s = su_part(s);  // diagonal, commutes with the diagonal W0
      const double q1 = quadratic_form_Q(b, x, st.W0, st.P0);
      const double q2 = quadratic_form_Q(b, cmat(x + s), st.W0, st.P0);
      CHECK(std::abs(q1 - q2) <= 1e-10 * (1.0 + std::abs(q1)));
    }
  }
}

TEST_CASE("sandwich bounds") {
  SpinBasis b(16);
  Rng rng(404);

  SUBCASE("linear eigenstate pinches the bounds shut") {
    SpinBasis b5(5);
    const cmat w0 = -2.0 * b5.X(2), p0 = b5.X(2);
    auto spec = simultaneous_diagonalize(w0, p0, 1e-10);
    auto ratios = ratio_extrema(spec);
    for (int rep = 0; rep < 5; ++rep) {
      cmat x = random_su(5, rng);
      auto rep_s = sandwich_check(b5, x, w0, p0, ratios);
      REQUIRE(rep_s.applicable);
      const double scale = rep_s.delta_norm * rep_s.delta_norm;
      CHECK(std::abs(rep_s.lower_slack) <= 1e-12 * (1.0 + scale));
      CHECK(std::abs(rep_s.upper_slack) <= 1e-12 * (1.0 + scale));
    }
  }
  SUBCASE("random zonal state satisfies every applicable bound") {
    auto st = zonal_state(b, centered_random(16, rng));
    auto ratios = ratio_extrema(st.spectrum);
    REQUIRE(std::isfinite(ratios.c));
    REQUIRE(std::isfinite(ratios.C));
    for (int rep = 0; rep < 20; ++rep) {
      cmat x = random_su(16, rng);
      x /= su_norm(x);
      auto r = sandwich_check(b, x, st.W0, st.P0, ratios);
      REQUIRE(r.applicable);
      const double scale = 1.0 + r.delta_norm * r.delta_norm;
      CHECK(r.lower_slack >= -1e-10 * scale);
      CHECK(r.upper_slack >= -1e-10 * scale);
      CHECK(r.refined_lower_slack >= -1e-10 * scale);
    }
  }
  SUBCASE("stripped directions activate the sharpened upper bound") {
    auto st = zonal_state(b, centered_random(16, rng));
    auto ratios = ratio_extrema(st.spectrum);
    for (int rep = 0; rep < 10; ++rep) {
      cmat x = strip_p1_image(b, st.W0, random_su(16, rng));
      auto r = sandwich_check(b, x, st.W0, st.P0, ratios);
      REQUIRE(r.applicable);
      if (r.delta_norm == 0.0) continue;
      CHECK(r.p1_leakage <= 1e-10);
      REQUIRE(r.refined_upper_applicable);
      const double scale = 1.0 + r.delta_norm * r.delta_norm;
      CHECK(r.refined_upper_slack >= -1e-10 * scale);
    }
  }
  SUBCASE("infinite ratio bounds disable the report") {
    RatioExtrema bad;
    bad.c = -std::numeric_limits<double>::infinity();
    bad.C = std::numeric_limits<double>::infinity();
    auto st = zonal_state(b, centered_random(16, rng));
    auto r = sandwich_check(b, random_su(16, rng), st.W0, st.P0, bad);
    CHECK(!r.applicable);
  }
  SUBCASE("commuting direction reports zero slack") {
    auto st = zonal_state(b, centered_random(16, rng));
    auto ratios = ratio_extrema(st.spectrum);
    auto r = sandwich_check(b, st.W0, st.W0, st.P0, ratios);
    CHECK(r.applicable);
    CHECK(r.delta_norm == 0.0);
    CHECK(r.lower_slack == 0.0);
    CHECK(r.upper_slack == 0.0);
  }
}

TEST_CASE("orbit hessian on the first spin pair, n = 3") {
  SpinBasis b(3);
  const cmat w0 = -2.0 * b.X(2), p0 = b.X(2);
  auto oh = orbit_hessian(b, w0, p0);
  // su(3) minus the diagonal stabilizer.
  CHECK(oh.tangent_dim == 6);
  CHECK(oh.constrained_dim == 4);
  REQUIRE(oh.full_spectrum.size() == 6);
  // Four curvature directions at -1/3 (second eigenspace), two zero modes
  // along the rotation symmetry.
  for (int j = 0; j < 4; ++j)
    CHECK(oh.full_spectrum[j] == doctest::Approx(-1.0 / 3.0).epsilon(1e-10));
  for (int j = 4; j < 6; ++j)
    CHECK(std::abs(oh.full_spectrum[j]) <= 1e-12);
  REQUIRE(oh.constrained_spectrum.size() == 4);
  for (int j = 0; j < 4; ++j)
    CHECK(oh.constrained_spectrum[j] ==
          doctest::Approx(-1.0 / 3.0).epsilon(1e-10));
  CHECK(oh.constrained_spectrum.maxCoeff() < 0.0);
  // The tangent space contains the full first eigenspace image.
  CHECK(oh.p1_leakage == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("orbit hessian general properties") {
  SpinBasis b(8);
  Rng rng(909);
  auto st = zonal_state(b, centered_random(8, rng));
  auto oh = orbit_hessian(b, st.W0, st.P0);

  SUBCASE("spectra are sorted and interlace") {
    for (int j = 0; j + 1 < oh.full_spectrum.size(); ++j)
      CHECK(oh.full_spectrum[j] <= oh.full_spectrum[j + 1] + 1e-14);
    if (oh.constrained_dim > 0) {
      CHECK(oh.full_spectrum.minCoeff() <=
            oh.constrained_spectrum.minCoeff() + 1e-12);
      CHECK(oh.constrained_spectrum.maxCoeff() <=
            oh.full_spectrum.maxCoeff() + 1e-12);
    }
  }
  SUBCASE("tangent basis is orthonormal and solves the preimage problem") {
    for (int i = 0; i < oh.tangent_dim; ++i) {
      for (int j = i; j < oh.tangent_dim; ++j) {
        const double expect = i == j ? 1.0 : 0.0;
        CHECK(std::abs(inner(oh.tangent_basis[i], oh.tangent_basis[j]).real() -
                       expect) <= 1e-12);
      }
      CHECK(su_norm(bracket(oh.preimages[i], st.W0) - oh.tangent_basis[i]) <=
            1e-10);
    }
  }
  SUBCASE("coordinate form reproduces the quadratic form") {
    for (int rep = 0; rep < 5; ++rep) {
      rvec t(oh.tangent_dim);
      for (int j = 0; j < t.size(); ++j) t[j] = rng.normal();
      cmat xi = cmat::Zero(8, 8);
      for (int j = 0; j < t.size(); ++j) xi += t[j] * oh.preimages[j];
      const double via_h = t.dot(oh.H * t);
      const double direct = quadratic_form_Q(b, xi, st.W0, st.P0);
      CHECK(std::abs(via_h - direct) <= 1e-10 * (1.0 + std::abs(direct)));
    }
  }
  SUBCASE("zero vorticity yields an empty spectrum") {
    cmat z = cmat::Zero(8, 8);
    CHECK(orbit_hessian_spectrum(b, z, z, false).size() == 0);
    CHECK(orbit_hessian_spectrum(b, z, z, true).size() == 0);
  }
}

TEST_CASE("orbit hessian flags the l = 3 eigenstate") {
  SpinBasis b(8);
  rvec c = rvec::Zero(7);
  c[3] = 1.0;
  auto st = eigen_state(b, 3, c);
  rvec full = orbit_hessian_spectrum(b, st.W0, st.P0, false);
  rvec con = orbit_hessian_spectrum(b, st.W0, st.P0, true);
  REQUIRE(full.size() > 0);
  REQUIRE(con.size() > 0);
  // The ratio criterion fails here and indeed the tangent carries positive
  // curvature: 1/2 - 1/12 along the first eigenspace and 1/6 - 1/12 once
  // momentum is constrained away.
  CHECK(full.maxCoeff() == doctest::Approx(5.0 / 12.0).epsilon(1e-10));
  CHECK(con.maxCoeff() == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
}

TEST_CASE("certificates") {
  SpinBasis b(6);
  Rng rng(5);
  (void)rng;
  SUBCASE("zero state is trivial") {
    cmat z = cmat::Zero(6, 6);
    auto cert = certify(b, z, z);
    CHECK(cert.verdict == Verdict::kTrivial);
    CHECK(cert.hessian_full.size() == 0);
  }
  SUBCASE("first spin pair certifies stable with a passing crosscheck") {
    auto cert = certify(b, cmat(-2.0 * b.X(2)), b.X(2));
    CHECK(cert.verdict == Verdict::kStableByRatio);
    CHECK(cert.ratios.L == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(cert.crosscheck_applicable);
    CHECK(cert.crosscheck_passed);
    CHECK(cert.hessian_constrained.maxCoeff() < 0.0);
    CHECK(cert.w0_hash != 0);
    CHECK(cert.w0_hash != cert.p0_hash);
  }
  SUBCASE("boundary and steep states are indeterminate") {
    rvec c2 = rvec::Zero(5);
    c2[2] = 1.0;
    auto s2 = eigen_state(b, 2, c2);
    CHECK(certify(b, s2.W0, s2.P0).verdict == Verdict::kIndeterminate);
    rvec c3 = rvec::Zero(7);
    c3[3] = 1.0;
    auto s3 = eigen_state(b, 3, c3);
    CHECK(certify(b, s3.W0, s3.P0).verdict == Verdict::kIndeterminate);
  }
  SUBCASE("scaling leaves the certificate invariant") {
    SpinBasis b8(8);
    Rng r2(17);
    auto st = zonal_state(b8, centered_random(8, r2));
    auto c1 = certify(b8, st.W0, st.P0);
    auto c2 = certify(b8, cmat(3.7 * st.W0), cmat(3.7 * st.P0));
    CHECK(c1.verdict == c2.verdict);
    CHECK(std::abs(c1.ratios.L - c2.ratios.L) <= 1e-10);
    REQUIRE(c1.hessian_full.size() == c2.hessian_full.size());
    CHECK((c1.hessian_full - c2.hessian_full).cwiseAbs().maxCoeff() <=
          1e-10);
  }
  SUBCASE("identical inputs hash identically") {
    cmat w = -2.0 * b.X(2);
    auto a = certify(b, w, b.X(2));
    auto c = certify(b, w, b.X(2));
    CHECK(a.w0_hash == c.w0_hash);
    CHECK(a.p0_hash == c.p0_hash);
  }
}
