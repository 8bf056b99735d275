#include <doctest.h>

#include <cmath>
#include <complex>

#include "zeitlin/algebra.hpp"
#include "zeitlin/errors.hpp"
#include "zeitlin/rng.hpp"
#include "zeitlin/spectral.hpp"
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

rvec x3_diagonal(const SpinBasis& b) {
  rvec d(b.n());
  for (int j = 0; j < b.n(); ++j) d[j] = b.X(2)(j, j).imag();
  return d;
}
}  // namespace

TEST_CASE("zonal states") {
  SpinBasis b(8);
  SUBCASE("zero diagonal gives the zero state") {
    auto st = zonal_state(b, rvec::Zero(8));
    CHECK(su_norm(st.W0) == 0.0);
    CHECK(su_norm(st.P0) == 0.0);
    CHECK(st.provenance == Provenance::kZonal);
  }
  SUBCASE("the spectrum of -iX3 reproduces the first spin pair") {
    auto st = zonal_state(b, x3_diagonal(b));
    CHECK(su_norm(st.P0 - b.X(2)) <= 1e-13);
    CHECK(su_norm(st.W0 + 2.0 * b.X(2)) <= 1e-12);
  }
  SUBCASE("random diagonals validate tightly") {
    SpinBasis b16(16);
    Rng rng(7);
    for (int rep = 0; rep < 5; ++rep) {
      auto st = zonal_state(b16, centered_random(16, rng));
      CHECK(st.commutator_residual <= 1e-12);
      CHECK(st.laplacian_residual <= 1e-12);
    }
  }
  SUBCASE("nonzero trace is rejected") {
    rvec d = rvec::Ones(8);
    CHECK_THROWS_AS(zonal_state(b, d), InputError);
  }
}

TEST_CASE("eigenspace states and their ratio extrema") {
  SpinBasis b(9);
  SUBCASE("l=1 coefficients selecting X3") {
    rvec c = rvec::Zero(3);
    c[1] = -1.0 / std::sqrt(3.0);
    auto st = eigen_state(b, 1, c);
    CHECK(su_norm(st.P0 - b.X(2)) <= 1e-13);
    CHECK(su_norm(st.W0 + 2.0 * b.X(2)) <= 1e-12);
    CHECK(ratio_extrema(st.spectrum).L == doctest::Approx(-2.0).epsilon(1e-12));
  }
  SUBCASE("zonal l=2 and l=3 sit on the linear ratios") {
    rvec c2 = rvec::Zero(5);
    c2[2] = 0.8;
    auto s2 = eigen_state(b, 2, c2);
    CHECK(ratio_extrema(s2.spectrum).L ==
          doctest::Approx(-6.0).epsilon(1e-12));
    rvec c3 = rvec::Zero(7);
    c3[3] = 1.3;
    auto s3 = eigen_state(b, 3, c3);
    CHECK(ratio_extrema(s3.spectrum).L ==
          doctest::Approx(-12.0).epsilon(1e-12));
  }
  SUBCASE("generic coefficients: isometry, skewness, linear pairing") {
    Rng rng(21);
    for (int l : {1, 2, 4}) {
      CAPTURE(l);
      rvec c(2 * l + 1);
      for (int j = 0; j < c.size(); ++j) c[j] = rng.normal();
      auto st = eigen_state(b, l, c);
      CHECK(st.provenance == Provenance::kEigenstate);
      CHECK(st.eigen_l == l);
      CHECK(su_norm(st.P0) ==
            doctest::Approx(c.norm()).epsilon(1e-12));
      CHECK(su_norm(st.W0 + l * (l + 1.0) * st.P0) <= 1e-12);
      auto re = ratio_extrema(st.spectrum);
      CHECK(re.L == doctest::Approx(-l * (l + 1.0)).epsilon(1e-9));
    }
  }
  SUBCASE("range checks") {
    CHECK_THROWS_AS(eigen_state(b, 0, rvec::Zero(1)), InputError);
    CHECK_THROWS_AS(eigen_state(b, 9, rvec::Zero(19)), InputError);
    CHECK_THROWS_AS(eigen_state(b, 2, rvec::Zero(4)), InputError);
  }
}

TEST_CASE("newton functional states") {
  SpinBasis b(12);
  Rng rng(5);
  SUBCASE("zero and -x functionals collapse to the rest state") {
    for (uint64_t rep = 0; rep < 3; ++rep) {
      rvec d0 = centered_random(12, rng);
      auto s1 = newton_functional_state(b, rvec::Zero(1), d0);
      CHECK(su_norm(s1.W0) <= 1e-12);
      rvec fm(2);
      fm << 0.0, -1.0;
      auto s2 = newton_functional_state(b, fm, d0);
      CHECK(su_norm(s2.W0) <= 1e-10);
      CHECK(su_norm(s2.P0) <= 1e-10);
    }
  }
  SUBCASE("f(x) = -2x settles on the first-eigenspace kernel component") {
    rvec f(2);
    f << 0.0, -2.0;
    rvec d0 = 1.1 * x3_diagonal(b);
    auto st = newton_functional_state(b, f, d0);
    const double amp = su_norm(st.P0);
    CHECK(amp > 0.1);
    // P0 is a multiple of X3.
    CHECK(su_norm(st.P0 - (amp / su_norm(b.X(2))) * b.X(2)) <= 1e-10);
    CHECK(su_norm(st.W0 + 2.0 * st.P0) <= 1e-10);
    CHECK(st.provenance == Provenance::kNewton);
    CHECK(st.detail == "-2*x");
  }
  SUBCASE("solutions realize w = f(p) up to the projected constant") {
    rvec f(2);
    f << 1.0, -2.0;  // the constant term is annihilated by the projection
    auto st = newton_functional_state(b, f, rvec(0.7 * x3_diagonal(b)));
    REQUIRE(su_norm(st.P0) > 0.05);
    rvec gap(st.spectrum.n);
    for (int j = 0; j < st.spectrum.n; ++j)
      gap[j] = st.spectrum.w[j] - polyval(f, st.spectrum.p[j]);
    CHECK((gap.array() - gap.mean()).abs().maxCoeff() <= 1e-10);
    CHECK(gap.mean() == doctest::Approx(-1.0).epsilon(1e-10));
  }
  SUBCASE("invalid inputs") {
    rvec f(2);
    f << 0.0, -1.0;
    CHECK_THROWS_AS(newton_functional_state(b, f, rvec::Ones(12)), InputError);
    CHECK_THROWS_AS(newton_functional_state(b, f, rvec::Zero(5)), InputError);
    CHECK_THROWS_AS(
        newton_functional_state(b, f, centered_random(12, rng), 0),
        InputError);
  }
}

TEST_CASE("group action on the algebra") {
  SpinBasis b(6);
  Rng rng(33);
  cmat w = random_su(6, rng);
  SUBCASE("zero rotation is the identity") {
    CHECK((so3_rotate(b, Eigen::Vector3d::Zero(), w) - w).norm() == 0.0);
  }
  SUBCASE("rotations about the third axis fix X3") {
    for (double t : {0.3, 2.0, -11.0})
      CHECK(su_norm(so3_rotate(b, {0.0, 0.0, t}, b.X(2)) - b.X(2)) <= 1e-13);
  }
  SUBCASE("norm preservation and momentum equivariance") {
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::Vector3d rho(rng.normal(), rng.normal(), rng.normal());
      cmat rw = so3_rotate(b, rho, w);
      CHECK(std::abs(su_norm(rw) - su_norm(w)) <= 1e-12);
      // The structure constants carry hbar, so conjugation by
      // exp(sum rho_a X_a) rotates momenta by exp(hbar hat(rho)).
      Eigen::Vector3d got = momentum(b, rw);
      Eigen::Vector3d expect =
          so3_exp(b.hbar() * rho) * momentum(b, w);
      CHECK((got - expect).norm() <= 1e-10);
    }
  }
  SUBCASE("action composes as the group product along one axis") {
    Eigen::Vector3d r1(0.4, 0.0, 0.0), r2(0.9, 0.0, 0.0);
    cmat a = so3_rotate(b, r1, so3_rotate(b, r2, w));
    cmat c = so3_rotate(b, r1 + r2, w);
    CHECK(su_norm(a - c) <= 1e-12);
  }
}

TEST_CASE("first-eigenspace alignment") {
  SpinBasis b(7);
  SUBCASE("already aligned input returns the identity") {
    cmat w = 1.7 * b.X(2) + eigen_state(b, 3, rvec::Ones(7)).P0;
    auto al = align_first_eigenspace(b, w);
    CHECK(al.rho.norm() == 0.0);
    CHECK((al.aligned - w).norm() == 0.0);
  }
  SUBCASE("component along X1 rotates onto the third axis") {
    const double a = 0.8;
    auto al = align_first_eigenspace(b, cmat(a * b.X(0)));
    auto c = project_eigenspace_1(b, al.aligned);
    CHECK(std::hypot(c[0], c[1]) <= 1e-10 * a);
    CHECK(c[2] == doctest::Approx(a).epsilon(1e-10));
    // Axis-angle: quarter turn about the negative second axis, scaled by
    // 1/hbar.
    CHECK(al.rho[0] == doctest::Approx(0.0));
    CHECK(al.rho[1] ==
          doctest::Approx(-0.5 * M_PI / b.hbar()).epsilon(1e-12));
  }
  SUBCASE("vanishing first component is left untouched") {
    cmat w = eigen_state(b, 2, rvec::Ones(5)).P0;
    auto al = align_first_eigenspace(b, w);
    CHECK(al.rho.norm() == 0.0);
    CHECK((al.aligned - w).norm() == 0.0);
  }
  SUBCASE("antipodal component flips onto the positive axis") {
    auto al = align_first_eigenspace(b, cmat(-2.0 * b.X(2)));
    auto c = project_eigenspace_1(b, al.aligned);
    CHECK(c[2] == doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("random directions align to within the gate") {
    Rng rng(88);
    for (int rep = 0; rep < 5; ++rep) {
      cmat w = random_su(7, rng);
      auto a0 = project_eigenspace_1(b, w);
      auto al = align_first_eigenspace(b, w);
      auto c = project_eigenspace_1(b, al.aligned);
      CHECK(std::hypot(c[0], c[1]) <= 1e-10 * a0.norm());
      CHECK(c[2] == doctest::Approx(a0.norm()).epsilon(1e-10));
    }
  }
}

TEST_CASE("rigidity reports") {
  SpinBasis b(10);
  SUBCASE("zero state") {
    auto rep = rigidity_report(b, zonal_state(b, rvec::Zero(10)));
    CHECK(rep.conclusion == RigidityConclusion::kZeroConfirmed);
    CHECK(rep.L == std::numeric_limits<double>::infinity());
  }
  SUBCASE("the first spin pair is diagonal with L = -2") {
    auto st = zonal_state(b, x3_diagonal(b));
    auto rep = rigidity_report(b, st);
    CHECK(rep.L == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(rep.conclusion == RigidityConclusion::kDiagonalConfirmed);
    CHECK(rep.offdiag_residual <= 1e-12);
    CHECK(rep.x3_commutator_residual <= 1e-12);
  }
  SUBCASE("rotated diagonal states are recognized and re-diagonalized") {
    Rng rng(3);
    const auto& blk = b.block(0);
    // Mix of the l=1 and l=2 diagonal modes: ratios lie in (-6, -2].
    rvec d = blk.vecs.col(8) + 0.2 * blk.vecs.col(7);
    auto st = zonal_state(b, d);
    auto base_rep = rigidity_report(b, st);
    REQUIRE(base_rep.L > -6.0);
    REQUIRE(base_rep.L <= -2.0 + 1e-12);
    for (int rep_i = 0; rep_i < 3; ++rep_i) {
      Eigen::Vector3d rho(rng.normal(), rng.normal(), rng.normal());
      auto rot = make_steady_state(b, so3_rotate(b, rho, st.W0),
                                   so3_rotate(b, rho, st.P0),
                                   Provenance::kLoaded);
      CHECK(rot.laplacian_residual <= 1e-9);
      auto rrep = rigidity_report(b, rot);
      CHECK(rrep.L == doctest::Approx(base_rep.L).epsilon(1e-10));
      CHECK(rrep.conclusion == RigidityConclusion::kDiagonalConfirmed);
      CHECK(rrep.offdiag_residual <= 1e-8);
    }
  }
  SUBCASE("steeper spectra fall outside both propositions") {
    rvec c2 = rvec::Zero(5);
    c2[2] = 1.0;
    auto rep2 = rigidity_report(b, eigen_state(b, 2, c2));
    CHECK(rep2.conclusion == RigidityConclusion::kNotApplicable);
    rvec c3 = rvec::Zero(7);
    c3[3] = 1.0;
    auto rep3 = rigidity_report(b, eigen_state(b, 3, c3));
    CHECK(rep3.conclusion == RigidityConclusion::kNotApplicable);
  }
  SUBCASE("conclusion names") {
    CHECK(std::string(to_string(RigidityConclusion::kDiagonalConfirmed)) ==
          "DIAGONAL_CONFIRMED");
    CHECK(std::string(to_string(Provenance::kNewton)) == "NEWTON");
  }
}
