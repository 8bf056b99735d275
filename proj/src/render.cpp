#include "zeitlin/render.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "zeitlin/errors.hpp"

namespace zeitlin {

namespace {

const std::complex<double> kI(0.0, 1.0);

// Quantized angular momentum action (i/hbar) [X_alpha, .].
cmat ell(const SpinBasis& basis, int alpha, const cmat& t) {
  return (kI / basis.hbar()) * bracket(basis.X(alpha), t);
}

// Orthonormal spherical harmonic with the Condon-Shortley phase baked into
// std::sph_legendre.
std::complex<double> sph_harmonic(int l, int m, double theta, double phi) {
  const int am = m < 0 ? -m : m;
  const double leg = std::sph_legendre(l, am, theta);
  std::complex<double> val =
      leg * std::exp(std::complex<double>(0.0, am * phi));
  if (m < 0) {
    val = std::conj(val);
    if (am % 2 != 0) val = -val;
  }
  return val;
}

}  // namespace

std::vector<cmat> ladder_multiplet(const SpinBasis& basis, int l) {
  const int n = basis.n();
  if (l < 1 || l > n - 1) {
    throw InputError("ladder_multiplet: l must lie in 1..n-1");
  }
  auto entries = eigenbasis_build(basis, l);
  std::vector<cmat> mult(2 * l + 1);
  for (const auto& e : entries) {
    if (e.l == l && e.m == l) mult[2 * l] = e.T;
  }
  for (int m = l; m > -l; --m) {
    const double fac = std::sqrt(double(l) * (l + 1) - double(m) * (m - 1));
    mult[m - 1 + l] =
        (ell(basis, 0, mult[m + l]) - kI * ell(basis, 1, mult[m + l])) / fac;
  }
  // One common phase remains free; fix it so adjoints pair across +-m.
  const std::complex<double> nu =
      double(l % 2 == 0 ? 1 : -1) *
      inner(mult[0], cmat(mult[2 * l].adjoint()));
  const std::complex<double> rot = std::exp(kI * (-0.5 * std::arg(nu)));
  for (auto& t : mult) t *= rot;
  // The conjugation condition leaves the overall sign free; orient the
  // multiplet so the zonal member is positive at the north pole, matching
  // Y_{l,0}(0) > 0.
  for (int j = 0; j < n; ++j) {
    const double v = mult[l](j, j).real();
    if (std::abs(v) > 1e-12) {
      if (v < 0.0) {
        for (auto& t : mult) t = -t;
      }
      break;
    }
  }
  double residual = 0.0;
  for (int m = -l; m <= l; ++m) {
    const double sign = m % 2 == 0 ? 1.0 : -1.0;
    residual = std::max(
        residual,
        su_norm(cmat(mult[m + l].adjoint() - sign * mult[-m + l])));
  }
  if (residual > 1e-8) {
    throw SolverError("ladder_multiplet: conjugation symmetry residual " +
                      std::to_string(residual) + " at l = " +
                      std::to_string(l));
  }
  return mult;
}

SphericalExpansion spherical_expansion(const SpinBasis& basis, const cmat& w,
                                       int l_max) {
  require_su(w, 1e-8, "spherical_expansion");
  const int n = basis.n();
  if (l_max == 0) l_max = n - 1;
  if (l_max < 1 || l_max > n - 1) {
    throw InputError("spherical_expansion: l_max must lie in 1..n-1");
  }
  SphericalExpansion out;
  out.n = n;
  out.l_max = l_max;
  out.coefficients.resize(l_max);
  for (int l = 1; l <= l_max; ++l) {
    auto mult = ladder_multiplet(basis, l);
    cvec z(2 * l + 1);
    for (int m = -l; m <= l; ++m) z[m + l] = inner(mult[m + l], w);
    out.coefficients[l - 1] = z;
  }
  return out;
}

double field_value(const SphericalExpansion& expansion, double theta,
                   double phi) {
  std::complex<double> acc(0.0, 0.0);
  for (int l = 1; l <= expansion.l_max; ++l) {
    const cvec& z = expansion.coefficients[l - 1];
    for (int m = -l; m <= l; ++m) {
      acc += z[m + l] * sph_harmonic(l, m, theta, phi);
    }
  }
  return (kI * acc).real();
}

RenderGrid render_field(const SpinBasis& basis, const cmat& w, int n_theta,
                        int n_phi) {
  if (n_theta < 2 || n_phi < 2) {
    throw InputError("render_field: grid dimensions must be at least 2");
  }
  auto expansion = spherical_expansion(basis, w);
  RenderGrid grid;
  grid.thetas.resize(n_theta);
  grid.phis.resize(n_phi);
  grid.values.resize(n_theta, n_phi);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n_theta; ++i) grid.thetas[i] = pi * (i + 0.5) / n_theta;
  for (int j = 0; j < n_phi; ++j) grid.phis[j] = 2.0 * pi * j / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      grid.values(i, j) = field_value(expansion, grid.thetas[i], grid.phis[j]);
    }
  }
  return grid;
}

}  // namespace zeitlin
