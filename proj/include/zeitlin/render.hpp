#pragma once

#include <vector>

#include "zeitlin/algebra.hpp"

namespace zeitlin {

// Harmonic coefficients of a vorticity matrix.  coefficients[l-1] holds the
// 2l+1 projections onto the ladder-aligned eigenspace basis, index m+l.
// That basis is normalized so the multiplets obey the same ladder and
// conjugation relations as orthonormal spherical harmonics, which makes the
// synthesized field rotate with the state.
struct SphericalExpansion {
  int n = 0;
  int l_max = 0;
  std::vector<cvec> coefficients;
};

// Ladder-aligned basis for one eigenspace, entries m = -l..l.  Built by
// lowering from the top state and phase-fixed so adjoint(T_m) equals
// (-1)^m T_{-m}.
std::vector<cmat> ladder_multiplet(const SpinBasis& basis, int l);

SphericalExpansion spherical_expansion(const SpinBasis& basis, const cmat& w,
                                       int l_max = 0);

// Pointwise synthesis of the real field at colatitude theta, azimuth phi.
double field_value(const SphericalExpansion& expansion, double theta,
                   double phi);

struct RenderGrid {
  rvec thetas;  // cell centers in (0, pi)
  rvec phis;    // uniform in [0, 2 pi)
  rmat values;  // n_theta x n_phi
};

RenderGrid render_field(const SpinBasis& basis, const cmat& w, int n_theta,
                        int n_phi);

}  // namespace zeitlin
