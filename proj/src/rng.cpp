#include "zeitlin/rng.hpp"

#include "zeitlin/algebra.hpp"
#include "zeitlin/errors.hpp"

namespace zeitlin {

Eigen::MatrixXcd random_su(int n, Rng& rng) {
  if (n < 1) throw InputError("random_su: n must be positive");
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double re = rng.normal();
      const double im = rng.normal();
      a(j, k) = {re, im};
    }
  }
  return su_part(a);
}

Eigen::MatrixXcd random_su(int n, std::uint64_t seed) {
  Rng rng(seed);
  return random_su(n, rng);
}

Eigen::MatrixXcd random_unitary(int n, std::uint64_t seed) {
  if (n < 1) throw InputError("random_unitary: n must be positive");
  Rng rng(seed);
  Eigen::MatrixXcd a(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double re = rng.normal();
      const double im = rng.normal();
      a(j, k) = {re, im};
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity of QR so the draw is well defined.
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double m = std::abs(d);
    if (m > 0) q.col(j) *= d / m;
  }
  return q;
}

}  // namespace zeitlin
