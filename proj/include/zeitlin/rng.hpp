#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>

namespace zeitlin {

// SplitMix64 stream with a Box-Muller normal on top.  Chosen over
// std::normal_distribution because the standard leaves that algorithm
// unspecified; this generator produces the same stream on every platform,
// which keeps seeded experiments byte-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0, 1]: never returns 0, so it is safe under log().
  double uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; draws two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Random traceless skew-Hermitian n x n matrix.  Fill order is row-major
// over the full matrix, real part then imaginary part of each entry, each
// a standard normal; the result is then projected to the traceless
// skew-Hermitian subspace.  Deterministic for a given seed.
Eigen::MatrixXcd random_su(int n, std::uint64_t seed);

// Same, but consuming an existing stream (for repeated draws).
Eigen::MatrixXcd random_su(int n, Rng& rng);

// Haar-ish random unitary: QR of a complex Ginibre matrix with the R
// diagonal phases normalized.  Deterministic for a given seed.
Eigen::MatrixXcd random_unitary(int n, std::uint64_t seed);

}  // namespace zeitlin
