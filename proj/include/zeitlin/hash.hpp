#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>

#include <Eigen/Dense>

namespace zeitlin {

// FNV-1a over raw bytes; stable across runs and platforms for the same
// little-endian double layout.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Hash of a complex matrix: dimensions, then row-major re/im pairs.
inline std::uint64_t matrix_hash(const Eigen::MatrixXcd& m) {
  std::uint64_t h = fnv1a(nullptr, 0);
  const std::int64_t dims[2] = {m.rows(), m.cols()};
  h = fnv1a(dims, sizeof(dims), h);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v[2] = {m(r, c).real(), m(r, c).imag()};
      h = fnv1a(v, sizeof(v), h);
    }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace zeitlin
