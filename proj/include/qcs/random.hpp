#pragma once

// Seeded random source with fixed, platform-independent transforms.
// std::uniform_real_distribution and friends are not specified bit-for-bit,
// so seeded scenarios would differ between standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

#include "qcs/types.hpp"

namespace qcs {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // Standard normal, Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 == 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return radius * std::cos(2.0 * kPi * u2);
  }

  Complex complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  CMatrix complex_matrix(Index rows, Index cols) {
    CMatrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) M(i, j) = complex_normal();
    return M;
  }

  CVector complex_vector(Index n) { return complex_matrix(n, 1); }

  RMatrix real_matrix(Index rows, Index cols) {
    RMatrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
      for (Index i = 0; i < rows; ++i) M(i, j) = normal();
    return M;
  }

  // Hermitian positive definite B B^H / n + shift I.
  CMatrix hermitian_pd(Index n, double shift = 0.1) {
    const CMatrix B = complex_matrix(n, n);
    CMatrix H = B * B.adjoint() / static_cast<double>(n);
    H.diagonal().array() += shift;
    return (H + H.adjoint()) / 2.0;
  }

  // Hermitian positive semidefinite of the given rank.
  CMatrix hermitian_psd(Index n, Index rank) {
    const CMatrix B = complex_matrix(n, rank);
    const CMatrix H = B * B.adjoint();
    return (H + H.adjoint()) / 2.0;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qcs
