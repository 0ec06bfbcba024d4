#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace qcs {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A parameter is outside its documented domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A matrix that must be Hermitian / positive definite / invertible is not.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// An iterative reconstruction left the admissible region.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, Index iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  Index iteration() const noexcept { return iteration_; }

 private:
  Index iteration_;
};

/// Extents of a scattering grid. One-dimensional chains use `rows == 1`.
///
/// Amplitude arrays are vectorized row-major: site (row, col) lives at
/// `row * cols + col`. The same flattening is used for the Kronecker sensor
/// family, so estimates and intensities index identically.
struct GridShape {
  Index rows = 1;
  Index cols = 1;

  static GridShape line(Index n) { return GridShape{1, n}; }
  static GridShape grid(Index n1, Index n2) { return GridShape{n1, n2}; }

  Index size() const noexcept { return rows * cols; }
  bool is_line() const noexcept { return rows == 1; }

  friend bool operator==(const GridShape&, const GridShape&) = default;
};

inline Index flatten_index(const GridShape& shape, Index row, Index col) {
  if (row < 0 || row >= shape.rows || col < 0 || col >= shape.cols) {
    throw DomainError("grid index out of range");
  }
  return row * shape.cols + col;
}

inline std::pair<Index, Index> unflatten_index(const GridShape& shape, Index flat) {
  if (flat < 0 || flat >= shape.size()) throw DomainError("flat grid index out of range");
  return {flat / shape.cols, flat % shape.cols};
}

}  // namespace qcs
