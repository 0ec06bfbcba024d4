#include "qcs/scattering_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qcs {
namespace {

// exp(sign * 2 pi i m / n) for m = 0..n-1; products r*p are reduced mod n
// before lookup so large frequencies keep full accuracy.
std::vector<Complex> roots_of_unity(Index n, int sign) {
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (Index m = 0; m < n; ++m) {
    roots[static_cast<std::size_t>(m)] =
        std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(m) / static_cast<double>(n));
  }
  return roots;
}

// Entry (r, q) = exp(+2 pi i r q / n).
CMatrix forward_dft_matrix(Index n) {
  const auto roots = roots_of_unity(n, +1);
  CMatrix F(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index q = 0; q < n; ++q) F(r, q) = roots[static_cast<std::size_t>((r * q) % n)];
  }
  return F;
}

double sinc(double t) {
  if (t == 0.0) return 1.0;
  const double arg = kPi * t;
  return std::sin(arg) / arg;
}

double axis_kernel(Index k, Index site, double shift) {
  const double d = static_cast<double>(k - site);
  return 0.5 * (sinc(d + shift) + sinc(d - shift));
}

double principal_phase(Complex z) {
  double phase = std::arg(z);
  if (phase <= -kPi) phase = kPi;
  return phase;
}

}  // namespace

CVector sensor_vector(Index r, Index n) {
  if (n <= 0) throw DomainError("sensor_vector: grid size must be positive");
  if (r < 0 || r >= n) throw DomainError("sensor_vector: frequency index out of range");
  const auto roots = roots_of_unity(n, -1);
  CVector v(n);
  for (Index p = 0; p < n; ++p) v(p) = roots[static_cast<std::size_t>((r * p) % n)];
  return v;
}

CMatrix toeplitz_matrix(Index r, Index n) {
  const CVector v = sensor_vector(r, n);
  return v * v.adjoint();
}

RVector intensity_1d(const CVector& x) {
  const Index n = x.size();
  if (n == 0) throw DimensionError("intensity_1d: empty amplitude vector");
  const auto roots = roots_of_unity(n, +1);
  RVector out(n);
  for (Index r = 0; r < n; ++r) {
    Complex s{0.0, 0.0};
    for (Index k = 0; k < n; ++k) s += roots[static_cast<std::size_t>((r * k) % n)] * x(k);
    out(r) = std::norm(s);
  }
  return out;
}

CMatrix kron_product(const CMatrix& A, const CMatrix& B) {
  CMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

CVector vectorize(const CMatrix& X) {
  CVector x(X.size());
  for (Index i = 0; i < X.rows(); ++i) {
    for (Index j = 0; j < X.cols(); ++j) x(i * X.cols() + j) = X(i, j);
  }
  return x;
}

CMatrix unvectorize(const CVector& x, const GridShape& shape) {
  if (x.size() != shape.size()) throw DimensionError("unvectorize: length does not match grid");
  CMatrix X(shape.rows, shape.cols);
  for (Index i = 0; i < shape.rows; ++i) {
    for (Index j = 0; j < shape.cols; ++j) X(i, j) = x(i * shape.cols + j);
  }
  return X;
}

RVector intensity_2d(const Scenario2D& sc) {
  if (sc.n1 <= 0 || sc.n2 <= 0) throw DomainError("intensity_2d: grid extents must be positive");
  if (sc.amplitudes.rows() != sc.n1 || sc.amplitudes.cols() != sc.n2) {
    throw DimensionError("intensity_2d: amplitude array does not match (n1, n2)");
  }
  if (sc.multiplicity <= 0) throw DomainError("intensity_2d: multiplicity must be positive");
  const SensorFamily sensors = SensorFamily::grid(sc.n1, sc.n2, sc.multiplicity);
  return sensors.intensities(vectorize(sc.amplitudes));
}

BilayerPhases bilayer_phase_factors(long kappa1, long kappa2) {
  // Reduce the exponents mod 3 first; the factors only depend on them.
  const auto mod3 = [](long v) { return ((v % 3) + 3) % 3; };
  const auto factor = [](long e) {
    return std::polar(1.0, 2.0 * kPi * static_cast<double>(e) / 3.0);
  };
  BilayerPhases out;
  out.factors = {Complex{1.0, 0.0}, factor(mod3(2 * kappa1 + kappa2)),
                 factor(mod3(kappa1 + 2 * kappa2))};
  out.bragg_insensitive = mod3(kappa1 - kappa2) == 0;
  return out;
}

void LeakageSpec::validate() const {
  if (support.empty()) throw DomainError("leakage: empty support");
  if (!(shift >= 0.0 && shift < 1.0)) throw DomainError("leakage: shift must lie in [0, 1)");
  if (!(modulus_scale > 0.0) || !(phase_scale > 0.0)) {
    throw DomainError("leakage: scales must be positive");
  }
}

RVector leakage_profile(const LeakageSpec& spec, Index n) {
  spec.validate();
  const GridShape shape = GridShape::line(n);
  RVector ones = RVector::Zero(n);
  for (Index a : spec.support) {
    if (a < 0 || a >= n) throw DomainError("leakage: support index out of range");
    ones(a) = 1.0;
  }
  return weighted_leakage(spec, shape, ones);
}

RVector weighted_leakage(const LeakageSpec& spec, const GridShape& shape,
                         const RVector& weights) {
  spec.validate();
  if (weights.size() != shape.size()) throw DimensionError("leakage: weights do not match grid");
  RVector out = RVector::Zero(shape.size());
  for (Index a : spec.support) {
    if (a < 0 || a >= shape.size()) throw DomainError("leakage: support index out of range");
    const double w = weights(a);
    if (w == 0.0) continue;
    const auto [a_row, a_col] = unflatten_index(shape, a);
    for (Index i = 0; i < shape.rows; ++i) {
      const double row_factor = shape.rows > 1 ? axis_kernel(i, a_row, spec.shift) : 1.0;
      for (Index j = 0; j < shape.cols; ++j) {
        const double col_factor = shape.cols > 1 ? axis_kernel(j, a_col, spec.shift) : 1.0;
        out(i * shape.cols + j) += w * row_factor * col_factor;
      }
    }
  }
  return out;
}

CVector build_initial_guess(const CVector& sparse, const LeakageSpec& spec,
                            const GridShape& shape) {
  spec.validate();
  if (sparse.size() != shape.size()) throw DimensionError("initial guess: length does not match grid");
  std::set<Index> occupied;
  for (Index k = 0; k < sparse.size(); ++k) {
    if (sparse(k) != Complex{0.0, 0.0}) occupied.insert(k);
  }
  const std::set<Index> declared(spec.support.begin(), spec.support.end());
  if (occupied != declared) throw DomainError("initial guess: leakage support differs from the sparse support");

  RVector moduli(sparse.size());
  RVector phases(sparse.size());
  for (Index k = 0; k < sparse.size(); ++k) {
    moduli(k) = std::abs(sparse(k));
    phases(k) = moduli(k) > 0.0 ? principal_phase(sparse(k)) : 0.0;
  }
  const RVector leaked_moduli = spec.modulus_scale * weighted_leakage(spec, shape, moduli);
  const RVector leaked_phases = spec.phase_scale * weighted_leakage(spec, shape, phases);

  CVector guess(sparse.size());
  for (Index k = 0; k < sparse.size(); ++k) {
    guess(k) = leaked_moduli(k) * std::polar(1.0, leaked_phases(k));
  }
  return guess;
}

SensorFamily::SensorFamily(GridShape shape, double prefactor)
    : shape_(shape),
      prefactor_(prefactor),
      row_dft_(forward_dft_matrix(shape.rows)),
      col_dft_(forward_dft_matrix(shape.cols)),
      analysis_(kron_product(row_dft_, col_dft_)) {}

SensorFamily SensorFamily::line(Index n) {
  if (n <= 0) throw DomainError("sensor family: grid size must be positive");
  return SensorFamily(GridShape::line(n), 1.0);
}

SensorFamily SensorFamily::grid(Index n1, Index n2, Index multiplicity) {
  if (n1 <= 0 || n2 <= 0) throw DomainError("sensor family: grid extents must be positive");
  if (multiplicity <= 0) throw DomainError("sensor family: multiplicity must be positive");
  const double m = static_cast<double>(multiplicity);
  return SensorFamily(GridShape::grid(n1, n2), m * m);
}

CVector SensorFamily::coefficients(const CVector& x) const {
  if (x.size() != size()) throw DimensionError("sensor family: amplitude length mismatch");
  const CMatrix X = unvectorize(x, shape_);
  // Both DFT matrices are symmetric, so the column contraction is X * F.
  const CMatrix A = row_dft_ * X * col_dft_;
  return vectorize(A);
}

RVector SensorFamily::intensities(const CVector& x) const {
  return prefactor_ * coefficients(x).cwiseAbs2();
}

CMatrix SensorFamily::dense_sensor(Index j) const {
  if (j < 0 || j >= size()) throw DomainError("sensor family: sensor index out of range");
  const CVector w = analysis_.row(j).adjoint();
  return prefactor_ * (w * w.adjoint());
}

}  // namespace qcs
