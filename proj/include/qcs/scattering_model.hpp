#pragma once

// Forward models from complex scattering amplitudes to intensity spectra.
//
// Sign convention, used everywhere in this library:
//   forward transform   S_r = sum_k exp(+2 pi i k r / n) x_k
//   sensor vector       (v_r)_p = exp(-2 pi i r p / n)
//   Toeplitz sensor     T_r = v_r v_r^H,  (T_r)_pq = exp(-2 pi i r (p - q) / n)
// so that |S_r|^2 = <x|T_r|x> = |v_r^H x|^2.

#include <array>
#include <vector>

#include "qcs/types.hpp"

namespace qcs {

/// Rank-one factor v_r of the Toeplitz sensor T_r on a chain of n sites.
CVector sensor_vector(Index r, Index n);

/// Dense Hermitian Toeplitz sensor T_r. Intended for oracles and checks; the
/// reconstruction paths work with the rank-one factor instead.
CMatrix toeplitz_matrix(Index r, Index n);

/// Modulus-squared spectrum |S_r|^2, r = 0..n-1, of a chain.
RVector intensity_1d(const CVector& x);

/// Kronecker product with row-major multi-index flattening
/// (A (x) B)_{(i r),(j s)} = A_ij B_rs, (i r) -> i * B.rows() + r.
CMatrix kron_product(const CMatrix& A, const CMatrix& B);

/// Row-major vectorization of a 2D amplitude array (and its inverse).
CVector vectorize(const CMatrix& X);
CMatrix unvectorize(const CVector& x, const GridShape& shape);

/// A layer pattern repeated `multiplicity` times without lateral shifts.
struct Scenario2D {
  Index n1 = 0;
  Index n2 = 0;
  Index multiplicity = 1;
  CMatrix amplitudes;  // n1 x n2

  GridShape shape() const { return GridShape::grid(n1, n2); }
};

/// M^2 |S_{r1 r2}|^2 in row-major order over (r1, r2).
RVector intensity_2d(const Scenario2D& sc);

struct BilayerPhases {
  std::array<Complex, 3> factors;
  // kappa1 - kappa2 == 0 (mod 3): all three factors coincide at 1 and the
  // reflection does not see the stacking.
  bool bragg_insensitive = false;
};

/// Phase factors {1, exp(2 pi i (2k1 + k2)/3), exp(2 pi i (k1 + 2k2)/3)} that
/// distinguish the three lateral positions of a hexagonal bilayer.
BilayerPhases bilayer_phase_factors(long kappa1, long kappa2);

/// Sinc broadening around a set of occupied sites. `shift` is the symmetric
/// offset s in [0, 1); the profile is 1/2 (f+ + f-) with
///   f±_k = sum_{a in support} sinc((k ± s - a) pi).
struct LeakageSpec {
  std::vector<Index> support;  // flat site indices
  double shift = 0.0;
  double modulus_scale = 1.0;
  double phase_scale = 1.0;

  void validate() const;
};

/// Unweighted 1D leakage profile on a chain of n sites.
RVector leakage_profile(const LeakageSpec& spec, Index n);

/// Leakage of per-site values `weights` (indexed by flat site) on a grid.
/// Each axis with extent > 1 is broadened independently and the per-axis
/// kernels multiply; an axis of extent 1 is left untouched, so on a chain
/// this is sum_a weights[a] * 1/2 (f+ + f-)_k for the single site a.
RVector weighted_leakage(const LeakageSpec& spec, const GridShape& shape,
                         const RVector& weights);

/// Initial guess: leaked moduli times exp(i * leaked phases). The support of
/// `sparse` must equal `spec.support`.
CVector build_initial_guess(const CVector& sparse, const LeakageSpec& spec,
                            const GridShape& shape);

/// Family of rank-one intensity sensors for a chain or a grid.
///
/// Row w_j^H of the analysis matrix maps an amplitude vector to the complex
/// coefficient a_j = w_j^H x, and the modelled intensity is prefactor |a_j|^2.
/// On a grid w_(r1 r2) = v_r1 (x) v_r2 and the prefactor is M^2.
class SensorFamily {
 public:
  static SensorFamily line(Index n);
  static SensorFamily grid(Index n1, Index n2, Index multiplicity = 1);

  const GridShape& shape() const noexcept { return shape_; }
  Index size() const noexcept { return shape_.size(); }
  double prefactor() const noexcept { return prefactor_; }

  /// All coefficients a = W x. Applied as two nested per-axis contractions.
  CVector coefficients(const CVector& x) const;

  /// prefactor * |a_j|^2 for every sensor.
  RVector intensities(const CVector& x) const;

  /// Dense N x N matrix whose rows are w_j^H.
  const CMatrix& analysis_matrix() const noexcept { return analysis_; }

  /// prefactor * w_j w_j^H as a dense matrix (checks only).
  CMatrix dense_sensor(Index j) const;

 private:
  SensorFamily(GridShape shape, double prefactor);

  GridShape shape_;
  double prefactor_ = 1.0;
  CMatrix row_dft_;  // rows x rows, entry (r, q) = exp(+2 pi i r q / rows)
  CMatrix col_dft_;  // cols x cols
  CMatrix analysis_;
};

}  // namespace qcs
