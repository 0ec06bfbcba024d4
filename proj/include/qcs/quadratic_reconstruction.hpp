#pragma once

// Extended Kalman filter for quadratic (intensity) observations.
//
// Around the current estimate x_k every intensity is linearized as
//   |S_j|^2 ~ 2 Re <x_k|T_j|x> - <x_k|T_j|x_k>,
// giving sensing rows 2 <x_k|T_j and biases s_j = <x_k|T_j|x_k>. The phase
// row <p|(x_k) is appended with the pseudo-measurement gamma_k ||x_k||_1, and
// one predict (A = G = I, u = 0) plus gain-form correction is run with the
// real part of the innovation:
//   K       = (P_k + Q) C^H (C (P_k + Q) C^H + R)^-1
//   P_{k+1} = (I - K C)(P_k + Q)
//   x_{k+1} = x_k + K Re[y - C x_k + s]

#include <functional>

#include "qcs/filter_config.hpp"
#include "qcs/kalman_core.hpp"
#include "qcs/scattering_model.hpp"
#include "qcs/types.hpp"

namespace qcs {

struct LinearizedObservation {
  CMatrix C;  // (m + 1) x n: intensity rows then the phase row
  CVector s;  // biases; last entry 0
  RVector y;  // measured intensities then gamma_k ||x_k||_1
};

/// Linearization of the intensity model plus l1 pseudo-measurement at x.
/// Throws DomainError if x is zero.
LinearizedObservation build_linearization(const CVector& x, const SensorFamily& sensors,
                                          double gamma_k, const RVector& measured,
                                          double eps_phase = kDefaultPhaseEpsilon);

/// R = diag(r_obs, ..., r_obs, r_l1) for m constraint rows.
CMatrix observation_covariance(Index m, const FilterConfig& config);

/// One EKF step on a frozen linearization. Throws DivergenceError if the
/// innovation or the new estimate is not finite.
FilterState ekf_step(const FilterState& state, const LinearizedObservation& lin,
                     const FilterConfig& config);

struct ReconstructionStep {
  Index k;
  double gamma;
  const FilterState& before;
  const LinearizedObservation& linearization;
  const FilterState& after;
};
using ReconstructionObserver = std::function<void(const ReconstructionStep&)>;

struct Reconstruction {
  CVector x;
  ReconstructionTrace trace;
};

/// Runs config.max_iter EKF steps from x0. Deterministic in its inputs.
///
/// Throws DomainError for an invalid config, mismatched lengths or a zero x0;
/// DivergenceError when the estimate becomes non-finite, grows beyond
/// kDivergenceFactor times its initial norm, or collapses to zero.
Reconstruction reconstruct(const RVector& measured, const CVector& x0,
                           const SensorFamily& sensors, const FilterConfig& config,
                           const ReconstructionObserver& observer = {});

/// Element of the intensity symmetry group: global phase, cyclic shift on the
/// grid, and optional conjugate reflection x_k -> conj(x_{N-1-k}).
struct Alignment {
  Index row_shift = 0;
  Index col_shift = 0;
  bool reflected = false;
  double phase = 0.0;
};

struct AlignedError {
  double error = 0.0;  // min over the group of ||x_est - g(x_ref)||_2
  Alignment alignment;
};

/// Applies g to x: optional conjugate reflection, then the cyclic shift
/// (x_k -> x_{k - shift}), then the global phase.
CVector apply_alignment(const CVector& x, const Alignment& g, const GridShape& shape);

/// Maps an estimate back into the reference frame: returns g^-1(x_est).
CVector align_to_reference(const CVector& x_est, const Alignment& g, const GridShape& shape);

/// Distance between an estimate and a reference modulo the symmetries that
/// leave all intensities unchanged. The global phase is optimized in closed
/// form for every shift/reflection candidate.
AlignedError aligned_error(const CVector& x_est, const CVector& x_ref, const GridShape& shape);
AlignedError aligned_error(const CVector& x_est, const CVector& x_ref);

}  // namespace qcs
