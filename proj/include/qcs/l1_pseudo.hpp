#pragma once

// l1 minimization through a pseudo-measurement row.
//
// The l1 norm is linearized around z0 with the phase row
//   <p|(z0) = (conj(z0_1)/|z0_1|, ..., conj(z0_n)/|z0_n|),
// which satisfies Re<p|z> <= ||z||_1 for every z with equality at z0. A filter
// that observes Re<p|(x_k) x> = gamma_k ||x_k||_1 is therefore pulled toward
// estimates with a lower l1 norm.

#include <functional>

#include "qcs/filter_config.hpp"
#include "qcs/types.hpp"

namespace qcs {

/// Phase row of z0. Entries with |z0_j| < eps_phase are set to zero.
CRowVector phase_row(const CVector& z0, double eps_phase = kDefaultPhaseEpsilon);

/// gamma_k = 1 - a exp(-b k). Throws DomainError for a outside [0, 1),
/// b < 0, or k < 0.
double gamma(const GammaSchedule& schedule, Index k);

/// Least-squares (m > n) or minimum-norm (m <= n) solution of C x = y.
/// Throws NumericalError if the relevant Gram matrix is singular.
CVector linear_init(const CMatrix& C, const CVector& y);

struct LinearCsResult {
  CVector x;
  ReconstructionTrace trace;
};

/// Hooks for inspecting every step of the linear reconstruction.
struct LinearCsStep {
  Index k;
  const CVector& x_before;
  const CMatrix& C_augmented;  // constraint rows plus the phase row of x_before
  const CVector& y_augmented;
  const CMatrix& R;
  const CMatrix& P_before;
  const CVector& x_after;
};
using LinearCsObserver = std::function<void(const LinearCsStep&)>;

/// Divergence guard: abort when ||x_k||_2 exceeds this multiple of ||x_0||_2.
inline constexpr double kDivergenceFactor = 1e6;

/// Settings for the linear mode: P0 = I, Q = 0.1 I, r_obs = 1e-6,
/// r_l1 = 1e-8, gamma = (0.1, 0.003), 3000 iterations. A large Q keeps the
/// filter responsive while the sign pattern of the estimate still changes.
FilterConfig linear_cs_defaults();

/// Kalman-filter l1 minimization subject to the linear constraint C x = y.
///
/// Every iteration runs the covariance-form correction with the augmented
/// observation (C; <p|(x_k)) and measurement (y; gamma_k ||x_k||_1) after a
/// prediction with A = G = I, u = 0, Q = q_scale I. Starts from `x0` if
/// given, otherwise from linear_init(C, y).
LinearCsResult linear_cs_reconstruct(const CMatrix& C, const CVector& y,
                                     const FilterConfig& config,
                                     const std::optional<CVector>& x0 = std::nullopt,
                                     const LinearCsObserver& observer = {});

}  // namespace qcs
