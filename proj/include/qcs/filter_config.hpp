#pragma once

#include <optional>
#include <vector>

#include "qcs/types.hpp"

namespace qcs {

/// Lowering factor gamma_k = 1 - a exp(-b k) for the l1 pseudo-measurement.
struct GammaSchedule {
  double a = 0.1;
  double b = 0.0019;

  void validate() const;
};

/// Below this modulus an entry contributes a zero to the phase row.
inline constexpr double kDefaultPhaseEpsilon = 1e-12;

struct FilterConfig {
  double p0_scale = 0.3;  // P0 = p0_scale * I
  double q_scale = 1e-8;  // Q  = q_scale * I
  double r_obs = 1e-4;    // variance of every constraint row
  double r_l1 = 1e-6;     // variance of the l1 pseudo-measurement row
  GammaSchedule schedule{};
  Index max_iter = 1200;
  double eps_phase = kDefaultPhaseEpsilon;

  /// Throws DomainError unless all scales are positive and r_l1 < r_obs.
  void validate() const;

  /// Moduli below this are reported as off-support: 10 sqrt(q_scale).
  double support_threshold() const;
};

/// Per-iteration record of a reconstruction. Entry k describes the estimate
/// x_{k+1} produced by the k-th step.
struct ReconstructionTrace {
  std::vector<double> l1_true;        // ||x_{k+1}||_1
  std::vector<double> l1_linearized;  // Re <p(x_k)|x_{k+1}>
  std::vector<double> intensity_residual_max;  // max_j |model_j(x_{k+1}) - y_j|
  std::vector<double> gamma;          // gamma_k used by the step
  Index iterations_run = 0;
  // First iteration at which the relative l1 change over a trailing window
  // of 5% of max_iter fell below kPlateauTolerance. Informational only.
  std::optional<Index> plateau_iteration;

  void reserve(Index n);
};

inline constexpr double kPlateauTolerance = 1e-6;

/// Scans the l1 trace for the plateau described above.
std::optional<Index> detect_plateau(const std::vector<double>& l1, Index max_iter);

}  // namespace qcs
