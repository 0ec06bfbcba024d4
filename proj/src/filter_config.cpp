#include "qcs/filter_config.hpp"

#include <algorithm>
#include <cmath>

namespace qcs {

void GammaSchedule::validate() const {
  if (!(a >= 0.0 && a < 1.0)) throw DomainError("gamma schedule: a must lie in [0, 1)");
  if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("gamma schedule: b must be >= 0");
}

void FilterConfig::validate() const {
  if (!(p0_scale > 0.0)) throw DomainError("filter config: p0_scale must be positive");
  if (!(q_scale > 0.0)) throw DomainError("filter config: q_scale must be positive");
  if (!(r_obs > 0.0) || !(r_l1 > 0.0)) throw DomainError("filter config: variances must be positive");
  if (!(r_l1 < r_obs)) throw DomainError("filter config: r_l1 must be smaller than r_obs");
  if (max_iter < 0) throw DomainError("filter config: max_iter must be non-negative");
  if (!(eps_phase > 0.0)) throw DomainError("filter config: eps_phase must be positive");
  schedule.validate();
}

double FilterConfig::support_threshold() const { return 10.0 * std::sqrt(q_scale); }

void ReconstructionTrace::reserve(Index n) {
  const auto size = static_cast<std::size_t>(std::max<Index>(n, 0));
  l1_true.reserve(size);
  l1_linearized.reserve(size);
  intensity_residual_max.reserve(size);
  gamma.reserve(size);
}

std::optional<Index> detect_plateau(const std::vector<double>& l1, Index max_iter) {
  const Index window = std::max<Index>(1, max_iter / 20);
  for (std::size_t k = static_cast<std::size_t>(window); k < l1.size(); ++k) {
    const double now = l1[k];
    const double then = l1[k - static_cast<std::size_t>(window)];
    const double scale = std::max(std::abs(now), 1e-300);
    if (std::abs(now - then) / scale < kPlateauTolerance) return static_cast<Index>(k);
  }
  return std::nullopt;
}

}  // namespace qcs
