#include "qcs/l1_pseudo.hpp"

#include <algorithm>
#include <cmath>

#include "qcs/kalman_core.hpp"

namespace qcs {
namespace {

// Reciprocal condition number below which a Gram matrix counts as singular.
constexpr double kGramConditionFloor = 1e-13;

}  // namespace

CRowVector phase_row(const CVector& z0, double eps_phase) {
  if (!(eps_phase > 0.0)) throw DomainError("phase_row: eps_phase must be positive");
  CRowVector p(z0.size());
  for (Index j = 0; j < z0.size(); ++j) {
    const double modulus = std::abs(z0(j));
    p(j) = modulus >= eps_phase ? std::conj(z0(j)) / modulus : Complex{0.0, 0.0};
  }
  return p;
}

double gamma(const GammaSchedule& schedule, Index k) {
  schedule.validate();
  if (k < 0) throw DomainError("gamma: iteration index must be non-negative");
  return 1.0 - schedule.a * std::exp(-schedule.b * static_cast<double>(k));
}

CVector linear_init(const CMatrix& C, const CVector& y) {
  if (y.size() != C.rows()) throw DimensionError("linear_init: y must have one entry per row of C");
  const Index m = C.rows();
  const Index n = C.cols();
  if (m > n) {
    Eigen::LLT<CMatrix> gram(hermitian_part(C.adjoint() * C));
    if (gram.info() != Eigen::Success || gram.rcond() < kGramConditionFloor) {
      throw NumericalError("linear_init: C^H C is singular");
    }
    return gram.solve(C.adjoint() * y);
  }
  Eigen::LLT<CMatrix> gram(hermitian_part(C * C.adjoint()));
  if (gram.info() != Eigen::Success || gram.rcond() < kGramConditionFloor) {
    throw NumericalError("linear_init: C C^H is singular");
  }
  return C.adjoint() * gram.solve(y);
}

FilterConfig linear_cs_defaults() {
  FilterConfig c;
  c.p0_scale = 1.0;
  c.q_scale = 0.1;
  c.r_obs = 1e-6;
  c.r_l1 = 1e-8;
  c.schedule = {0.1, 0.003};
  c.max_iter = 3000;
  return c;
}

LinearCsResult linear_cs_reconstruct(const CMatrix& C, const CVector& y,
                                     const FilterConfig& config,
                                     const std::optional<CVector>& x0,
                                     const LinearCsObserver& observer) {
  config.validate();
  const Index m = C.rows();
  const Index n = C.cols();
  if (y.size() != m) throw DimensionError("linear_cs_reconstruct: y must have length m");
  if (C.size() == 0 || C.cwiseAbs().maxCoeff() == 0.0) {
    throw DomainError("linear_cs_reconstruct: sensing matrix is zero");
  }

  FilterState state;
  state.x = x0 ? *x0 : linear_init(C, y);
  if (state.x.size() != n) throw DimensionError("linear_cs_reconstruct: x0 must have length n");
  state.P = config.p0_scale * CMatrix::Identity(n, n);

  const LinearModel dynamics{CMatrix::Identity(n, n), CVector::Zero(n), CMatrix::Identity(n, n),
                             config.q_scale * CMatrix::Identity(n, n)};

  ObservationModel obs;
  obs.C.resize(m + 1, n);
  obs.C.topRows(m) = C;
  obs.R = CMatrix::Zero(m + 1, m + 1);
  obs.R.diagonal().head(m).setConstant(config.r_obs);
  obs.R(m, m) = config.r_l1;
  CVector y_aug(m + 1);
  y_aug.head(m) = y;

  const double initial_norm = state.x.norm();
  const double guard = kDivergenceFactor * (initial_norm > 0.0 ? initial_norm : 1.0);

  LinearCsResult result;
  result.trace.reserve(config.max_iter);
  for (Index k = 0; k < config.max_iter; ++k) {
    const double g = gamma(config.schedule, k);
    const CRowVector p = phase_row(state.x, config.eps_phase);
    obs.C.row(m) = p;
    y_aug(m) = g * state.x.lpNorm<1>();

    const FilterState prior = predict(state, dynamics);
    FilterState next = update_information(prior, obs, y_aug);

    const double norm = next.x.norm();
    if (!std::isfinite(norm) || norm > guard) {
      throw DivergenceError("linear_cs_reconstruct: estimate diverged", k);
    }
    if (observer) observer(LinearCsStep{k, state.x, obs.C, y_aug, obs.R, state.P, next.x});

    result.trace.l1_true.push_back(next.x.lpNorm<1>());
    result.trace.l1_linearized.push_back((p * next.x)(0).real());
    result.trace.intensity_residual_max.push_back((C * next.x - y).cwiseAbs().maxCoeff());
    result.trace.gamma.push_back(g);
    state = std::move(next);
  }
  result.trace.iterations_run = config.max_iter;
  result.trace.plateau_iteration = detect_plateau(result.trace.l1_true, config.max_iter);
  result.x = std::move(state.x);
  return result;
}

}  // namespace qcs
