#include "qcs/quadratic_reconstruction.hpp"

#include <cmath>
#include <limits>

#include "qcs/l1_pseudo.hpp"

namespace qcs {
namespace {

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

CVector conjugate_reflection(const CVector& x) { return x.reverse().conjugate(); }

CVector cyclic_shift(const CVector& x, Index row_shift, Index col_shift, const GridShape& shape) {
  CVector out(x.size());
  for (Index i = 0; i < shape.rows; ++i) {
    const Index src_i = wrap(i - row_shift, shape.rows);
    for (Index j = 0; j < shape.cols; ++j) {
      out(i * shape.cols + j) = x(src_i * shape.cols + wrap(j - col_shift, shape.cols));
    }
  }
  return out;
}

FilterState filter_step(const FilterState& state, const LinearizedObservation& lin, double q_scale,
                        const CMatrix& R) {
  const Index n = state.x.size();
  CMatrix P_minus = state.P;
  P_minus.diagonal().array() += q_scale;
  auto correction = correct_covariance(P_minus, lin.C, R);

  // C x_k is real at the linearization point; Re[] removes rounding and
  // keeps the update well defined away from it.
  const RVector innovation = (lin.y.cast<Complex>() - lin.C * state.x + lin.s).real();
  if (!innovation.allFinite()) throw DivergenceError("ekf_step: innovation is not finite", 0);

  FilterState next;
  next.x = state.x + correction.K * innovation.cast<Complex>();
  next.P = std::move(correction.P);
  if (!next.x.allFinite() || next.x.size() != n) {
    throw DivergenceError("ekf_step: estimate is not finite", 0);
  }
  return next;
}

}  // namespace

LinearizedObservation build_linearization(const CVector& x, const SensorFamily& sensors,
                                          double gamma_k, const RVector& measured,
                                          double eps_phase) {
  const Index n = sensors.size();
  if (x.size() != n) throw DimensionError("linearization: estimate length does not match sensors");
  if (measured.size() != n) throw DimensionError("linearization: one intensity per sensor expected");
  if (x.squaredNorm() == 0.0) throw DomainError("linearization: estimate must be nonzero");

  const CVector a = sensors.coefficients(x);
  const double pref = sensors.prefactor();

  LinearizedObservation lin;
  lin.C.resize(n + 1, n);
  // Row j = 2 <x|T_j = 2 prefactor conj(a_j) w_j^H.
  lin.C.topRows(n).noalias() = (2.0 * pref * a.conjugate()).asDiagonal() * sensors.analysis_matrix();
  lin.C.row(n) = phase_row(x, eps_phase);

  lin.s.resize(n + 1);
  lin.s.head(n) = (pref * a.cwiseAbs2()).cast<Complex>();
  lin.s(n) = Complex{0.0, 0.0};

  lin.y.resize(n + 1);
  lin.y.head(n) = measured;
  lin.y(n) = gamma_k * x.lpNorm<1>();
  return lin;
}

CMatrix observation_covariance(Index m, const FilterConfig& config) {
  CMatrix R = CMatrix::Zero(m + 1, m + 1);
  R.diagonal().head(m).setConstant(config.r_obs);
  R(m, m) = config.r_l1;
  return R;
}

FilterState ekf_step(const FilterState& state, const LinearizedObservation& lin,
                     const FilterConfig& config) {
  const Index rows = lin.C.rows();
  if (lin.s.size() != rows || lin.y.size() != rows) {
    throw DimensionError("ekf_step: linearization parts disagree in length");
  }
  if (lin.C.cols() != state.x.size()) throw DimensionError("ekf_step: C does not match the state");
  return filter_step(state, lin, config.q_scale, observation_covariance(rows - 1, config));
}

Reconstruction reconstruct(const RVector& measured, const CVector& x0,
                           const SensorFamily& sensors, const FilterConfig& config,
                           const ReconstructionObserver& observer) {
  config.validate();
  const Index n = sensors.size();
  if (measured.size() != n) throw DimensionError("reconstruct: one intensity per sensor expected");
  if (x0.size() != n) throw DimensionError("reconstruct: x0 length does not match sensors");
  if (x0.squaredNorm() == 0.0) throw DomainError("reconstruct: x0 must be nonzero");

  FilterState state{x0, config.p0_scale * CMatrix::Identity(n, n)};
  const CMatrix R = observation_covariance(n, config);
  const double guard = kDivergenceFactor * x0.norm();

  Reconstruction out;
  out.trace.reserve(config.max_iter);
  for (Index k = 0; k < config.max_iter; ++k) {
    const double g = gamma(config.schedule, k);
    const LinearizedObservation lin =
        build_linearization(state.x, sensors, g, measured, config.eps_phase);

    FilterState next;
    try {
      next = filter_step(state, lin, config.q_scale, R);
    } catch (const DivergenceError&) {
      throw DivergenceError("reconstruct: estimate is not finite", k);
    } catch (const NumericalError& e) {
      // loss of positive definiteness mid-run is a breakdown of the filter
      throw DivergenceError(std::string("reconstruct: ") + e.what(), k);
    }
    const double norm = next.x.norm();
    if (norm > guard) throw DivergenceError("reconstruct: estimate diverged", k);
    if (norm == 0.0) throw DivergenceError("reconstruct: estimate collapsed to zero", k);

    if (observer) observer(ReconstructionStep{k, g, state, lin, next});

    out.trace.l1_true.push_back(next.x.lpNorm<1>());
    out.trace.l1_linearized.push_back((lin.C.row(n) * next.x)(0).real());
    out.trace.intensity_residual_max.push_back(
        (sensors.intensities(next.x) - measured).cwiseAbs().maxCoeff());
    out.trace.gamma.push_back(g);
    state = std::move(next);
  }
  out.trace.iterations_run = config.max_iter;
  out.trace.plateau_iteration = detect_plateau(out.trace.l1_true, config.max_iter);
  out.x = std::move(state.x);
  return out;
}

CVector apply_alignment(const CVector& x, const Alignment& g, const GridShape& shape) {
  if (x.size() != shape.size()) throw DimensionError("alignment: length does not match grid");
  const CVector base = g.reflected ? conjugate_reflection(x) : x;
  return std::polar(1.0, g.phase) * cyclic_shift(base, g.row_shift, g.col_shift, shape);
}

CVector align_to_reference(const CVector& x_est, const Alignment& g, const GridShape& shape) {
  if (x_est.size() != shape.size()) throw DimensionError("alignment: length does not match grid");
  const CVector unshifted =
      cyclic_shift(std::polar(1.0, -g.phase) * x_est, -g.row_shift, -g.col_shift, shape);
  return g.reflected ? conjugate_reflection(unshifted) : unshifted;
}

AlignedError aligned_error(const CVector& x_est, const CVector& x_ref, const GridShape& shape) {
  if (x_est.size() != x_ref.size()) throw DimensionError("aligned_error: length mismatch");
  if (x_ref.size() != shape.size()) throw DimensionError("aligned_error: length does not match grid");

  const double est_sq = x_est.squaredNorm();
  const double ref_sq = x_ref.squaredNorm();
  double best = std::numeric_limits<double>::infinity();
  AlignedError out;
  for (bool reflected : {false, true}) {
    const CVector base = reflected ? conjugate_reflection(x_ref) : x_ref;
    for (Index dr = 0; dr < shape.rows; ++dr) {
      for (Index dc = 0; dc < shape.cols; ++dc) {
        const CVector candidate = cyclic_shift(base, dr, dc, shape);
        const Complex overlap = candidate.dot(x_est);  // <candidate|x_est>
        const double err_sq = est_sq + ref_sq - 2.0 * std::abs(overlap);
        if (err_sq < best) {
          best = err_sq;
          out.alignment = Alignment{dr, dc, reflected, std::arg(overlap)};
        }
      }
    }
  }
  out.error = (x_est - apply_alignment(x_ref, out.alignment, shape)).norm();
  return out;
}

AlignedError aligned_error(const CVector& x_est, const CVector& x_ref) {
  return aligned_error(x_est, x_ref, GridShape::line(x_ref.size()));
}

}  // namespace qcs
