#include "qcs/kalman_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qcs {
namespace {

void require_square(const CMatrix& M, const char* what) {
  if (M.rows() != M.cols()) throw DimensionError(std::string(what) + " must be square");
}

void require_hermitian(const CMatrix& M, const char* what) {
  require_square(M, what);
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (hermitian_defect(M) > kHermitianTolerance * scale) {
    throw DomainError(std::string(what) + " is not Hermitian");
  }
}

Eigen::LLT<CMatrix> factor_pd(const CMatrix& M, const char* what) {
  Eigen::LLT<CMatrix> llt(hermitian_part(M));
  if (llt.info() != Eigen::Success) {
    throw NumericalError(std::string(what) + " is not positive definite");
  }
  return llt;
}

}  // namespace

CMatrix hermitian_part(const CMatrix& M) { return 0.5 * (M + M.adjoint()); }

double hermitian_defect(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  return (M - M.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const CMatrix& H) {
  require_square(H, "eigenvalue operand");
  if (H.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian_part(H), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double spectral_norm(const CMatrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(M);
  return svd.singularValues()(0);
}

void require_hermitian_pd(const CMatrix& M, const char* what) {
  require_hermitian(M, what);
  factor_pd(M, what);
}

FilterState predict(const FilterState& state, const LinearModel& model) {
  const Index n = state.x.size();
  if (model.A.rows() != n || model.A.cols() != n) throw DimensionError("predict: A must be n x n");
  if (model.u.size() != n) throw DimensionError("predict: u must have length n");
  if (state.P.rows() != n || state.P.cols() != n) throw DimensionError("predict: P must be n x n");
  if (model.G.rows() != n || model.G.cols() != model.Q.rows()) {
    throw DimensionError("predict: G must be n x r with Q r x r");
  }
  require_square(model.Q, "predict: Q");

  FilterState out;
  out.x = model.A * state.x + model.u;
  out.P = hermitian_part(model.A * state.P * model.A.adjoint() +
                         model.G * model.Q * model.G.adjoint());
  return out;
}

FilterState update_information(const FilterState& prior, const ObservationModel& obs,
                               const CVector& y) {
  const Index n = prior.x.size();
  if (prior.P.rows() != n || prior.P.cols() != n) throw DimensionError("update: P must be n x n");
  if (obs.C.cols() != n) throw DimensionError("update: C must have n columns");
  if (obs.R.rows() != obs.C.rows() || obs.R.cols() != obs.C.rows()) {
    throw DimensionError("update: R must be m x m");
  }
  if (y.size() != obs.C.rows()) throw DimensionError("update: y must have length m");
  require_hermitian(obs.R, "update: R");
  const auto r_llt = factor_pd(obs.R, "update: R");

  if (n > 0 && min_eigenvalue(prior.P) <= kInformationEigenFloor) {
    throw NumericalError(
        "update_information: prior covariance is (near) singular; increase Q or P0");
  }
  const auto p_llt = factor_pd(prior.P, "update_information: prior covariance");
  const CMatrix identity = CMatrix::Identity(n, n);
  const CMatrix prior_information = p_llt.solve(identity);

  const CMatrix information =
      hermitian_part(prior_information + obs.C.adjoint() * r_llt.solve(obs.C));
  const auto info_llt = factor_pd(information, "update_information: posterior information");

  FilterState out;
  out.P = hermitian_part(info_llt.solve(identity));
  // P+ (P-)^-1 x- + P+ C^H R^-1 y rearranged around x-: the same vector, but a
  // zero innovation now leaves x- exactly in place instead of losing digits to
  // the large R^-1 terms.
  out.x = prior.x + info_llt.solve(obs.C.adjoint() * r_llt.solve(y - obs.C * prior.x));
  return out;
}

CovarianceCorrection correct_covariance(const CMatrix& P_minus, const CMatrix& C,
                                        const CMatrix& R) {
  if (P_minus.rows() != C.cols() || P_minus.cols() != C.cols()) {
    throw DimensionError("gain update: P must be n x n for C with n columns");
  }
  if (R.rows() != C.rows() || R.cols() != C.rows()) throw DimensionError("gain update: R must be m x m");
  require_hermitian(R, "gain update: R");
  factor_pd(R, "gain update: R");

  // U = C P^-, S = U C^H + R, K^H = S^-1 U, P^+ = P^- - K U.
  CMatrix U;
  U.noalias() = C * P_minus;
  CMatrix S = R;
  S.noalias() += U * C.adjoint();
  const auto s_llt = factor_pd(S, "gain update: innovation covariance");

  CovarianceCorrection out;
  out.K = s_llt.solve(U).adjoint();
  out.P = P_minus;
  out.P.noalias() -= out.K * U;
  out.P = hermitian_part(out.P);
  return out;
}

GainUpdate update_gain(const FilterState& prior, const ObservationModel& obs, const CVector& y) {
  const Index n = prior.x.size();
  if (obs.C.cols() != n) throw DimensionError("update: C must have n columns");
  if (y.size() != obs.C.rows()) throw DimensionError("update: y must have length m");
  auto correction = correct_covariance(hermitian_part(prior.P), obs.C, obs.R);

  GainUpdate out;
  out.state.x = prior.x + correction.K * (y - obs.C * prior.x);
  out.state.P = std::move(correction.P);
  out.K = std::move(correction.K);
  return out;
}

ConvergenceCertificate convergence_certificate(const CMatrix& C, const CMatrix& P,
                                               const CMatrix& Q, const CMatrix& R) {
  const Index n = C.cols();
  const Index m = C.rows();
  if (P.rows() != n || P.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw DimensionError("certificate: P and Q must be n x n");
  }
  if (R.rows() != m || R.cols() != m) throw DimensionError("certificate: R must be m x m");
  require_hermitian(P, "certificate: P");
  require_hermitian_pd(Q, "certificate: Q");
  require_hermitian_pd(R, "certificate: R");

  const CMatrix A = hermitian_part(C * (P + Q) * C.adjoint());
  const auto sum_llt = factor_pd(R + A, "certificate: R + C(P+Q)C^H");

  ConvergenceCertificate out;
  // E (R + A) = R with both factors Hermitian  =>  E^H = (R + A)^-1 R.
  out.E = sum_llt.solve(R).adjoint();
  out.spectral_norm = spectral_norm(out.E);

  Eigen::ComplexEigenSolver<CMatrix> eig(out.E, false);
  out.spectral_radius = m > 0 ? eig.eigenvalues().cwiseAbs().maxCoeff() : 0.0;

  // L^-1 E L with R = L L^H is the Hermitian contraction behind E.
  const auto r_llt = factor_pd(R, "certificate: R");
  const CMatrix L = r_llt.matrixL();
  const CMatrix weighted = r_llt.matrixL().solve(out.E * L);
  out.weighted_norm = spectral_norm(weighted);
  return out;
}

bool psd_order(const CMatrix& X, const CMatrix& Y, double tol) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) throw DimensionError("psd_order: shape mismatch");
  require_hermitian(X, "psd_order: X");
  require_hermitian(Y, "psd_order: Y");
  return min_eigenvalue(X - Y) >= -tol;
}

}  // namespace qcs
