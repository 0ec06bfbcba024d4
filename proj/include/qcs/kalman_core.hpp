#pragma once

// Complex-valued Kalman filter primitives.
//
// State model      x_{k+1} = A x_k + u + G w,  Cov(w) = Q
// Observation      y_k     = C x_k + v,        Cov(v) = R
//
// All covariances are Hermitian; they are re-symmetrized after every update
// because the update equations only preserve Hermiticity in exact arithmetic.

#include "qcs/types.hpp"

namespace qcs {

struct FilterState {
  CVector x;  // estimate
  CMatrix P;  // covariance, Hermitian PSD
};

struct LinearModel {
  CMatrix A;  // n x n evolution
  CVector u;  // deterministic shift
  CMatrix G;  // n x r noise input
  CMatrix Q;  // r x r process noise covariance, Hermitian PD
};

struct ObservationModel {
  CMatrix C;  // m x n sensing matrix
  CMatrix R;  // m x m measurement noise covariance, Hermitian PD
};

/// Smallest eigenvalue of P^- accepted by the information form.
inline constexpr double kInformationEigenFloor = 1e-14;

/// Tolerance used when checking that inputs are Hermitian.
inline constexpr double kHermitianTolerance = 1e-10;

/// x^- = A x^+ + u,  P^- = A P^+ A^H + G Q G^H.
FilterState predict(const FilterState& state, const LinearModel& model);

/// Correction in covariance (information) form:
///   (P^+)^-1 = (P^-)^-1 + C^H R^-1 C
///   x^+      = P^+ (P^-)^-1 x^- + P^+ C^H R^-1 y
/// Throws NumericalError if P^- is not safely invertible or R is not PD.
FilterState update_information(const FilterState& prior, const ObservationModel& obs,
                               const CVector& y);

/// Gain K = P^- C^H (C P^- C^H + R)^-1 and the corrected covariance
/// P^+ = (I - K C) P^-. Works for positive semidefinite P^-.
struct CovarianceCorrection {
  CMatrix K;
  CMatrix P;
};
CovarianceCorrection correct_covariance(const CMatrix& P_minus, const CMatrix& C,
                                        const CMatrix& R);

struct GainUpdate {
  CMatrix K;
  FilterState state;
};

/// Correction in gain form: x^+ = x^- + K (y - C x^-).
GainUpdate update_gain(const FilterState& prior, const ObservationModel& obs, const CVector& y);

/// Contraction matrix E = R (R + C (P + Q) C^H)^-1 relating successive
/// residuals C x_{k+1} - y = E (C x_k - y) of one predict/update cycle.
///
/// E is similar to the Hermitian matrix (I + R^-1/2 C (P+Q) C^H R^-1/2)^-1,
/// so its eigenvalues are real and lie in (0, 1]; `weighted_norm` is the
/// spectral norm of that Hermitian form (the R^-1-weighted residual
/// contraction factor). `spectral_norm` is the largest singular value of E
/// itself, which only equals the weighted norm when R is a multiple of the
/// identity.
struct ConvergenceCertificate {
  CMatrix E;
  double spectral_norm = 0.0;
  double spectral_radius = 0.0;
  double weighted_norm = 0.0;
};
ConvergenceCertificate convergence_certificate(const CMatrix& C, const CMatrix& P,
                                               const CMatrix& Q, const CMatrix& R);

/// Loewner order: X >= Y iff the smallest eigenvalue of X - Y is >= -tol.
bool psd_order(const CMatrix& X, const CMatrix& Y, double tol);

// Small dense helpers shared by the filter code and its checks.
CMatrix hermitian_part(const CMatrix& M);
double hermitian_defect(const CMatrix& M);  // max |M - M^H|
double min_eigenvalue(const CMatrix& H);    // H Hermitian
double spectral_norm(const CMatrix& M);     // largest singular value
void require_hermitian_pd(const CMatrix& M, const char* what);

}  // namespace qcs
