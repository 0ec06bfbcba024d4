#include "qcs/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "qcs/kalman_core.hpp"
#include "qcs/random.hpp"
#include "qcs/scattering_model.hpp"

namespace qcs {
namespace {

constexpr double kAlgebraTol = 1e-10;
constexpr double kRankOneTol = 1e-12;
constexpr double kForwardTol = 1e-10;
constexpr double kFormTol = 1e-8;
constexpr double kCertificateTol = 1e-10;
constexpr double kOrderTol = 1e-10;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double rel_diff(const CMatrix& a, const CMatrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

SuiteResult toeplitz_suite(const VerifyOptions& opt) {
  const auto sensor = opt.sensor ? opt.sensor : toeplitz_matrix;
  double worst_orth = 0.0, worst_sum = 0.0, worst_rank = 0.0, worst_herm = 0.0;
  for (Index n : {2, 4, 7, 117}) {
    std::vector<CMatrix> T;
    for (Index r = 0; r < n; ++r) T.push_back(sensor(r, n));
    // Products T_r T_s for s >= r in one go: T_r [T_r ... T_{n-1}]. The
    // remaining pairs are adjoints of these because every T_r is Hermitian,
    // which is checked below.
    CMatrix stacked(n, n * n);
    for (Index s = 0; s < n; ++s) stacked.middleCols(s * n, n) = T[static_cast<std::size_t>(s)];
    CMatrix sum = CMatrix::Zero(n, n);
    for (Index r = 0; r < n; ++r) {
      const CMatrix& Tr = T[static_cast<std::size_t>(r)];
      worst_herm = std::max(worst_herm, hermitian_defect(Tr));
      const CMatrix products = Tr * stacked.rightCols((n - r) * n);
      for (Index s = r; s < n; ++s) {
        CMatrix dev = products.middleCols((s - r) * n, n);
        if (r == s) dev -= static_cast<double>(n) * Tr;
        worst_orth = std::max(worst_orth, dev.cwiseAbs().maxCoeff());
      }
      sum += Tr;
      const CVector v = sensor_vector(r, n);
      worst_rank = std::max(worst_rank, (Tr - v * v.adjoint()).cwiseAbs().maxCoeff());
    }
    sum.diagonal().array() -= static_cast<double>(n);
    worst_sum = std::max(worst_sum, sum.cwiseAbs().maxCoeff());
  }
  SuiteResult out{"toeplitz_algebra", false, std::max(worst_orth, worst_sum), ""};
  out.passed = worst_orth <= kAlgebraTol && worst_sum <= kAlgebraTol && worst_rank <= kRankOneTol &&
               worst_herm <= kRankOneTol;
  out.detail = "orthogonality " + num(worst_orth) + ", completeness " + num(worst_sum) +
               ", rank-one " + num(worst_rank) +
               ", hermitian " + num(worst_herm);
  return out;
}

SuiteResult forward_suite(const VerifyOptions& opt) {
  Rng rng(7001);
  double worst = 0.0;
  const int count = std::max(opt.seeds / 2, 1);
  for (int t = 0; t < count; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(24));
    const CVector x = rng.complex_vector(n);
    const RVector fast = intensity_1d(x);
    RVector slow(n);
    for (Index r = 0; r < n; ++r) {
      const CMatrix T = toeplitz_matrix(r, n);
      Complex acc{0.0, 0.0};
      for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q) acc += std::conj(x(p)) * T(p, q) * x(q);
      slow(r) = acc.real();
    }
    worst = std::max(worst, (fast - slow).cwiseAbs().maxCoeff() / slow.cwiseAbs().maxCoeff());

    const Index n1 = 1 + static_cast<Index>(rng.below(5));
    const Index n2 = 1 + static_cast<Index>(rng.below(6));
    const Index M = 1 + static_cast<Index>(rng.below(3));
    Scenario2D sc{n1, n2, M, rng.complex_matrix(n1, n2)};
    const RVector fast2 = intensity_2d(sc);
    const CVector xv = vectorize(sc.amplitudes);
    RVector slow2(n1 * n2);
    for (Index r1 = 0; r1 < n1; ++r1) {
      for (Index r2 = 0; r2 < n2; ++r2) {
        const CMatrix W = kron_product(toeplitz_matrix(r1, n1), toeplitz_matrix(r2, n2));
        slow2(r1 * n2 + r2) = static_cast<double>(M * M) * (xv.adjoint() * W * xv)(0).real();
      }
    }
    worst = std::max(worst, (fast2 - slow2).cwiseAbs().maxCoeff() / slow2.cwiseAbs().maxCoeff());
  }
  return {"forward_oracle", worst <= kForwardTol, worst,
          std::to_string(2 * count) + " random inputs, worst relative deviation " + num(worst)};
}

SuiteResult form_suite(const VerifyOptions& opt) {
  Rng rng(7002);
  double worst = 0.0;
  for (int t = 0; t < opt.seeds; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(20));
    const Index m = 1 + static_cast<Index>(rng.below(20));
    FilterState prior{rng.complex_vector(n), rng.hermitian_pd(n)};
    ObservationModel obs{rng.complex_matrix(m, n), rng.hermitian_pd(m)};
    const CVector y = rng.complex_vector(m);
    const FilterState a = update_information(prior, obs, y);
    const GainUpdate b = update_gain(prior, obs, y);
    worst = std::max({worst, rel_diff(a.x, b.state.x), rel_diff(a.P, b.state.P)});
  }
  return {"form_equivalence", worst <= kFormTol, worst,
          std::to_string(opt.seeds) + " instances, worst relative deviation " + num(worst)};
}

SuiteResult certificate_suite(const VerifyOptions& opt) {
  Rng rng(7003);
  double worst_weighted = 0.0, worst_radius = 0.0, max_spectral = 0.0, min_eig = 1.0;
  for (int t = 0; t < opt.seeds; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(12));
    const Index m = 1 + static_cast<Index>(rng.below(12));
    const CMatrix C = rng.complex_matrix(m, n);
    const CMatrix P = rng.hermitian_psd(n, 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
    const CMatrix Q = rng.hermitian_pd(n);
    const CMatrix R = rng.hermitian_pd(m);
    const ConvergenceCertificate cert = convergence_certificate(C, P, Q, R);
    worst_weighted = std::max(worst_weighted, cert.weighted_norm);
    worst_radius = std::max(worst_radius, cert.spectral_radius);
    max_spectral = std::max(max_spectral, cert.spectral_norm);
    const Eigen::ComplexEigenSolver<CMatrix> es(cert.E, false);
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
      min_eig = std::min(min_eig, es.eigenvalues()(i).real());
    }
  }
  SuiteResult out{"certificate", false, max_spectral, ""};
  out.passed = worst_weighted <= 1.0 + kCertificateTol && worst_radius <= 1.0 + kCertificateTol &&
               min_eig > 0.0;
  out.detail = std::to_string(opt.seeds) + " instances, R^-1-weighted norm max " +
               num(worst_weighted) + ", spectral radius max " + num(worst_radius) +
               ", plain spectral norm max " + num(max_spectral) +
               (max_spectral > 1.0 + kCertificateTol ? " (exceeds 1 for non-scalar R)" : "");
  return out;
}

SuiteResult ordering_suite(const VerifyOptions& opt) {
  Rng rng(7004);
  int failures = 0;
  for (int t = 0; t < opt.seeds; ++t) {
    const Index m = 1 + static_cast<Index>(rng.below(12));
    const CMatrix R = rng.hermitian_pd(m);
    const CMatrix X = rng.hermitian_psd(m, 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(m))));
    const CMatrix RX = R + X;
    const CMatrix I = CMatrix::Identity(m, m);
    const CMatrix R_inv = hermitian_part(R.llt().solve(I));
    const CMatrix RX_inv = hermitian_part(RX.llt().solve(I));
    if (!psd_order(RX, R, kOrderTol)) ++failures;
    if (!psd_order(R_inv, RX_inv, kOrderTol)) ++failures;
  }
  return {"appendix_b_ordering", failures == 0, static_cast<double>(failures),
          std::to_string(opt.seeds) + " instances, " + std::to_string(failures) + " violations"};
}

}  // namespace

CMatrix broken_toeplitz_matrix(Index r, Index n) {
  CMatrix T = toeplitz_matrix(r, n);
  if (r == 1) T *= 1.01;
  return T;
}

std::vector<SuiteResult> run_verify(const VerifyOptions& options) {
  if (options.seeds <= 0) throw DomainError("verify: seeds must be positive");
  return {toeplitz_suite(options), forward_suite(options), form_suite(options),
          certificate_suite(options), ordering_suite(options)};
}

}  // namespace qcs
