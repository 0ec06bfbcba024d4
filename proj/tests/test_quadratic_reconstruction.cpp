#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "qcs/l1_pseudo.hpp"
#include "qcs/quadratic_reconstruction.hpp"
#include "qcs/random.hpp"

using namespace qcs;

namespace {

double min_eig(const CMatrix& H) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(H), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CVector shifted(const CVector& x, Index q) {
  CVector y(x.size());
  for (Index k = 0; k < x.size(); ++k) y(k) = x((k + q) % x.size());
  return y;
}

// Small 1D problem used by several cases: three scatterers on 24 sites.
struct Small {
  SensorFamily sensors = SensorFamily::line(24);
  CVector truth = CVector::Zero(24);
  RVector measured;
  CVector x0;
  FilterConfig config;

  Small() {
    truth(6) = std::polar(1.0, 0.4);
    truth(7) = std::polar(0.8, -0.9);
    truth(15) = std::polar(0.5, 2.0);
    measured = sensors.intensities(truth);
    LeakageSpec leak{{6, 7, 15}, 0.2, 0.8, 1.0};
    x0 = build_initial_guess(truth, leak, GridShape::line(24));
    config.max_iter = 150;
  }
};

}  // namespace

TEST_CASE("build_linearization hand example") {
  CVector x(2);
  x << 1.0, 0.0;
  RVector measured(2);
  measured << 3.0, 4.0;
  const LinearizedObservation lin = build_linearization(x, SensorFamily::line(2), 0.7, measured);
  REQUIRE(lin.C.rows() == 3);
  CMatrix expected(3, 2);
  expected << 2.0, 2.0, 2.0, -2.0, 1.0, 0.0;
  CHECK(oracle::max_abs(lin.C - expected) < 1e-15);
  CHECK(std::abs(lin.s(0) - 1.0) < 1e-15);
  CHECK(std::abs(lin.s(1) - 1.0) < 1e-15);
  CHECK(lin.s(2) == Complex{0.0, 0.0});
  CHECK(lin.y(0) == 3.0);
  CHECK(lin.y(1) == 4.0);
  CHECK(lin.y(2) == doctest::Approx(0.7));

  CHECK_THROWS_AS(build_linearization(CVector::Zero(2), SensorFamily::line(2), 0.7, measured), DomainError);
  CHECK_THROWS_AS(build_linearization(x, SensorFamily::line(3), 0.7, measured), DimensionError);
}

TEST_CASE("build_linearization against the dense quadratic forms") {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    const CVector x = rng.complex_vector(10);
    const RVector measured = RVector::Random(10).cwiseAbs();
    const LinearizedObservation lin = build_linearization(x, SensorFamily::line(10), 0.9, measured);
    const RVector q = intensity_1d(x);
    for (Index r = 0; r < 10; ++r) {
      const CMatrix T = oracle::toeplitz(r, 10);
      const CRowVector row = 2.0 * x.adjoint() * T;
      CHECK(oracle::max_abs(lin.C.row(r) - row) <= 1e-12 * q.maxCoeff());
      CHECK(std::abs(lin.s(r).real() - q(r)) <= 1e-12 * q.maxCoeff());
      CHECK(std::abs(lin.s(r).imag()) <= 1e-10);
    }
    CHECK(oracle::max_abs(lin.C.row(10) - phase_row(x)) == 0.0);
    CHECK(lin.s(10) == Complex{0.0, 0.0});
    CHECK(lin.y(10) == doctest::Approx(0.9 * x.lpNorm<1>()));
  }

  // grid: rows are 2 M^2 <x| (T_r1 (x) T_r2)
  const SensorFamily g = SensorFamily::grid(3, 4, 2);
  const CVector x = rng.complex_vector(12);
  const LinearizedObservation lin = build_linearization(x, g, 1.0, g.intensities(x));
  for (Index j = 0; j < 12; ++j) {
    const auto [r1, r2] = unflatten_index(g.shape(), j);
    const CMatrix W = 4.0 * oracle::kron(oracle::toeplitz(r1, 3), oracle::toeplitz(r2, 4));
    CHECK(oracle::rel(lin.C.row(j), 2.0 * x.adjoint() * W) < 1e-12);
    CHECK(std::abs(lin.s(j).real() - oracle::quadratic_form(W, x)) <= 1e-10 * lin.s.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("tangency: zero innovation at the linearization point") {
  Rng rng(42);
  const CVector x = rng.complex_vector(12);
  const SensorFamily sensors = SensorFamily::line(12);
  const LinearizedObservation lin = build_linearization(x, sensors, 1.0, sensors.intensities(x));
  const RVector innovation = (lin.y.cast<Complex>() - lin.C * x + lin.s).real();
  CHECK(innovation.cwiseAbs().maxCoeff() <= 1e-10 * lin.y.maxCoeff());

  FilterConfig cfg;
  const FilterState s{x, 0.3 * CMatrix::Identity(12, 12)};
  const FilterState next = ekf_step(s, lin, cfg);
  CHECK(oracle::max_abs(next.x - x) <= 1e-9);
  // the covariance still follows the gain-form equations
  CMatrix Pm = s.P;
  Pm.diagonal().array() += cfg.q_scale;
  const CMatrix R = observation_covariance(12, cfg);
  const CMatrix K = Pm * lin.C.adjoint() * oracle::inverse(lin.C * Pm * lin.C.adjoint() + R);
  // S is badly conditioned by the small R, so compare on the scale of Pm
  CHECK((next.P - (CMatrix::Identity(12, 12) - K * lin.C) * Pm).norm() <= 1e-8 * Pm.norm());
}

TEST_CASE("observation_covariance") {
  FilterConfig cfg;
  const CMatrix R = observation_covariance(3, cfg);
  REQUIRE(R.rows() == 4);
  REQUIRE(R.cols() == 4);
  CHECK(R(0, 0).real() == 1e-4);
  CHECK(R(2, 2).real() == 1e-4);
  CHECK(R(3, 3).real() == 1e-6);
  CHECK(oracle::max_abs(R - CMatrix(R.diagonal().asDiagonal())) == 0.0);
}

TEST_CASE("ekf_step scalar toy") {
  LinearizedObservation lin;
  lin.C = CMatrix::Constant(1, 1, Complex{2.0, 0.0});
  lin.s = CVector::Constant(1, Complex{0.5, 0.0});
  lin.y = RVector::Constant(1, 3.0);
  FilterConfig cfg;
  cfg.q_scale = 0.1;
  cfg.r_obs = 1.0;
  cfg.r_l1 = 0.5;  // the single row is the last one
  const FilterState s{CVector::Constant(1, Complex{1.0, 0.0}), CMatrix::Constant(1, 1, Complex{0.4, 0.0})};
  const FilterState next = ekf_step(s, lin, cfg);
  // K = 0.5 * 2 / (4 * 0.5 + 0.5) = 0.4; innovation = 3 - 2 + 0.5 = 1.5
  CHECK(next.x(0).real() == doctest::Approx(1.0 + 0.4 * 1.5));
  CHECK(next.P(0, 0).real() == doctest::Approx((1.0 - 0.4 * 2.0) * 0.5));

  LinearizedObservation bad = lin;
  bad.y(0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ekf_step(s, bad, cfg), DivergenceError);
}

TEST_CASE("per-step properties along a run") {
  Small p;
  int steps = 0;
  const CMatrix R = observation_covariance(24, p.config);
  const auto llt = R.llt();
  reconstruct(p.measured, p.x0, p.sensors, p.config, [&](const ReconstructionStep& st) {
    ++steps;
    const LinearizedObservation& lin = st.linearization;
    const RVector q = p.sensors.intensities(st.before.x);
    // bias equals the forward model at x_k
    CHECK((lin.s.head(24).real() - q).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, q.maxCoeff()));
    CHECK(lin.s.head(24).imag().cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(lin.s(24) == Complex{0.0, 0.0});

    // innovation covariance is Hermitian positive definite
    CMatrix Pm = st.before.P;
    Pm.diagonal().array() += p.config.q_scale;
    CHECK(min_eig(lin.C * Pm * lin.C.adjoint() + R) > 0.0);

    // Gram matrix of the augmented rows is positive definite while the
    // spectrum of x_k has no zeros
    CHECK(min_eig(lin.C.adjoint() * lin.C) > 0.0);

    // weighted residual contraction with the frozen linearization
    const CVector target = lin.y.cast<Complex>() + lin.s;
    const CVector before = lin.C * st.before.x - target;
    const CVector after = lin.C * st.after.x - target;
    CHECK(llt.matrixL().solve(after).norm() <= llt.matrixL().solve(before).norm() * (1.0 + 1e-9) + 1e-12);

    // covariance stays Hermitian PSD
    CHECK(hermitian_defect(st.after.P) == 0.0);
    CHECK(min_eig(st.after.P) >= -1e-10);
  });
  CHECK(steps == p.config.max_iter);
}

TEST_CASE("Gram positivity needs a spectrum without zeros") {
  // x = (1, 1, 1): its DFT vanishes at r = 1, 2, so those intensity rows are
  // zero and only two directions remain.
  CVector x(3);
  x << 1.0, 1.0, 1.0;
  const LinearizedObservation lin =
      build_linearization(x, SensorFamily::line(3), 1.0, RVector::Zero(3));
  CHECK(min_eig(lin.C.adjoint() * lin.C) < 1e-12);

  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const CVector z = rng.complex_vector(9);
    const LinearizedObservation l2 = build_linearization(z, SensorFamily::line(9), 1.0, RVector::Zero(9));
    CHECK(min_eig(l2.C.adjoint() * l2.C) > 0.0);
  }
}

TEST_CASE("fixed point at the exact solution with gamma = 1") {
  Small p;
  p.config.schedule = {0.0, 0.0};
  p.config.max_iter = 50;
  const Reconstruction r = reconstruct(p.measured, p.truth, p.sensors, p.config);
  CHECK(oracle::max_abs(r.x - p.truth) <= 1e-9);
}

TEST_CASE("single delta is recovered up to symmetry") {
  const SensorFamily sensors = SensorFamily::line(16);
  CVector truth = CVector::Zero(16);
  truth(5) = std::polar(1.0, 0.3);
  const CVector x0 = build_initial_guess(truth, LeakageSpec{{5}, 0.2, 0.9, 1.0}, GridShape::line(16));
  // the modulus trails gamma_k, so run until gamma is within 1e-6 of one
  FilterConfig cfg;
  cfg.max_iter = 6000;
  const Reconstruction r = reconstruct(sensors.intensities(truth), x0, sensors, cfg);
  CHECK(aligned_error(r.x, truth).error <= 1e-5);
}

TEST_CASE("reconstruct is deterministic and sized consistently") {
  Small p;
  p.config.max_iter = 40;
  const Reconstruction a = reconstruct(p.measured, p.x0, p.sensors, p.config);
  const Reconstruction b = reconstruct(p.measured, p.x0, p.sensors, p.config);
  CHECK(a.trace.l1_true == b.trace.l1_true);
  CHECK(a.trace.l1_linearized == b.trace.l1_linearized);
  CHECK(a.trace.intensity_residual_max == b.trace.intensity_residual_max);
  CHECK(a.x == b.x);
  CHECK(a.trace.iterations_run == 40);
  CHECK(a.trace.l1_true.size() == 40);
  CHECK(a.trace.gamma.front() == doctest::Approx(0.9));
  for (std::size_t k = 0; k < a.trace.l1_true.size(); ++k) {
    // the linearized norm never exceeds the true one
    CHECK(a.trace.l1_linearized[k] <= a.trace.l1_true[k] + 1e-12);
  }

  p.config.max_iter = 0;
  const Reconstruction none = reconstruct(p.measured, p.x0, p.sensors, p.config);
  CHECK(none.x == p.x0);
  CHECK(none.trace.l1_true.empty());
}

TEST_CASE("reconstruct argument checks") {
  Small p;
  CHECK_THROWS_AS(reconstruct(p.measured.head(10), p.x0, p.sensors, p.config), DimensionError);
  CHECK_THROWS_AS(reconstruct(p.measured, p.x0.head(10), p.sensors, p.config), DimensionError);
  CHECK_THROWS_AS(reconstruct(p.measured, CVector::Zero(24), p.sensors, p.config), DomainError);
  FilterConfig bad = p.config;
  bad.r_l1 = 1.0;
  CHECK_THROWS_AS(reconstruct(p.measured, p.x0, p.sensors, bad), DomainError);

  // an absurd prior breaks the filter within the first steps
  FilterConfig wild = p.config;
  wild.p0_scale = 1e30;
  try {
    reconstruct(p.measured, p.x0, p.sensors, wild);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.iteration() <= 1);
  }
}

TEST_CASE("aligned_error on the symmetry group") {
  Rng rng(44);
  const CVector x = rng.complex_vector(11);
  CHECK(aligned_error(std::polar(1.0, 1.3) * x, x).error < 1e-12);
  CHECK(aligned_error(shifted(x, 3), x).error < 1e-12);
  const CVector refl = x.reverse().conjugate();
  const AlignedError ar = aligned_error(refl, x);
  CHECK(ar.error < 1e-12);
  CHECK(ar.alignment.reflected);

  // all three at once, and the inverse map
  const CVector mixed = std::polar(1.0, -2.0) * shifted(refl, 7);
  const AlignedError am = aligned_error(mixed, x);
  CHECK(am.error < 1e-12);
  const GridShape line = GridShape::line(11);
  CHECK(oracle::max_abs(apply_alignment(x, am.alignment, line) - mixed) < 1e-12);
  CHECK(oracle::max_abs(align_to_reference(mixed, am.alignment, line) - x) < 1e-12);

  // something genuinely different keeps a positive distance
  const CVector other = rng.complex_vector(11);
  CHECK(aligned_error(other, x).error > 0.1);
  CHECK(aligned_error(other, x).error <= (other - x).norm() + 1e-12);

  CHECK_THROWS_AS(aligned_error(x, x.head(5)), DimensionError);
}

TEST_CASE("aligned_error on a grid uses 2D shifts and the point reflection") {
  Rng rng(45);
  const GridShape shape = GridShape::grid(4, 5);
  const CVector x = rng.complex_vector(20);
  const CMatrix X = unvectorize(x, shape);
  CMatrix Y(4, 5);
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 5; ++c) Y((r + 1) % 4, (c + 3) % 5) = X(r, c);
  const AlignedError e = aligned_error(vectorize(Y), x, shape);
  CHECK(e.error < 1e-12);
  CHECK(e.alignment.row_shift == 1);
  CHECK(e.alignment.col_shift == 3);
  CHECK_FALSE(e.alignment.reflected);

  CMatrix Z(4, 5);
  for (Index r = 0; r < 4; ++r)
    for (Index c = 0; c < 5; ++c) Z(3 - r, 4 - c) = std::conj(X(r, c));
  CHECK(aligned_error(vectorize(Z), x, shape).error < 1e-12);
  // the point reflection leaves grid intensities unchanged
  const SensorFamily g = SensorFamily::grid(4, 5);
  CHECK(oracle::max_abs(g.intensities(vectorize(Z)) - g.intensities(x)) < 1e-10 * g.intensities(x).maxCoeff());
}
