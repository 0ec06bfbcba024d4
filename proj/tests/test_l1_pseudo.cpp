#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "qcs/l1_pseudo.hpp"
#include "qcs/random.hpp"

using namespace qcs;

namespace {

const Complex I{0.0, 1.0};

struct SparseInstance {
  CMatrix C;
  CVector x;
  CVector y;
};

SparseInstance sparse_instance(std::uint64_t seed, Index n, Index m, Index k) {
  Rng rng(seed);
  SparseInstance s;
  s.C = rng.real_matrix(m, n).cast<Complex>() / std::sqrt(static_cast<double>(m));
  s.x = CVector::Zero(n);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    double v = rng.normal();
    v += v < 0 ? -0.5 : 0.5;  // keep amplitudes away from zero
    s.x(idx[static_cast<std::size_t>(i)]) = v;
  }
  s.y = s.C * s.x;
  return s;
}

}  // namespace

TEST_CASE("phase_row examples") {
  CVector pos(3);
  pos << 1.0, 2.5, 0.1;
  const CRowVector p = phase_row(pos);
  CHECK(oracle::max_abs(p - CRowVector::Ones(3)) < 1e-15);
  CHECK((p * pos)(0).real() == pos.lpNorm<1>());

  CVector z(2);
  z << I, -2.0;
  const CRowVector q = phase_row(z);
  CHECK(std::abs(q(0) - (-I)) < 1e-15);
  CHECK(std::abs(q(1) - Complex{-1.0, 0.0}) < 1e-15);
  CHECK((q * z)(0).real() == doctest::Approx(3.0));

  CVector zero_first(2);
  zero_first << 0.0, 1.0;
  const CRowVector r = phase_row(zero_first, 1e-12);
  CHECK(r(0) == Complex{0.0, 0.0});
  CHECK(r(1) == Complex{1.0, 0.0});

  CHECK_THROWS_AS(phase_row(z, 0.0), DomainError);
}

TEST_CASE("phase_row bound and tangency") {
  Rng rng(31);
  for (int t = 0; t < 200; ++t) {
    const Index n = 1 + static_cast<Index>(rng.below(30));
    CVector z0 = rng.complex_vector(n);
    if (t % 3 == 0) z0(0) = 0.0;
    const CVector z = rng.complex_vector(n);
    const CRowVector p = phase_row(z0);
    for (Index j = 0; j < n; ++j) {
      CHECK((p(j) == Complex{0.0, 0.0} || std::abs(std::abs(p(j)) - 1.0) < 1e-15));
    }
    CHECK((p * z)(0).real() <= z.lpNorm<1>() + 1e-12);
    double on = 0.0;
    for (Index j = 0; j < n; ++j)
      if (std::abs(z0(j)) >= kDefaultPhaseEpsilon) on += std::abs(z0(j));
    CHECK((p * z0)(0).real() == doctest::Approx(on).epsilon(1e-14));
  }
}

TEST_CASE("gamma schedule") {
  CHECK(gamma({0.1, 0.0019}, 0) == doctest::Approx(0.9));
  CHECK(gamma({0.17, 0.0028}, 0) == doctest::Approx(0.83));
  CHECK(gamma({0.17, 0.0058}, 100000) == doctest::Approx(1.0));
  CHECK(gamma({0.1, 0.0019}, 1200) == doctest::Approx(0.9897715793284463).epsilon(1e-14));
  CHECK(gamma({0.0, 0.5}, 7) == 1.0);

  const GammaSchedule s{0.17, 0.0058};
  for (Index k = 0; k < 2000; ++k) {
    const double g = gamma(s, k);
    CHECK(g > 0.0);
    CHECK(g <= gamma(s, k + 1));
    CHECK(gamma(s, k + 1) <= 1.0);
  }
  CHECK_THROWS_AS(gamma({1.0, 0.1}, 0), DomainError);
  CHECK_THROWS_AS(gamma({0.1, -0.1}, 0), DomainError);
  CHECK_THROWS_AS(gamma({0.1, 0.1}, -1), DomainError);
}

TEST_CASE("linear_init") {
  Rng rng(32);
  // orthonormal rows: x0 = C^H y
  const CMatrix Qm = rng.complex_matrix(6, 6).householderQr().householderQ();
  const CMatrix C = Qm.topRows(3);
  const CVector y = rng.complex_vector(3);
  CHECK(oracle::max_abs(linear_init(C, y) - C.adjoint() * y) < 1e-12);

  const CVector z = rng.complex_vector(4);
  CHECK(oracle::max_abs(linear_init(CMatrix::Identity(4, 4), z) - z) < 1e-14);

  for (int t = 0; t < 20; ++t) {
    const CMatrix Cw = rng.complex_matrix(4, 10);
    const CVector yw = rng.complex_vector(4);
    CHECK((Cw * linear_init(Cw, yw) - yw).norm() <= 1e-10);
  }

  // overdetermined: least-squares normal equations
  const CMatrix Ct = rng.complex_matrix(9, 4);
  const CVector yt = rng.complex_vector(9);
  const CVector ls = linear_init(Ct, yt);
  CHECK((Ct.adjoint() * (Ct * ls - yt)).norm() <= 1e-10);

  CMatrix rank_def = CMatrix::Zero(2, 5);
  rank_def.row(0).setOnes();
  rank_def.row(1).setOnes();
  CHECK_THROWS_AS(linear_init(rank_def, CVector::Ones(2)), NumericalError);
  CHECK_THROWS_AS(linear_init(CMatrix::Identity(3, 3), CVector::Ones(2)), DimensionError);
}

TEST_CASE("linear_cs_reconstruct with the identity and gamma = 1 keeps any signal") {
  // A dense signal is only safe from the l1 drive when gamma stays at one;
  // any gamma < 1 shrinks it and the measurement rows pull it back slowly.
  Rng rng(33);
  const CVector x = rng.complex_vector(8);
  FilterConfig cfg = linear_cs_defaults();
  cfg.schedule = {0.0, 0.0};
  cfg.max_iter = 200;
  const LinearCsResult res = linear_cs_reconstruct(CMatrix::Identity(8, 8), x, cfg);
  CHECK(oracle::max_abs(res.x - x) < 1e-9);
  CHECK(res.trace.iterations_run == 200);
  CHECK(res.trace.l1_true.size() == 200);
  CHECK(res.trace.l1_linearized.size() == 200);
  CHECK(res.trace.intensity_residual_max.size() == 200);
  CHECK(res.trace.gamma.size() == 200);
}

TEST_CASE("linear_cs_reconstruct fixed point") {
  Rng rng(34);
  const SparseInstance s = sparse_instance(34, 30, 12, 3);
  FilterConfig cfg = linear_cs_defaults();
  cfg.schedule = {0.0, 0.0};  // gamma = 1
  cfg.max_iter = 50;
  const LinearCsResult res = linear_cs_reconstruct(s.C, s.y, cfg, s.x);
  CHECK(oracle::max_abs(res.x - s.x) <= 1e-9);
}

TEST_CASE("linear_cs_reconstruct recovers a 5-sparse signal") {
  for (std::uint64_t seed : {101, 102}) {
    const SparseInstance s = sparse_instance(seed, 100, 40, 5);
    const LinearCsResult res = linear_cs_reconstruct(s.C, s.y, linear_cs_defaults());
    CHECK(oracle::max_abs(res.x - s.x) <= 1e-3);
    for (Index j = 0; j < 100; ++j) {
      if (s.x(j) == Complex{0.0, 0.0}) CHECK(std::abs(res.x(j)) <= 1e-3);
    }
    CHECK((s.C * res.x - s.y).cwiseAbs().maxCoeff() <= 1e-3);
  }
}

TEST_CASE("linear_cs_reconstruct real-case l1 descent") {
  // Descent holds for the norm linearized at x_k. The true norm can only
  // exceed it through entries whose sign flipped, by twice their size.
  for (std::uint64_t seed : {103, 104}) {
    const SparseInstance s = sparse_instance(seed, 60, 25, 4);
    int steps = 0;
    linear_cs_reconstruct(s.C, s.y, linear_cs_defaults(), std::nullopt, [&](const LinearCsStep& st) {
      ++steps;
      CHECK(st.x_after.imag().cwiseAbs().maxCoeff() <= 1e-12);
      const double before = st.x_before.lpNorm<1>();
      const double linearized = (phase_row(st.x_before) * st.x_after)(0).real();
      CHECK(linearized <= before + 1e-9);
      double flipped = 0.0;
      for (Index j = 0; j < st.x_after.size(); ++j) {
        const bool flip = (st.x_before(j).real() > 0) != (st.x_after(j).real() > 0);
        if (flip || st.x_before(j) == Complex{0.0, 0.0}) flipped += std::abs(st.x_after(j));
      }
      CHECK(st.x_after.lpNorm<1>() <= before + 2.0 * flipped + 1e-9);
    });
    CHECK(steps == 3000);
  }
}

TEST_CASE("linear_cs_reconstruct errors") {
  FilterConfig cfg = linear_cs_defaults();
  CHECK_THROWS_AS(linear_cs_reconstruct(CMatrix::Zero(2, 3), CVector::Ones(2), cfg), DomainError);
  CHECK_THROWS_AS(linear_cs_reconstruct(CMatrix::Identity(2, 2), CVector::Ones(3), cfg), DimensionError);
  cfg.r_l1 = cfg.r_obs;
  CHECK_THROWS_AS(linear_cs_reconstruct(CMatrix::Identity(2, 2), CVector::Ones(2), cfg), DomainError);

  // a numerically singular prior cannot enter the information form
  FilterConfig bad = linear_cs_defaults();
  bad.q_scale = 1e-300;
  bad.p0_scale = 1e-300;
  CHECK_THROWS_AS(linear_cs_reconstruct(CMatrix::Identity(2, 2), CVector::Ones(2), bad), NumericalError);
}
