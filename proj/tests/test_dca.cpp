#include <gtest/gtest.h>

#include <random>

#include "ll1/dca.hpp"
#include "ll1/error.hpp"
#include "ll1/problems.hpp"
#include "ll1/verification.hpp"
#include "oracles.hpp"

using namespace ll1;

TEST(WeightedL1, ZeroWeightsGiveLeastSquares) {
  std::mt19937_64 rng(41);
  const Mat A = oracle::gaussian_mat(rng, 12, 6);
  const Vec b = oracle::gaussian_vec(rng, 12);
  const Problem p = Problem::unconstrained(A, b, 3.0);
  const Vec x = weighted_l1_subproblem(p, Vec::Zero(6), 1e-12, 4.0, 100000);
  const Vec ref = A.colPivHouseholderQr().solve(b);
  EXPECT_LE((x - ref).norm() / ref.norm(), 1e-8);
}

TEST(WeightedL1, UniformWeightsGiveBasisPursuit) {
  std::mt19937_64 rng(42);
  for (int k = 0; k < 3; ++k) {
    const Mat A = oracle::gaussian_mat(rng, 5, 10);
    const Vec b = oracle::gaussian_vec(rng, 5);
    const Vec x = weighted_l1_subproblem(Problem::constrained(A, b), Vec::Ones(10), 1e-12, 1.0, 200000);
    const Vec ref = basis_pursuit_reference(A, b);
    EXPECT_LE((x - ref).norm() / ref.norm(), 1e-6);
  }
}

TEST(WeightedL1, UnpenalizedCoordinatesFollowLeastSquares) {
  // Weights zero on a subset S; large weights elsewhere force x_{S^c} = 0 and
  // x_S equal to the least-squares fit on S.
  std::mt19937_64 rng(43);
  const Mat A = oracle::gaussian_mat(rng, 10, 8);
  const Vec b = oracle::gaussian_vec(rng, 10);
  const double gamma = 1.0;
  Vec w = Vec::Constant(8, 1e6);
  w[1] = w[4] = w[6] = 0.0;
  const Vec x = weighted_l1_subproblem(Problem::unconstrained(A, b, gamma), w, 1e-12, 4.0, 200000);
  Mat AS(10, 3);
  AS << A.col(1), A.col(4), A.col(6);
  const Vec ls = AS.colPivHouseholderQr().solve(b);
  EXPECT_NEAR(x[1], ls[0], 1e-8);
  EXPECT_NEAR(x[4], ls[1], 1e-8);
  EXPECT_NEAR(x[6], ls[2], 1e-8);
  for (int i : {0, 2, 3, 5, 7}) EXPECT_EQ(x[i], 0.0);
}

TEST(DcaSolve, ConstZeroIsPlainL1) {
  std::mt19937_64 rng(44);
  const Mat A = oracle::gaussian_mat(rng, 5, 10);
  const Vec b = oracle::gaussian_vec(rng, 5);
  const Vec ref = basis_pursuit_reference(A, b);
  for (int outer : {1, 3}) {
    DcaConfig c;
    c.max_outer = outer;
    c.max_inner = 2;
    c.rho = 1.0;
    c.inner_tol = 1e-12;
    c.sub_max_iter = 200000;
    const SolveResult r = dca_solve(GSpec::const_zero(), Problem::constrained(A, b), c);
    EXPECT_LE((r.x - ref).norm() / ref.norm(), 1e-6);
  }
}

TEST(DcaSolve, IdentitySensing) {
  Vec b = Vec::Zero(4);
  b[2] = -1.75;
  const SolveResult r = dca_solve(GSpec::g1(), Problem::constrained(Mat::Identity(4, 4), b), DcaConfig{});
  EXPECT_LE((r.x - b).norm(), 1e-8);
}

TEST(DcaSolve, InnerDescentAndWeightValidity) {
  std::mt19937_64 rng(45);
  const Mat A = oracle::gaussian_mat(rng, 15, 40);
  Vec xt = Vec::Zero(40);
  xt[3] = 1.2;
  xt[17] = -0.7;
  xt[30] = 2.0;
  const Vec b = A * xt;
  for (Mode mode : {Mode::Constrained, Mode::Unconstrained}) {
    const Problem p = mode == Mode::Constrained ? Problem::constrained(A, b) : Problem::unconstrained(A, b, 50.0);
    DcaConfig c;
    c.eta = 0.0;  // a single alpha: every inner step is one majorize-minimize step
    c.alpha0 = 1.0;
    c.max_outer = 1;
    c.max_inner = 15;
    c.inner_tol = 1e-12;
    c.sub_max_iter = 50000;
    const SolveResult r = dca_solve(GSpec::g2(), p, c);
    ASSERT_GE(r.objective_trace.size(), 2u);
    EXPECT_EQ(monotonicity_report(r.objective_trace, 1e-6).violations, 0);
    EXPECT_GE(r.u.minCoeff(), 0.0);
  }
}

TEST(DcaSolve, RecoversGaussianSparsitySix) {
  const MatrixSpec ms = MatrixSpec::gaussian(64, 1024, 0.0);
  DcaConfig c;
  c.eta = 0.1;
  c.rho = 16;
  c.alpha0_scale = 10;
  c.record_traces = false;
  int ok = 0;
  for (int t = 0; t < 10; ++t) {
    const Instance inst = gen_instance(ms, 6, 0.0, TrialSeed{46, static_cast<std::uint64_t>(t)});
    ok += metrics(dca_solve(GSpec::g1(), Problem::constrained(inst.A, inst.b), c).x, inst.x_true).success;
  }
  EXPECT_GE(ok, 9);
}

TEST(DcaConfigTest, Validation) {
  DcaConfig c;
  c.max_outer = 0;
  EXPECT_THROW(c.validate(), PreconditionError);
  DcaConfig d;
  d.inner_tol = -1;
  EXPECT_THROW(d.validate(), PreconditionError);
}
