#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <sstream>

#include "ll1/error.hpp"
#include "ll1/problems.hpp"
#include "ll1/rng.hpp"

using namespace ll1;

TEST(Rng, Deterministic) {
  Rng a(5), b(5), c(6);
  for (int k = 0; k < 100; ++k) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
}

TEST(Rng, StreamsDifferByLabelAndTrial) {
  const TrialSeed s{7, 3};
  EXPECT_NE(s.key("matrix"), s.key("signal"));
  EXPECT_NE(s.id(), (TrialSeed{7, 4}.id()));
  EXPECT_NE(s.id(), (TrialSeed{8, 3}.id()));
}

TEST(Rng, BelowIsUniform) {
  Rng r(9);
  std::vector<int> counts(7, 0);
  const int N = 70000;
  for (int k = 0; k < N; ++k) ++counts[r.below(7)];
  for (int c : counts) EXPECT_NEAR(c, N / 7.0, 4 * std::sqrt(N / 7.0));
}

TEST(GaussianMatrix, IidNormalWhenUncorrelated) {
  const Mat A = gen_matrix(MatrixSpec::gaussian(100, 1000, 0.0), 1);
  std::vector<double> v(A.data(), A.data() + A.size());
  std::sort(v.begin(), v.end());
  const boost::math::normal nd;
  double D = 0.0;
  const double N = static_cast<double>(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double F = boost::math::cdf(nd, v[i]);
    D = std::max({D, (i + 1) / N - F, F - i / N});
  }
  // asymptotic Kolmogorov tail with Stephens' small-sample correction
  const double lam = (std::sqrt(N) + 0.12 + 0.11 / std::sqrt(N)) * D;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
  EXPECT_GT(p, 0.01) << "D=" << D;
}

TEST(GaussianMatrix, OffDiagonalCovarianceSmall) {
  const int m = 400, n = 30;
  const Mat A = gen_matrix(MatrixSpec::gaussian(m, n, 0.0), 2);
  const Mat C = A.transpose() * A / m;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) EXPECT_LE(std::abs(C(i, j)), 4.0 / std::sqrt(m));
}

TEST(GaussianMatrix, Correlation) {
  const int m = 20000;
  const Mat A = gen_matrix(MatrixSpec::gaussian(m, 2, 0.8), 3);
  const double c = A.col(0).dot(A.col(1)) / (A.col(0).norm() * A.col(1).norm());
  EXPECT_NEAR(c, 0.8, 0.05);
}

TEST(GaussianMatrix, Determinism) {
  const MatrixSpec s = MatrixSpec::gaussian(8, 20, 0.2);
  EXPECT_EQ(gen_matrix(s, 42), gen_matrix(s, 42));
  EXPECT_NE(gen_matrix(s, 42), gen_matrix(s, 43));
}

TEST(GaussianMatrix, RejectsBadCorrelation) {
  EXPECT_THROW(gen_matrix(MatrixSpec::gaussian(4, 4, 1.0), 1), PreconditionError);
  EXPECT_THROW(gen_matrix(MatrixSpec::gaussian(4, 4, -0.1), 1), PreconditionError);
}

TEST(DctMatrix, EntriesBounded) {
  const Mat A = gen_matrix(MatrixSpec::dct(64, 256, 5.0), 4);
  EXPECT_LE(A.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(64.0) + 1e-15);
  EXPECT_EQ(A, gen_matrix(MatrixSpec::dct(64, 256, 5.0), 4));
  EXPECT_THROW(gen_matrix(MatrixSpec::dct(4, 4, 0.0), 1), PreconditionError);
}

TEST(DctMatrix, CoherenceGrowsWithF) {
  double c1 = 0, c10 = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    c1 += coherence(gen_matrix(MatrixSpec::dct(64, 256, 1.0), s));
    c10 += coherence(gen_matrix(MatrixSpec::dct(64, 256, 10.0), s));
  }
  EXPECT_GT(c10, c1);
}

TEST(NormalizeColumns, MeanZeroUnitNorm) {
  for (const MatrixSpec& s : {MatrixSpec::gaussian(30, 50, 0.2, true), MatrixSpec::dct(30, 50, 3.0, true)}) {
    const Mat A = gen_matrix(s, 5);
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      EXPECT_NEAR(A.col(j).mean(), 0.0, 1e-12);
      EXPECT_NEAR(A.col(j).norm(), 1.0, 1e-12);
    }
  }
}

TEST(SparseSignal, ExactSparsityAndDeterminism) {
  const SignalSpec s{100, 7};
  const Vec x = gen_sparse_signal(s, 11);
  EXPECT_EQ((x.array() != 0.0).count(), 7);
  EXPECT_EQ(x, gen_sparse_signal(s, 11));
  EXPECT_THROW(gen_sparse_signal(SignalSpec{5, 6}, 1), PreconditionError);
}

TEST(SparseSignal, SupportUniform) {
  const int n = 20, s = 4, N = 10000;
  std::vector<int> counts(n, 0);
  Rng rng(12);
  for (int k = 0; k < N; ++k) {
    const Vec x = gen_sparse_signal(SignalSpec{n, s}, rng);
    for (int i = 0; i < n; ++i) counts[i] += x[i] != 0.0;
  }
  const double p = static_cast<double>(s) / n;
  const double sd = std::sqrt(N * p * (1 - p));
  // Bonferroni over the n cells at family level 1e-3
  for (int c : counts) EXPECT_NEAR(c, N * p, 4.06 * sd);
}

TEST(Measurements, NoiseLevel) {
  const Mat A = gen_matrix(MatrixSpec::gaussian(2000, 10, 0.0), 13);
  const Vec x = gen_sparse_signal(SignalSpec{10, 3}, 14);
  EXPECT_EQ(gen_measurements(A, x, 0.0, 15), A * x);
  const Vec b = gen_measurements(A, x, 0.01, 15);
  EXPECT_NEAR((b - A * x).norm() / std::sqrt(2000.0), 0.01, 0.003);
  EXPECT_EQ(b, gen_measurements(A, x, 0.01, 15));
}

TEST(Metrics, Examples) {
  Vec xg(2);
  xg << 2.0, 0.0;
  const Metrics m0 = metrics(xg, xg);
  EXPECT_EQ(m0.rel_err, 0.0);
  EXPECT_EQ(m0.mse, 0.0);
  EXPECT_TRUE(m0.success);
  Vec x(2);
  x << 2.0, 1.0;
  EXPECT_DOUBLE_EQ(metrics(x, xg).rel_err, 0.5);
  EXPECT_DOUBLE_EQ(metrics(x, xg).mse, 1.0);
  Vec y(2);
  y << 2.0, 0.018;
  EXPECT_TRUE(metrics(y, xg).success);
  y << 2.0, 0.022;
  EXPECT_FALSE(metrics(y, xg).success);
  EXPECT_THROW(metrics(x, Vec::Zero(2)), PreconditionError);
}

TEST(Instance, Reproducible) {
  const MatrixSpec s = MatrixSpec::dct(16, 40, 2.0);
  const Instance a = gen_instance(s, 3, 0.01, TrialSeed{1, 2});
  const Instance b = gen_instance(s, 3, 0.01, TrialSeed{1, 2});
  EXPECT_EQ(a.A, b.A);
  EXPECT_EQ(a.x_true, b.x_true);
  EXPECT_EQ(a.b, b.b);
  const Instance c = gen_instance(s, 3, 0.01, TrialSeed{1, 3});
  EXPECT_NE(a.A, c.A);
}

TEST(MatrixCsv, RoundTrip) {
  const Mat A = gen_matrix(MatrixSpec::gaussian(3, 5, 0.0), 16);
  std::stringstream ss;
  write_matrix_csv(ss, A, "gaussian", 16);
  const std::string header = ss.str().substr(0, ss.str().find('\n'));
  EXPECT_EQ(header, "# m=3,n=5,kind=gaussian,seed=16");
  EXPECT_EQ(read_matrix_csv(ss), A);
}
