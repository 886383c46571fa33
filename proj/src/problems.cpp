#include "ll1/problems.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "ll1/error.hpp"

namespace ll1 {

MatrixSpec MatrixSpec::gaussian(int m, int n, double r, bool normalize) {
  return MatrixSpec{MatrixKind::Gaussian, r, m, n, normalize};
}

MatrixSpec MatrixSpec::dct(int m, int n, double F, bool normalize) {
  return MatrixSpec{MatrixKind::Dct, F, m, n, normalize};
}

void MatrixSpec::validate() const {
  require(m > 0 && n > 0, "matrix: m and n must be positive");
  if (kind == MatrixKind::Gaussian) {
    require(param >= 0.0 && param < 1.0, "matrix: Gaussian correlation r must lie in [0,1)");
  } else {
    require(std::isfinite(param) && param > 0.0, "matrix: DCT oversampling F must be > 0");
  }
}

std::string to_string(MatrixKind k) { return k == MatrixKind::Gaussian ? "gaussian" : "dct"; }

MatrixKind matrix_kind_from_string(const std::string& s) {
  if (s == "gaussian") return MatrixKind::Gaussian;
  if (s == "dct") return MatrixKind::Dct;
  throw PreconditionError("unknown matrix kind '" + s + "'");
}

Mat gen_gaussian_matrix(const MatrixSpec& spec, Rng& rng) {
  require(spec.kind == MatrixKind::Gaussian, "gen_gaussian_matrix: kind must be gaussian");
  spec.validate();
  const double a = std::sqrt(1.0 - spec.param);
  const double c = std::sqrt(spec.param);
  Mat A(spec.m, spec.n);
  for (int i = 0; i < spec.m; ++i) {
    const double z0 = rng.normal();
    for (int j = 0; j < spec.n; ++j) A(i, j) = a * rng.normal() + c * z0;
  }
  return A;
}

Mat gen_dct_matrix(const MatrixSpec& spec, Rng& rng) {
  require(spec.kind == MatrixKind::Dct, "gen_dct_matrix: kind must be dct");
  spec.validate();
  Vec w(spec.m);
  for (int k = 0; k < spec.m; ++k) w[k] = rng.uniform();
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.m));
  Mat A(spec.m, spec.n);
  for (int j = 0; j < spec.n; ++j) {
    const double freq = 2.0 * std::numbers::pi * static_cast<double>(j + 1) / spec.param;
    for (int k = 0; k < spec.m; ++k) A(k, j) = scale * std::cos(freq * w[k]);
  }
  return A;
}

Mat gen_matrix(const MatrixSpec& spec, Rng& rng) {
  Mat A = spec.kind == MatrixKind::Gaussian ? gen_gaussian_matrix(spec, rng)
                                            : gen_dct_matrix(spec, rng);
  if (spec.normalize_columns) normalize_columns(A);
  return A;
}

Mat gen_matrix(const MatrixSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return gen_matrix(spec, rng);
}

void normalize_columns(Mat& A) {
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    auto col = A.col(j);
    col.array() -= col.mean();
    const double nrm = col.norm();
    if (nrm > 0.0) col /= nrm;
  }
}

Vec gen_sparse_signal(const SignalSpec& spec, Rng& rng) {
  require(spec.n > 0, "signal: n must be positive");
  require(spec.s >= 1 && spec.s <= spec.n, "signal: sparsity must satisfy 1 <= s <= n");
  // Partial Fisher-Yates: the first s slots of a shuffled index array.
  std::vector<int> idx(spec.n);
  for (int i = 0; i < spec.n; ++i) idx[i] = i;
  for (int i = 0; i < spec.s; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.n - i)));
    std::swap(idx[i], idx[j]);
  }
  Vec x = Vec::Zero(spec.n);
  for (int i = 0; i < spec.s; ++i) {
    double v = rng.normal();
    while (v == 0.0) v = rng.normal();
    x[idx[i]] = v;
  }
  return x;
}

Vec gen_sparse_signal(const SignalSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return gen_sparse_signal(spec, rng);
}

Vec gen_measurements(const Mat& A, const Vec& x, double sigma, Rng& rng) {
  require(A.cols() == x.size(), "measurements: A and x sizes disagree");
  require(std::isfinite(sigma) && sigma >= 0.0, "measurements: sigma must be >= 0");
  Vec b = A * x;
  if (sigma > 0.0) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b[i] += sigma * rng.normal();
  }
  return b;
}

Vec gen_measurements(const Mat& A, const Vec& x, double sigma, std::uint64_t seed) {
  Rng rng(seed);
  return gen_measurements(A, x, sigma, rng);
}

Metrics metrics(const Vec& x, const Vec& x_g) {
  require(x.size() == x_g.size(), "metrics: size mismatch");
  const double gn = x_g.norm();
  require(gn > 0.0, "metrics: ground truth is zero");
  Metrics out;
  out.mse = (x - x_g).norm();
  out.rel_err = out.mse / gn;
  out.success = out.rel_err <= kSuccessThreshold;
  return out;
}

double coherence(const Mat& A) {
  Mat B = A;
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    const double nrm = B.col(j).norm();
    if (nrm > 0.0) B.col(j) /= nrm;
  }
  Mat G = (B.transpose() * B).cwiseAbs();
  G.diagonal().setZero();
  return G.maxCoeff();
}

Instance gen_instance(const MatrixSpec& spec, int s, double sigma, const TrialSeed& seed) {
  Instance inst;
  Rng mrng = seed.stream("matrix");
  inst.A = gen_matrix(spec, mrng);
  Rng srng = seed.stream("signal");
  inst.x_true = gen_sparse_signal(SignalSpec{spec.n, s}, srng);
  Rng nrng = seed.stream("noise");
  inst.b = gen_measurements(inst.A, inst.x_true, sigma, nrng);
  return inst;
}

void write_matrix_csv(std::ostream& out, const Mat& A, const std::string& kind,
                      std::uint64_t seed) {
  out << "# m=" << A.rows() << ",n=" << A.cols() << ",kind=" << kind << ",seed=" << seed << "\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      if (j) out << ',';
      out << A(i, j);
    }
    out << '\n';
  }
}

Mat read_matrix_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line.rfind("# m=", 0) == 0,
          "matrix csv: missing '# m=..' header");
  long m = -1, n = -1;
  {
    std::istringstream hs(line.substr(2));
    std::string field;
    while (std::getline(hs, field, ',')) {
      if (field.rfind("m=", 0) == 0) m = std::stol(field.substr(2));
      if (field.rfind("n=", 0) == 0) n = std::stol(field.substr(2));
    }
  }
  require(m > 0 && n > 0, "matrix csv: header must give positive m and n");
  Mat A(m, n);
  for (long i = 0; i < m; ++i) {
    require(static_cast<bool>(std::getline(in, line)), "matrix csv: too few rows");
    std::istringstream ls(line);
    std::string cell;
    for (long j = 0; j < n; ++j) {
      require(static_cast<bool>(std::getline(ls, cell, ',')), "matrix csv: too few columns");
      A(i, j) = std::stod(cell);
    }
  }
  return A;
}

}  // namespace ll1
