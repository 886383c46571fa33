#pragma once

// Sensing-matrix, signal and measurement generators plus recovery metrics.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "ll1/regularizer.hpp"
#include "ll1/rng.hpp"

namespace ll1 {

enum class MatrixKind { Gaussian, Dct };

struct MatrixSpec {
  MatrixKind kind = MatrixKind::Gaussian;
  double param = 0.0;  // correlation r for Gaussian, oversampling F for DCT
  int m = 64;
  int n = 1024;
  bool normalize_columns = false;

  static MatrixSpec gaussian(int m, int n, double r, bool normalize = false);
  static MatrixSpec dct(int m, int n, double F, bool normalize = false);
  void validate() const;
};

std::string to_string(MatrixKind k);
MatrixKind matrix_kind_from_string(const std::string& s);

struct SignalSpec {
  int n = 1024;
  int s = 1;
};

/// Rows i.i.d. N(0, Sigma), Sigma = (1-r) I + r 11^T, as sqrt(1-r) z + sqrt(r) z0.
Mat gen_gaussian_matrix(const MatrixSpec& spec, Rng& rng);
/// a_j[k] = cos(2 pi w[k] j / F) / sqrt(m), j = 1..n, w ~ U[0,1]^m.
Mat gen_dct_matrix(const MatrixSpec& spec, Rng& rng);
/// Dispatches on spec.kind and applies normalize_columns.
Mat gen_matrix(const MatrixSpec& spec, Rng& rng);
Mat gen_matrix(const MatrixSpec& spec, std::uint64_t seed);

/// Subtract each column mean and scale to unit norm (zero columns stay zero).
void normalize_columns(Mat& A);

/// Exactly s nonzeros at uniform distinct positions, N(0,1) values.
Vec gen_sparse_signal(const SignalSpec& spec, Rng& rng);
Vec gen_sparse_signal(const SignalSpec& spec, std::uint64_t seed);

/// b = A x + sigma * xi.
Vec gen_measurements(const Mat& A, const Vec& x, double sigma, Rng& rng);
Vec gen_measurements(const Mat& A, const Vec& x, double sigma, std::uint64_t seed);

struct Metrics {
  double rel_err = 0.0;
  double mse = 0.0;  // ||x - x_g||_2, following the experiment convention
  bool success = false;
};

constexpr double kSuccessThreshold = 1e-2;

Metrics metrics(const Vec& x, const Vec& x_g);

/// Largest absolute off-diagonal entry of the column-normalized Gram matrix.
double coherence(const Mat& A);

/// One generated instance (A, x_g, b) for a trial.
struct Instance {
  Mat A;
  Vec x_true;
  Vec b;
};
Instance gen_instance(const MatrixSpec& spec, int s, double sigma, const TrialSeed& seed);

/// CSV with header line "# m=<m>,n=<n>,kind=<kind>,seed=<seed>" followed by
/// row-major values. Vectors are written as n x 1.
void write_matrix_csv(std::ostream& out, const Mat& A, const std::string& kind,
                      std::uint64_t seed);
Mat read_matrix_csv(std::istream& in);

}  // namespace ll1
