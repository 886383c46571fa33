#pragma once

// ADMM for the constrained (Ax = b) and unconstrained (gamma/2 ||Ax - b||^2)
// lifted-l1 models, with exponential alpha-continuation.

#include <Eigen/Cholesky>

#include <optional>
#include <string>
#include <vector>

#include "ll1/regularizer.hpp"

namespace ll1 {

enum class Mode { Constrained, Unconstrained };

struct Problem {
  Mat A;
  Vec b;
  Mode mode = Mode::Constrained;
  double gamma = 0.0;  // fidelity weight, unconstrained mode only
  std::optional<Vec> ground_truth;

  static Problem constrained(Mat A, Vec b);
  static Problem unconstrained(Mat A, Vec b, double gamma);

  /// Dimension and sign checks; A may not have an all-zero row.
  void validate() const;
};

struct SolverConfig {
  double rho = 4.0;
  std::optional<double> alpha0;  // default alpha0_scale * 2 * ||x0||_inf
  double alpha0_scale = 1.0;
  double eta = 0.01;             // 0 keeps alpha fixed
  double alpha_floor = 1e-8;
  double eps = 0.01;
  int max_iter = 5000;
  bool record_traces = true;

  void validate() const;
};

/// Cached factorization for the y-update, shared read-only across solves.
class PrecomputedOps {
 public:
  PrecomputedOps(const Problem& problem, double rho);

  Mode mode() const { return mode_; }
  double rho() const { return rho_; }
  double gamma() const { return gamma_; }
  /// ||A^T A||_2.
  double c_a() const { return c_a_; }
  /// A^T (A A^T)^{-1} b in constrained mode, A^T b otherwise.
  const Vec& initial_point() const { return x0_; }

  /// Projection of x + v/rho onto {y : Ay = b}.
  Vec y_update_constrained(const Vec& x, const Vec& v) const;
  /// (rho I + gamma A^T A)^{-1} (rho x + v + gamma A^T b).
  Vec y_update_unconstrained(const Vec& x, const Vec& v) const;
  Vec y_update(const Vec& x, const Vec& v) const;

 private:
  Mode mode_;
  double rho_;
  double gamma_;
  double c_a_ = 0.0;
  Mat A_;
  Vec b_;
  Vec x0_;
  // Constrained: LLT of A A^T. Unconstrained with m < n: LLT of rho I + gamma A A^T
  // (Woodbury form); otherwise LLT of rho I + gamma A^T A.
  Eigen::LLT<Mat> llt_;
  bool woodbury_ = false;
};

struct SolverState {
  Vec u, x, y, v;
  double alpha = 0.0;
  int k = 0;
  std::vector<double> L_trace;
  std::vector<double> r_trace;
};

struct SolveResult {
  std::string solver;
  Vec x;
  Vec u;
  int iterations = 0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double time_ms = 0.0;
  double alpha0 = 0.0;
  double final_alpha = 0.0;
  std::optional<double> rel_err;
  std::vector<double> L_trace;
  std::vector<double> r_trace;
  std::vector<double> objective_trace;
};

/// sign(v) * max(|v| - u, 0), elementwise.
Vec shrink(const Vec& v, const Vec& u);

/// L_rho(u, x, y; v). psi is the indicator of {Ay = b} (within 1e-9 (1 + ||b||))
/// in constrained mode.
double augmented_lagrangian(const LiftedPenalty& lp, const SolverState& state,
                            const Problem& problem, double rho);

/// x0, y0 = x0, v0, u0 = u_minimize at alpha0.
SolverState admm_init(const GSpec& g, const Problem& problem, const SolverConfig& config,
                      const PrecomputedOps& pre);

/// One u/x/y/v sweep at lp.alpha. Appends L_rho and ||x - y|| when
/// config.record_traces is set.
void admm_step(const LiftedPenalty& lp, SolverState& state, const Problem& problem,
               const SolverConfig& config, const PrecomputedOps& pre);

/// x/y/v sweep with fixed weights w (the inner solver of weighted l1 problems).
void admm_weighted_step(const Vec& w, SolverState& state, const PrecomputedOps& pre);

SolveResult admm_solve(const GSpec& g, const Problem& problem, const SolverConfig& config);
SolveResult admm_solve(const GSpec& g, const Problem& problem, const SolverConfig& config,
                       const PrecomputedOps& pre);
/// Uses lp.alpha as alpha0.
SolveResult admm_solve(const LiftedPenalty& lp_initial, const Problem& problem,
                       SolverConfig config);

/// Optimality residuals of the unconstrained model at (u, x, y):
/// weight part  ||proj-grad of u t + alpha g(u)|| and
/// signal part  min over p in d|x| of ||u . p + gamma A^T (A y - b)||.
struct StationarityResiduals {
  double weights = 0.0;
  double signal = 0.0;
};
StationarityResiduals stationarity_residuals(const LiftedPenalty& lp, const Problem& problem,
                                             const Vec& u, const Vec& x, const Vec& y);

}  // namespace ll1
