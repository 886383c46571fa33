#pragma once

// Brute-force oracles and property checkers for small instances.

#include <string>
#include <vector>

#include "ll1/admm.hpp"

namespace ll1 {

struct L0Solution {
  std::vector<int> support;  // sorted column indices
  Vec x;                     // full-length coefficient vector
};

/// All minimum-cardinality feasible solutions found by enumeration.
/// epsilon0 is the smallest s_star-th largest magnitude over `solutions` only.
struct L0Certificate {
  int s_star = 0;
  std::vector<L0Solution> solutions;
  double epsilon0 = 0.0;
};

/// Enumerates supports of size 0..s_max in increasing size, least-squares fit on
/// each, and keeps every support of the first size with ||Ax - b|| <= feas_tol.
/// Refuses (PreconditionError) when n > 24 or s_max > 6; throws if nothing up to
/// s_max is feasible.
L0Certificate l0_oracle(const Mat& A, const Vec& b, int s_max = 6, double feas_tol = 1e-8);

/// Grid minimizer of u t + alpha g(u) with spacing `step` over the scalar
/// domain. Nonnegative domains are truncated at the analytic bound on the
/// minimizer (1 for g2, a for MCP, 1/a for TL1 and log-sum, 4 for l_p).
double grid_oracle_u(const LiftedPenalty& lp, double t, double step = 1e-6);

/// Truncation point used by grid_oracle_u.
double grid_upper(const GSpec& g);

/// g sampled once on the grid so repeated (alpha, t) queries cost one pass.
class UGridOracle {
 public:
  UGridOracle(const GSpec& g, double step = 1e-6);

  struct Min {
    double u;
    double value;
  };
  /// min over the grid of u t + alpha g(u).
  Min minimize(double alpha, double t) const;
  std::size_t size() const { return grid_.size(); }

 private:
  GSpec g_;
  std::vector<double> grid_;
  std::vector<double> gvals_;
};

/// Runs constrained ADMM with continuation and compares against the certificate:
/// ||x||_0 (entries above 1e-6) must equal s_star and x must match one
/// enumerated solution to 1e-6 (relative to max(1, ||x_sol||)).
bool exact_recovery_check(const Problem& problem, const GSpec& g, const SolverConfig& config,
                          const L0Certificate& cert);
bool exact_recovery_check(const Problem& problem, const LiftedPenalty& lp,
                          const SolverConfig& config, const L0Certificate& cert);

/// max_i |grad_i - fd_i| / max(|grad_i|, 1) with central differences of step h.
double fd_gradient_check(const LiftedPenalty& lp, const Vec& x, double h = 1e-6);

struct MonotonicityReport {
  int violations = 0;
  double max_increase = 0.0;
};
/// Counts steps with trace[k+1] > trace[k] + slack.
MonotonicityReport monotonicity_report(const std::vector<double>& trace, double slack = 1e-10);

/// min ||x||_1 s.t. Ax = b by enumerating all m-column bases (small n only).
Vec basis_pursuit_reference(const Mat& A, const Vec& b);
/// min ||x||_1 + gamma/2 ||Ax - b||^2 by cyclic coordinate descent.
Vec lasso_reference(const Mat& A, const Vec& b, double gamma, double tol = 1e-13,
                    int max_sweeps = 200000);

struct CheckRow {
  std::string name;
  bool passed = false;
  std::string detail;
};
/// Fast self-check battery used by `ll1 verify`.
std::vector<CheckRow> run_verification_suite(std::uint64_t seed = 20240521);

}  // namespace ll1
