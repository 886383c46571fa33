#pragma once

// Homotopy DCA (beta = 0): outer alpha-continuation, inner reweighted-l1 steps
// x <- argmin psi(x) + <u(x_prev), |x|>, each solved by fixed-weight ADMM.

#include <optional>

#include "ll1/admm.hpp"

namespace ll1 {

struct DcaConfig {
  std::optional<double> alpha0;  // default alpha0_scale * 2 * ||x0||_inf, as for ADMM
  double alpha0_scale = 1.0;
  double eta = 0.01;
  double alpha_floor = 1e-8;
  int max_outer = 30;
  int max_inner = 20;
  double inner_tol = 1e-8;
  double rho = 4.0;       // penalty of the inner weighted-l1 ADMM
  int sub_max_iter = 5000;  // cap per weighted-l1 solve
  bool record_traces = true;

  void validate() const;
};

/// Weighted-l1 ADMM state carried between subproblems (warm start).
struct WeightedL1State {
  Vec x, y, v;
  int iterations = 0;  // ADMM sweeps in the last solve
};

/// min psi(x) + <w, |x|> by ADMM with fixed weights, to ||x - y|| <= tol and
/// relative change <= tol (or max_iter sweeps). Starts from `state`, which must
/// be sized n; returns the feasible iterate y in constrained mode, x otherwise.
Vec weighted_l1_subproblem(const Problem& problem, const Vec& w, double tol,
                           const PrecomputedOps& pre, WeightedL1State& state, int max_iter);
/// Cold-start convenience form.
Vec weighted_l1_subproblem(const Problem& problem, const Vec& w, double tol,
                           double rho = 4.0, int max_iter = 20000);

/// F_{g,alpha}(x) + psi(x), psi evaluated as for the augmented Lagrangian.
double dca_objective(const LiftedPenalty& lp, const Problem& problem, const Vec& x);

SolveResult dca_solve(const GSpec& g, const Problem& problem, const DcaConfig& config);
/// Uses lp.alpha as alpha0.
SolveResult dca_solve(const LiftedPenalty& lp_initial, const Problem& problem, DcaConfig config);

}  // namespace ll1
