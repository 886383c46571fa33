#include "ll1/dca.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "ll1/error.hpp"

namespace ll1 {

void DcaConfig::validate() const {
  require(eta >= 0.0 && eta < 1.0, "dca config: eta must lie in [0,1)");
  require(std::isfinite(alpha_floor) && alpha_floor > 0.0, "dca config: alpha_floor must be > 0");
  require(std::isfinite(alpha0_scale) && alpha0_scale > 0.0,
          "dca config: alpha0_scale must be > 0");
  require(max_outer > 0, "dca config: max_outer must be > 0");
  require(max_inner > 0, "dca config: max_inner must be > 0");
  require(std::isfinite(inner_tol) && inner_tol > 0.0, "dca config: inner_tol must be > 0");
  require(std::isfinite(rho) && rho > 0.0, "dca config: rho must be > 0");
  require(sub_max_iter > 0, "dca config: sub_max_iter must be > 0");
  if (alpha0) {
    require(std::isfinite(*alpha0) && *alpha0 > alpha_floor,
            "dca config: alpha0 must exceed alpha_floor");
  }
}

Vec weighted_l1_subproblem(const Problem& problem, const Vec& w, double tol,
                           const PrecomputedOps& pre, WeightedL1State& state, int max_iter) {
  const Eigen::Index n = problem.A.cols();
  require(w.size() == n, "weighted_l1_subproblem: weight size mismatch");
  require((w.array() >= 0.0).all(), "weighted_l1_subproblem: weights must be >= 0");
  require(state.x.size() == n && state.y.size() == n && state.v.size() == n,
          "weighted_l1_subproblem: state not initialized");
  SolverState s;
  s.x = std::move(state.x);
  s.y = std::move(state.y);
  s.v = std::move(state.v);
  Vec x_prev;
  int it = 0;
  while (it < max_iter) {
    x_prev = s.x;
    admm_weighted_step(w, s, pre);
    ++it;
    if (!s.x.allFinite() || !s.y.allFinite() || !s.v.allFinite()) {
      throw DivergenceError("weighted l1 subproblem diverged at sweep " + std::to_string(it));
    }
    const double change = (s.x - x_prev).norm() / std::max(1.0, x_prev.norm());
    if ((s.x - s.y).norm() <= tol && change <= tol) break;
  }
  state.x = std::move(s.x);
  state.y = std::move(s.y);
  state.v = std::move(s.v);
  state.iterations = it;
  return problem.mode == Mode::Constrained ? state.y : state.x;
}

Vec weighted_l1_subproblem(const Problem& problem, const Vec& w, double tol, double rho,
                           int max_iter) {
  problem.validate();
  const PrecomputedOps pre(problem, rho);
  WeightedL1State st;
  st.x = pre.initial_point();
  st.y = st.x;
  if (problem.mode == Mode::Unconstrained) {
    st.v = problem.gamma * (problem.A.transpose() * (problem.A * st.y - problem.b));
  } else {
    st.v = Vec::Zero(st.x.size());
  }
  return weighted_l1_subproblem(problem, w, tol, pre, st, max_iter);
}

double dca_objective(const LiftedPenalty& lp, const Problem& problem, const Vec& x) {
  const double res = (problem.A * x - problem.b).norm();
  double psi;
  if (problem.mode == Mode::Unconstrained) {
    psi = 0.5 * problem.gamma * res * res;
  } else {
    psi = res <= 1e-9 * (1.0 + problem.b.norm()) ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return f_eval(lp, x) + psi;
}

SolveResult dca_solve(const GSpec& g, const Problem& problem, const DcaConfig& config) {
  problem.validate();
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const PrecomputedOps pre(problem, config.rho);

  WeightedL1State st;
  st.x = pre.initial_point();
  st.y = st.x;
  if (problem.mode == Mode::Unconstrained) {
    st.v = problem.gamma * (problem.A.transpose() * (problem.A * st.y - problem.b));
  } else {
    st.v = Vec::Zero(st.x.size());
  }
  Vec x = st.x;

  double alpha;
  if (config.alpha0) {
    alpha = *config.alpha0;
  } else {
    const double amax = x.cwiseAbs().maxCoeff();
    alpha = config.alpha0_scale * (amax > 0.0 ? 2.0 * amax : 1.0);
  }
  require(alpha > config.alpha_floor, "dca: alpha0 must exceed alpha_floor");

  SolveResult result;
  result.solver = "dca";
  result.alpha0 = alpha;
  Vec u(x.size());
  int admm_sweeps = 0;

  for (int j = 0; j < config.max_outer; ++j) {
    const LiftedPenalty lp(g, alpha);
    for (int k = 0; k < config.max_inner; ++k) {
      u_minimize_into(lp, x, u);
      const Vec x_prev = x;
      x = weighted_l1_subproblem(problem, u, config.inner_tol, pre, st, config.sub_max_iter);
      admm_sweeps += st.iterations;
      ++result.inner_iterations;
      if (config.record_traces) result.objective_trace.push_back(dca_objective(lp, problem, x));
      const double change = (x - x_prev).norm() / std::max(1.0, x_prev.norm());
      if (change <= config.inner_tol) break;
    }
    ++result.outer_iterations;
    if (config.eta > 0.0) alpha = std::max((1.0 - config.eta) * alpha, config.alpha_floor);
  }

  result.x = x;
  result.u = u;
  result.iterations = admm_sweeps;
  result.final_alpha = alpha;
  if (problem.ground_truth) {
    result.rel_err = (x - *problem.ground_truth).norm() / problem.ground_truth->norm();
  }
  result.time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SolveResult dca_solve(const LiftedPenalty& lp_initial, const Problem& problem, DcaConfig config) {
  config.alpha0 = lp_initial.alpha;
  return dca_solve(lp_initial.g, problem, config);
}

}  // namespace ll1
