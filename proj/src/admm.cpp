#include "ll1/admm.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <limits>

#include "ll1/error.hpp"

namespace ll1 {

Problem Problem::constrained(Mat A, Vec b) {
  Problem p;
  p.A = std::move(A);
  p.b = std::move(b);
  p.mode = Mode::Constrained;
  return p;
}

Problem Problem::unconstrained(Mat A, Vec b, double gamma) {
  Problem p;
  p.A = std::move(A);
  p.b = std::move(b);
  p.mode = Mode::Unconstrained;
  p.gamma = gamma;
  return p;
}

void Problem::validate() const {
  require(A.rows() > 0 && A.cols() > 0, "problem: A must be non-empty");
  require(b.size() == A.rows(), "problem: b must have one entry per row of A");
  require(A.allFinite() && b.allFinite(), "problem: A and b must be finite");
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    require(A.row(i).cwiseAbs().maxCoeff() > 0.0, "problem: A has an all-zero row");
  }
  if (mode == Mode::Unconstrained) {
    require(std::isfinite(gamma) && gamma > 0.0, "problem: gamma must be > 0");
  }
  if (ground_truth) {
    require(ground_truth->size() == A.cols(), "problem: ground truth must have n entries");
  }
}

void SolverConfig::validate() const {
  require(std::isfinite(rho) && rho > 0.0, "config: rho must be > 0");
  require(eta >= 0.0 && eta < 1.0, "config: eta must lie in [0,1)");
  require(std::isfinite(alpha_floor) && alpha_floor > 0.0, "config: alpha_floor must be > 0");
  require(std::isfinite(eps) && eps > 0.0, "config: eps must be > 0");
  require(max_iter > 0, "config: max_iter must be > 0");
  require(std::isfinite(alpha0_scale) && alpha0_scale > 0.0, "config: alpha0_scale must be > 0");
  if (alpha0) {
    require(std::isfinite(*alpha0) && *alpha0 > alpha_floor,
            "config: alpha0 must exceed alpha_floor");
  }
}

// ---------------------------------------------------------------------------

PrecomputedOps::PrecomputedOps(const Problem& problem, double rho)
    : mode_(problem.mode), rho_(rho), gamma_(problem.gamma), A_(problem.A), b_(problem.b) {
  require(rho > 0.0, "precompute: rho must be > 0");
  require(b_.size() == A_.rows(), "precompute: dimension mismatch");
  const Eigen::Index m = A_.rows();
  const Eigen::Index n = A_.cols();

  const Mat gram = m <= n ? Mat(A_ * A_.transpose()) : Mat(A_.transpose() * A_);
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram, Eigen::EigenvaluesOnly);
  c_a_ = eig.eigenvalues().maxCoeff();

  if (mode_ == Mode::Constrained) {
    const Mat aat = A_ * A_.transpose();
    llt_.compute(aat);
    if (llt_.info() != Eigen::Success || !(llt_.rcond() > 1e-13)) {
      throw FactorizationError("A A^T is singular or numerically rank deficient");
    }
    x0_ = A_.transpose() * llt_.solve(b_);
  } else {
    require(gamma_ > 0.0, "precompute: gamma must be > 0");
    woodbury_ = m < n;
    if (woodbury_) {
      Mat k = gamma_ * (A_ * A_.transpose());
      k.diagonal().array() += rho_;
      llt_.compute(k);
    } else {
      Mat k = gamma_ * (A_.transpose() * A_);
      k.diagonal().array() += rho_;
      llt_.compute(k);
    }
    if (llt_.info() != Eigen::Success) {
      throw FactorizationError("rho I + gamma A^T A factorization failed");
    }
    x0_ = A_.transpose() * b_;
  }
}

Vec PrecomputedOps::y_update_constrained(const Vec& x, const Vec& v) const {
  require(mode_ == Mode::Constrained, "y_update_constrained: no constrained factorization");
  Vec z = x + v / rho_;
  const Vec r = A_ * z - b_;
  z.noalias() -= A_.transpose() * llt_.solve(r);
  return z;
}

Vec PrecomputedOps::y_update_unconstrained(const Vec& x, const Vec& v) const {
  require(mode_ == Mode::Unconstrained, "y_update_unconstrained: no unconstrained factorization");
  // Solve for the correction d = y - x so the large gamma A^T b term cancels
  // against gamma A^T A x before it enters the linear solve.
  Vec q = v;
  q.noalias() += gamma_ * (A_.transpose() * (b_ - A_ * x));
  Vec d;
  if (woodbury_) {
    const Vec aq = A_ * q;
    d = q;
    d.noalias() -= gamma_ * (A_.transpose() * llt_.solve(aq));
    d /= rho_;
  } else {
    d = llt_.solve(q);
  }
  return x + d;
}

Vec PrecomputedOps::y_update(const Vec& x, const Vec& v) const {
  return mode_ == Mode::Constrained ? y_update_constrained(x, v) : y_update_unconstrained(x, v);
}

// ---------------------------------------------------------------------------

Vec shrink(const Vec& v, const Vec& u) {
  require(v.size() == u.size(), "shrink: size mismatch");
  Vec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - u[i];
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

namespace {

double sum_g(const GSpec& g, const Vec& u) {
  switch (g.id()) {
    case GId::G1: return -0.5 * u.squaredNorm();
    case GId::G2: return 0.5 * u.squaredNorm() - u.sum();
    case GId::ConstZero: return 0.0;
    default: {
      double s = 0.0;
      for (Eigen::Index i = 0; i < u.size(); ++i) s += g_eval(g, u[i]);
      return s;
    }
  }
}

double psi(const Problem& problem, const Vec& y) {
  const double res = (problem.A * y - problem.b).norm();
  if (problem.mode == Mode::Unconstrained) return 0.5 * problem.gamma * res * res;
  return res <= 1e-9 * (1.0 + problem.b.norm()) ? 0.0 : std::numeric_limits<double>::infinity();
}

void check_finite(const SolverState& s) {
  auto bad = [&](const Vec& v, const char* name) {
    if (!v.allFinite()) {
      throw DivergenceError(std::string("iterate ") + name + " became non-finite at iteration " +
                            std::to_string(s.k));
    }
  };
  bad(s.x, "x");
  bad(s.y, "y");
  bad(s.v, "v");
}

}  // namespace

double augmented_lagrangian(const LiftedPenalty& lp, const SolverState& s, const Problem& problem,
                            double rho) {
  const Vec r = s.x - s.y;
  return s.u.dot(s.x.cwiseAbs()) + lp.alpha * sum_g(lp.g, s.u) + psi(problem, s.y) + s.v.dot(r) +
         0.5 * rho * r.squaredNorm();
}

SolverState admm_init(const GSpec& g, const Problem& problem, const SolverConfig& config,
                      const PrecomputedOps& pre) {
  SolverState s;
  s.x = pre.initial_point();
  s.y = s.x;
  if (problem.mode == Mode::Unconstrained) {
    // Start on the manifold v = grad psi(y) that every later iterate satisfies.
    s.v = problem.gamma * (problem.A.transpose() * (problem.A * s.y - problem.b));
  } else {
    s.v = Vec::Zero(s.x.size());
  }
  if (config.alpha0) {
    s.alpha = *config.alpha0;
  } else {
    const double amax = s.x.size() > 0 ? s.x.cwiseAbs().maxCoeff() : 0.0;
    s.alpha = config.alpha0_scale * (amax > 0.0 ? 2.0 * amax : 1.0);
  }
  require(s.alpha > config.alpha_floor, "admm: alpha0 must exceed alpha_floor");
  s.u = u_minimize(LiftedPenalty(g, s.alpha), s.x);
  return s;
}

void admm_weighted_step(const Vec& w, SolverState& s, const PrecomputedOps& pre) {
  const double rho = pre.rho();
  s.x = shrink(s.y - s.v / rho, w / rho);
  s.y = pre.y_update(s.x, s.v);
  s.v.noalias() += rho * (s.x - s.y);
  ++s.k;
}

void admm_step(const LiftedPenalty& lp, SolverState& s, const Problem& problem,
               const SolverConfig& config, const PrecomputedOps& pre) {
  u_minimize_into(lp, s.x, s.u);
  admm_weighted_step(s.u, s, pre);
  if (config.record_traces) {
    s.L_trace.push_back(augmented_lagrangian(lp, s, problem, pre.rho()));
    s.r_trace.push_back((s.x - s.y).norm());
  }
}

SolveResult admm_solve(const GSpec& g, const Problem& problem, const SolverConfig& config) {
  problem.validate();
  config.validate();
  const PrecomputedOps pre(problem, config.rho);
  return admm_solve(g, problem, config, pre);
}

SolveResult admm_solve(const GSpec& g, const Problem& problem, const SolverConfig& config,
                       const PrecomputedOps& pre) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SolverState s = admm_init(g, problem, config, pre);
  SolveResult result;
  result.solver = "admm";
  result.alpha0 = s.alpha;

  Vec x_prev;
  while (s.k < config.max_iter) {
    x_prev = s.x;
    const LiftedPenalty lp(g, s.alpha);
    admm_step(lp, s, problem, config, pre);
    check_finite(s);
    if (config.eta > 0.0) s.alpha = std::max((1.0 - config.eta) * s.alpha, config.alpha_floor);

    const double change = (s.x - x_prev).norm() / std::max(1.0, x_prev.norm());
    const double primal = (s.x - s.y).norm();
    if (change <= config.eps && primal <= config.eps) break;
  }

  result.x = problem.mode == Mode::Constrained ? s.y : s.x;
  result.u = s.u;
  result.iterations = s.k;
  result.final_alpha = s.alpha;
  result.L_trace = std::move(s.L_trace);
  result.r_trace = std::move(s.r_trace);
  if (problem.ground_truth) {
    result.rel_err = (result.x - *problem.ground_truth).norm() / problem.ground_truth->norm();
  }
  result.time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SolveResult admm_solve(const LiftedPenalty& lp_initial, const Problem& problem,
                       SolverConfig config) {
  config.alpha0 = lp_initial.alpha;
  return admm_solve(lp_initial.g, problem, config);
}

StationarityResiduals stationarity_residuals(const LiftedPenalty& lp, const Problem& problem,
                                             const Vec& u, const Vec& x, const Vec& y) {
  require(problem.mode == Mode::Unconstrained, "stationarity_residuals: unconstrained mode only");
  StationarityResiduals out;
  const Domain dom = lp.g.domain();
  double wsq = 0.0;
  if (dom != Domain::Ones) {
    const double top = lp.g.upper();
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double d = std::abs(x[i]) + lp.alpha * g_deriv(lp.g, u[i]);
      double r;
      if (u[i] <= 0.0) {
        r = std::max(-d, 0.0);
      } else if (u[i] >= top) {
        r = std::max(d, 0.0);
      } else {
        r = std::abs(d);
      }
      wsq += r * r;
    }
  }
  out.weights = std::sqrt(wsq);

  const Vec grad = problem.gamma * (problem.A.transpose() * (problem.A * y - problem.b));
  double ssq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = x[i] != 0.0 ? u[i] * std::copysign(1.0, x[i]) + grad[i]
                                 : std::max(std::abs(grad[i]) - u[i], 0.0);
    ssq += r * r;
  }
  out.signal = std::sqrt(ssq);
  return out;
}

}  // namespace ll1
