#include "ll1/verification.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ll1/error.hpp"
#include "ll1/problems.hpp"
#include "ll1/rng.hpp"

namespace ll1 {

namespace {

// Visits every k-subset of {0..n-1} in lexicographic order; stops when f returns false.
template <class F>
void for_each_subset(int n, int k, F&& f) {
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    if (!f(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Mat columns(const Mat& A, const std::vector<int>& idx) {
  Mat S(A.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) S.col(static_cast<Eigen::Index>(j)) = A.col(idx[j]);
  return S;
}

// Erf-lift g evaluated through the regularized incomplete gamma function,
// independent of the erf form used by g_eval.
double erf_g_by_gamma(double sigma, double u) {
  if (u >= 1.0) return 0.0;
  const double s = u <= 0.0 ? std::numeric_limits<double>::infinity() : -std::log(u);
  const double full = 0.5 * std::sqrt(M_PI);  // Gamma(3/2)
  return sigma * (std::isinf(s) ? full : full * boost::math::gamma_p(1.5, s));
}

double oracle_g(const GSpec& g, double u) {
  if (g.id() == GId::Erf) return erf_g_by_gamma(g.params().sigma, u);
  return g_eval(g, u);
}

std::vector<double> make_grid(const GSpec& g, double step) {
  require(step > 0.0 && step <= 1e-4, "grid oracle: step must lie in (0, 1e-4]");
  if (g.domain() == Domain::Ones) return {1.0};
  const double lo = g.id() == GId::LogSum ? step : 0.0;
  const double hi = grid_upper(g);
  const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  std::vector<double> grid;
  grid.reserve(count + 1);
  for (std::size_t i = 0; i < count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  grid.push_back(hi);
  return grid;
}

}  // namespace

// ---------------------------------------------------------------------------

L0Certificate l0_oracle(const Mat& A, const Vec& b, int s_max, double feas_tol) {
  const int n = static_cast<int>(A.cols());
  require(A.rows() == b.size(), "l0_oracle: dimension mismatch");
  require(n <= 24, "l0_oracle: refusing enumeration with n > 24");
  require(s_max >= 0 && s_max <= 6, "l0_oracle: refusing enumeration with s_max > 6");
  require(feas_tol > 0.0, "l0_oracle: feas_tol must be > 0");

  L0Certificate cert;
  if (b.norm() <= feas_tol) {
    cert.s_star = 0;
    cert.solutions.push_back({{}, Vec::Zero(n)});
    return cert;
  }
  for (int s = 1; s <= std::min(s_max, n); ++s) {
    for_each_subset(n, s, [&](const std::vector<int>& idx) {
      const Mat S = columns(A, idx);
      const Eigen::ColPivHouseholderQR<Mat> qr(S);
      if (qr.rank() < s) return true;  // a smaller support would already be feasible
      const Vec c = qr.solve(b);
      if ((S * c - b).norm() <= feas_tol) {
        L0Solution sol{idx, Vec::Zero(n)};
        for (int j = 0; j < s; ++j) sol.x[idx[j]] = c[j];
        cert.solutions.push_back(std::move(sol));
      }
      return true;
    });
    if (!cert.solutions.empty()) {
      cert.s_star = s;
      double eps0 = std::numeric_limits<double>::infinity();
      for (const auto& sol : cert.solutions) {
        for (int j : sol.support) eps0 = std::min(eps0, std::abs(sol.x[j]));
      }
      cert.epsilon0 = eps0;
      return cert;
    }
  }
  throw PreconditionError("l0_oracle: no feasible support of size <= s_max");
}

// ---------------------------------------------------------------------------

double grid_upper(const GSpec& g) {
  const GParams& p = g.params();
  switch (g.id()) {
    case GId::G2: return 1.0;
    case GId::Mcp: return p.a;
    case GId::TransformedL1:
    case GId::LogSum: return 1.0 / p.a;
    case GId::Lp: return 4.0;
    default: return 1.0;
  }
}

double grid_oracle_u(const LiftedPenalty& lp, double t, double step) {
  const std::vector<double> grid = make_grid(lp.g, step);
  double best_u = grid.front();
  double best = std::numeric_limits<double>::infinity();
  for (double u : grid) {
    const double v = u * t + lp.alpha * oracle_g(lp.g, u);
    if (v < best) {
      best = v;
      best_u = u;
    }
  }
  return best_u;
}

UGridOracle::UGridOracle(const GSpec& g, double step) : g_(g), grid_(make_grid(g, step)) {
  gvals_.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) gvals_[i] = oracle_g(g_, grid_[i]);
}

UGridOracle::Min UGridOracle::minimize(double alpha, double t) const {
  const double* u = grid_.data();
  const double* gv = gvals_.data();
  const std::size_t n = grid_.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double v = u[i] * t + alpha * gv[i];
    best = v < best ? v : best;
  }
  std::size_t arg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] * t + alpha * gv[i] == best) {
      arg = i;
      break;
    }
  }
  return {grid_[arg], best};
}

// ---------------------------------------------------------------------------

bool exact_recovery_check(const Problem& problem, const GSpec& g, const SolverConfig& config,
                          const L0Certificate& cert) {
  require(problem.mode == Mode::Constrained, "exact_recovery_check: problem must be constrained");
  const SolveResult r = admm_solve(g, problem, config);
  int nnz = 0;
  for (Eigen::Index i = 0; i < r.x.size(); ++i) nnz += std::abs(r.x[i]) > 1e-6 ? 1 : 0;
  if (nnz != cert.s_star) return false;
  for (const auto& sol : cert.solutions) {
    if ((r.x - sol.x).norm() <= 1e-6 * std::max(1.0, sol.x.norm())) return true;
  }
  return false;
}

bool exact_recovery_check(const Problem& problem, const LiftedPenalty& lp,
                          const SolverConfig& config, const L0Certificate& cert) {
  SolverConfig c = config;
  c.alpha0 = lp.alpha;
  return exact_recovery_check(problem, lp.g, c, cert);
}

double fd_gradient_check(const LiftedPenalty& lp, const Vec& x, double h) {
  require(h > 0.0, "fd_gradient_check: h must be > 0");
  const Vec grad = f_grad_abs(lp, x);
  double worst = 0.0;
  Vec xp = x;
  Vec xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    const double fd = (f_eval(lp, xp) - f_eval(lp, xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
    worst = std::max(worst, std::abs(grad[i] - fd) / std::max(std::abs(grad[i]), 1.0));
  }
  return worst;
}

MonotonicityReport monotonicity_report(const std::vector<double>& trace, double slack) {
  MonotonicityReport rep;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double inc = trace[k] - trace[k - 1];
    if (inc > slack) {
      ++rep.violations;
      rep.max_increase = std::max(rep.max_increase, inc);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

Vec basis_pursuit_reference(const Mat& A, const Vec& b) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  require(b.size() == m, "basis_pursuit_reference: dimension mismatch");
  require(m <= n && n <= 24, "basis_pursuit_reference: needs m <= n <= 24");
  Vec best;
  double best_l1 = std::numeric_limits<double>::infinity();
  for_each_subset(n, m, [&](const std::vector<int>& idx) {
    const Mat S = columns(A, idx);
    const Eigen::FullPivLU<Mat> lu(S);
    if (!lu.isInvertible()) return true;
    const Vec c = lu.solve(b);
    const double l1 = c.lpNorm<1>();
    if (l1 < best_l1) {
      best_l1 = l1;
      best = Vec::Zero(n);
      for (int j = 0; j < m; ++j) best[idx[j]] = c[j];
    }
    return true;
  });
  require(best.size() == n, "basis_pursuit_reference: no invertible basis");
  return best;
}

Vec lasso_reference(const Mat& A, const Vec& b, double gamma, double tol, int max_sweeps) {
  require(gamma > 0.0, "lasso_reference: gamma must be > 0");
  const Eigen::Index n = A.cols();
  Vec x = Vec::Zero(n);
  Vec r = b;  // b - A x
  const Vec col_sq = A.colwise().squaredNorm().transpose();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (col_sq[j] == 0.0) continue;
      // argmin_z |z| + gamma/2 ||r + a_j (x_j - z)||^2
      const double rho_j = A.col(j).dot(r) + col_sq[j] * x[j];
      const double thr = 1.0 / gamma;
      const double z =
          std::abs(rho_j) > thr ? std::copysign(std::abs(rho_j) - thr, rho_j) / col_sq[j] : 0.0;
      const double d = z - x[j];
      if (d != 0.0) {
        r.noalias() -= d * A.col(j);
        x[j] = z;
        max_delta = std::max(max_delta, std::abs(d));
      }
    }
    if (max_delta <= tol * std::max(1.0, x.lpNorm<Eigen::Infinity>())) break;
  }
  return x;
}

// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::vector<std::pair<GId, GParams>> catalog_lifts() {
  return {{GId::Lp, {.p = 0.5}},         {GId::LogSum, {.a = 1.0}},
          {GId::Scad, {.a = 1.0, .b = 3.7}}, {GId::Mcp, {.a = 1.0, .b = 2.0}},
          {GId::CappedL1, {.a = 1.0}},   {GId::TransformedL1, {.a = 1.0}},
          {GId::Erf, {.sigma = 1.0}}};
}

}  // namespace

std::vector<CheckRow> run_verification_suite(std::uint64_t seed) {
  std::vector<CheckRow> rows;
  Rng rng(seed);
  auto randn = [&](Eigen::Index n, double scale) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = scale * rng.normal();
    return v;
  };

  {
    double worst = 0.0;
    for (const auto& [id, params] : catalog_lifts()) {
      for (int k = 0; k < 50; ++k) worst = std::max(worst, lift_residual(id, params, randn(5, std::sqrt(2.0))));
    }
    rows.push_back({"lift catalog identities", worst <= 1e-8, "max residual " + fmt(worst)});
  }

  {
    double worst = 0.0;
    const std::vector<GSpec> specs = {GSpec::g1(), GSpec::g2(), GSpec::mcp(1.0, 3.0),
                                      GSpec::transformed_l1(4.0), GSpec::capped_l1(1.0)};
    for (const auto& g : specs) {
      const UGridOracle oracle(g, 1e-5);
      for (int k = 0; k < 20; ++k) {
        const double alpha = 0.01 + 9.99 * rng.uniform();
        const double t = 10.0 * rng.uniform();
        const LiftedPenalty lp(g, alpha);
        const double val = coord_objective(lp, t, u_minimize_coord(lp, t));
        worst = std::max(worst, val - oracle.minimize(alpha, t).value);
      }
    }
    rows.push_back({"u-subproblem vs grid oracle", worst <= 1e-9, "max excess " + fmt(worst)});
  }

  {
    bool ok = true;
    for (int k = 0; k < 50 && ok; ++k) {
      Vec x = randn(6, 1.0);
      x[k % 6] = 0.0;
      double mn = std::numeric_limits<double>::infinity();
      for (double v : x) {
        if (v != 0.0) mn = std::min(mn, std::abs(v));
      }
      const double alpha = std::ldexp(1.0, std::ilogb(mn));  // power of two below 2 min|x_i|
      const double f = f_eval(LiftedPenalty(GSpec::g1(), alpha), x);
      const double l0 = static_cast<double>((x.array() != 0.0).count());
      ok = (static_cast<double>(x.size()) + (2.0 / alpha) * f == l0);
    }
    rows.push_back({"g1 l0 limit", ok, ok ? "exact" : "mismatch"});
  }

  {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      Vec x = randn(4, 1.0).cwiseAbs().array() + 0.1;
      worst = std::max(worst, fd_gradient_check(LiftedPenalty(GSpec::g2(), 1.0 + rng.uniform()), x));
    }
    rows.push_back({"g2 gradient vs finite differences", worst <= 1e-5, "max rel err " + fmt(worst)});
  }

  {
    Mat A(2, 3);
    A << 1, 0, 1, 0, 1, 1;
    const L0Certificate cert = l0_oracle(A, Vec::Ones(2));
    const bool ok = cert.s_star == 1 && cert.solutions.size() == 1 && cert.solutions[0].support == std::vector<int>{2};
    rows.push_back({"l0 oracle small instance", ok, "s_star " + std::to_string(cert.s_star)});
  }

  {
    int hits = 0;
    const int trials = 10;
    for (int t = 0; t < trials; ++t) {
      const TrialSeed ts{seed, static_cast<std::uint64_t>(t)};
      const Instance inst = gen_instance(MatrixSpec::gaussian(8, 12, 0.0), 2, 0.0, ts);
      const L0Certificate cert = l0_oracle(inst.A, inst.b, 4);
      SolverConfig cfg;
      cfg.eps = 1e-10;
      cfg.max_iter = 20000;
      cfg.record_traces = false;
      hits += exact_recovery_check(Problem::constrained(inst.A, inst.b), GSpec::g1(), cfg, cert) ? 1 : 0;
    }
    rows.push_back({"exact recovery 8x12 s=2 (g1)", hits >= 8,
                    std::to_string(hits) + "/" + std::to_string(trials)});
  }

  {
    Rng mr(seed + 1);
    Mat A(16, 48);
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = mr.normal() / 4.0;
    const Vec b = randn(16, 1.0);
    const Problem prob = Problem::unconstrained(A, b, 1.0);
    const PrecomputedOps probe(prob, 1.0);
    SolverConfig cfg;
    cfg.rho = std::sqrt(2.0) * prob.gamma * probe.c_a() * 1.01;
    cfg.alpha0 = 0.5;
    cfg.eta = 0.0;
    cfg.eps = 1e-12;
    cfg.max_iter = 3000;
    const SolveResult r = admm_solve(GSpec::g2(), prob, cfg);
    const MonotonicityReport rep = monotonicity_report(r.L_trace);
    rows.push_back({"fixed-alpha augmented Lagrangian decrease", rep.violations == 0,
                    std::to_string(rep.violations) + " violations"});
  }

  {
    Mat A = Mat::Identity(4, 4);
    Vec b(4);
    b << 0.0, 1.5, 0.0, -2.0;
    SolverConfig cfg;
    cfg.eps = 1e-12;
    const SolveResult r = admm_solve(GSpec::g1(), Problem::constrained(A, b), cfg);
    const double err = (r.x - b).norm();
    rows.push_back({"identity sensing recovery", err <= 1e-8, "error " + fmt(err)});
  }

  return rows;
}

}  // namespace ll1
