#include "ll1/regularizer.hpp"


#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ll1/error.hpp"

namespace ll1 {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSumFloor = 1e-12;
constexpr double kNumericTol = 1e-10;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

Domain catalog_domain(GId id) {
  switch (id) {
    case GId::G1:
    case GId::Scad:
    case GId::CappedL1:
    case GId::Erf:
      return Domain::Box01;
    case GId::G2:
    case GId::Lp:
    case GId::LogSum:
    case GId::Mcp:
    case GId::TransformedL1:
      return Domain::NonNeg;
    case GId::ConstZero:
      return Domain::Ones;
  }
  return Domain::Box01;
}

TypeClass catalog_type(GId id) {
  switch (id) {
    case GId::G1:
    case GId::Scad:
    case GId::CappedL1:
      return TypeClass::B;
    case GId::G2:
    case GId::Mcp:
    case GId::TransformedL1:
      return TypeClass::C;
    default:
      return TypeClass::Other;
  }
}

void validate_params(GId id, const GParams& p) {
  switch (id) {
    case GId::Lp:
      require(std::isfinite(p.p) && p.p > 0.0 && p.p < 1.0, "lp: p must lie in (0,1)");
      break;
    case GId::LogSum:
    case GId::CappedL1:
    case GId::TransformedL1:
      require(finite_positive(p.a), std::string(to_string(id)) + ": a must be > 0");
      break;
    case GId::Scad:
      require(finite_positive(p.a), "scad: a must be > 0");
      require(std::isfinite(p.b) && p.b > 1.0, "scad: b must be > 1");
      break;
    case GId::Mcp:
      require(finite_positive(p.a), "mcp: a must be > 0");
      require(finite_positive(p.b), "mcp: b must be > 0");
      break;
    case GId::Erf:
      require(finite_positive(p.sigma), "erf: sigma must be > 0");
      break;
    default:
      break;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// GSpec

GSpec GSpec::make(GId id, const GParams& params) {
  return make(id, params, catalog_domain(id), catalog_type(id));
}

GSpec GSpec::make(GId id, const GParams& params, Domain domain, TypeClass type) {
  validate_params(id, params);
  require(domain == catalog_domain(id), std::string(to_string(id)) + ": domain must be " +
                                            std::string(to_string(catalog_domain(id))));
  // Keep only the parameters that belong to this g so equality is meaningful.
  GParams kept;
  switch (id) {
    case GId::Lp: kept.p = params.p; break;
    case GId::LogSum:
    case GId::CappedL1:
    case GId::TransformedL1: kept.a = params.a; break;
    case GId::Scad:
    case GId::Mcp:
      kept.a = params.a;
      kept.b = params.b;
      break;
    case GId::Erf: kept.sigma = params.sigma; break;
    default: break;
  }
  return GSpec(id, kept, domain, type);
}

GSpec GSpec::g1() { return make(GId::G1, {}); }
GSpec GSpec::g2() { return make(GId::G2, {}); }
GSpec GSpec::lp(double p) { return make(GId::Lp, {.p = p}); }
GSpec GSpec::log_sum(double a) { return make(GId::LogSum, {.a = a}); }
GSpec GSpec::scad(double a, double b) { return make(GId::Scad, {.a = a, .b = b}); }
GSpec GSpec::mcp(double a, double b) { return make(GId::Mcp, {.a = a, .b = b}); }
GSpec GSpec::capped_l1(double a) { return make(GId::CappedL1, {.a = a}); }
GSpec GSpec::transformed_l1(double a) { return make(GId::TransformedL1, {.a = a}); }
GSpec GSpec::erf(double sigma) { return make(GId::Erf, {.sigma = sigma}); }
GSpec GSpec::const_zero() { return make(GId::ConstZero, {}); }

GSpec GSpec::declared_as(TypeClass type) const {
  GSpec copy = *this;
  copy.type_ = type;
  return copy;
}

double GSpec::upper() const { return domain_ == Domain::NonNeg ? kInf : 1.0; }

double GSpec::lower() const {
  if (domain_ == Domain::Ones) return 1.0;
  return id_ == GId::LogSum ? kLogSumFloor : 0.0;
}

LiftedPenalty::LiftedPenalty(GSpec g_, double alpha_) : g(std::move(g_)), alpha(alpha_) {
  require(finite_positive(alpha), "alpha must be a finite positive number");
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(GId id) {
  switch (id) {
    case GId::G1: return "g1";
    case GId::G2: return "g2";
    case GId::Lp: return "lp";
    case GId::LogSum: return "log_sum";
    case GId::Scad: return "scad";
    case GId::Mcp: return "mcp";
    case GId::CappedL1: return "cl1";
    case GId::TransformedL1: return "tl1";
    case GId::Erf: return "erf";
    case GId::ConstZero: return "const_zero";
  }
  return "?";
}

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::Box01: return "box01";
    case Domain::NonNeg: return "nonneg";
    case Domain::Ones: return "ones";
  }
  return "?";
}

std::string_view to_string(TypeClass t) {
  switch (t) {
    case TypeClass::B: return "B";
    case TypeClass::C: return "C";
    case TypeClass::Other: return "other";
  }
  return "?";
}

GId gid_from_string(std::string_view s) {
  for (GId id : {GId::G1, GId::G2, GId::Lp, GId::LogSum, GId::Scad, GId::Mcp, GId::CappedL1,
                 GId::TransformedL1, GId::Erf, GId::ConstZero}) {
    if (to_string(id) == s) return id;
  }
  throw PreconditionError("unknown g id '" + std::string(s) + "'");
}

Domain domain_from_string(std::string_view s) {
  for (Domain d : {Domain::Box01, Domain::NonNeg, Domain::Ones}) {
    if (to_string(d) == s) return d;
  }
  throw PreconditionError("unknown domain '" + std::string(s) + "'");
}

TypeClass type_from_string(std::string_view s) {
  for (TypeClass t : {TypeClass::B, TypeClass::C, TypeClass::Other}) {
    if (to_string(t) == s) return t;
  }
  throw PreconditionError("unknown type class '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Scalar g

double erf_h(double t) {
  require(t >= 0.0 && t <= 1.0, "erf_h: t must lie in [0,1]");
  if (t == 1.0) return 0.0;
  // tau = exp(-s^2) gives int_0^U 2 s^2 exp(-s^2) ds with U = sqrt(-log t); integrate by parts
  if (t == 0.0) return 0.5 * std::sqrt(M_PI);
  const double U = std::sqrt(-std::log(t));
  return 0.5 * std::sqrt(M_PI) * std::erf(U) - U * t;
}

double g_eval(const GSpec& g, double u) {
  const GParams& p = g.params();
  switch (g.domain()) {
    case Domain::Box01:
      require(u >= 0.0 && u <= 1.0, "g_eval: u outside [0,1]");
      break;
    case Domain::NonNeg:
      require(u >= 0.0 && !std::isnan(u), "g_eval: u outside [0,inf)");
      break;
    case Domain::Ones:
      require(u == 1.0, "g_eval: u outside {1}");
      break;
  }
  switch (g.id()) {
    case GId::G1: return -0.5 * u * u;
    case GId::G2: return 0.5 * u * u - u;
    case GId::Lp: return (1.0 - p.p) / p.p * std::pow(u, p.p / (p.p - 1.0));
    case GId::LogSum: return u == 0.0 ? kInf : p.a * u - std::log(u);
    case GId::Scad: return -p.a * p.b * u + 0.5 * (p.b - 1.0) * p.a * u * u;
    case GId::Mcp: return -p.b * (p.a * u - 0.5 * u * u);
    case GId::CappedL1: return -p.a * u;
    case GId::TransformedL1: return p.a * u - 2.0 * std::sqrt(p.a * u);
    case GId::Erf: return p.sigma * erf_h(u);
    case GId::ConstZero: return 0.0;
  }
  return 0.0;
}

double g_deriv(const GSpec& g, double u) {
  const GParams& p = g.params();
  switch (g.id()) {
    case GId::G1: return -u;
    case GId::G2: return u - 1.0;
    case GId::Lp: return -std::pow(u, 1.0 / (p.p - 1.0));
    case GId::LogSum: return p.a - 1.0 / u;
    case GId::Scad: return -p.a * p.b + (p.b - 1.0) * p.a * u;
    case GId::Mcp: return -p.b * (p.a - u);
    case GId::CappedL1: return -p.a;
    case GId::TransformedL1: return u == 0.0 ? -kInf : p.a - std::sqrt(p.a / u);
    case GId::Erf: return u == 0.0 ? -kInf : -p.sigma * std::sqrt(-std::log(u));
    case GId::ConstZero: return 0.0;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// u-subproblem

namespace {

// Closed-form argmin of u t + alpha g(u); every catalog entry has one.
inline double closed_form_u(GId id, const GParams& p, double alpha, double t) {
  switch (id) {
    case GId::G1:
      // Tie at t = alpha/2 goes to u = 0.
      return t < 0.5 * alpha ? 1.0 : 0.0;
    case GId::G2:
      return std::max(1.0 - t / alpha, 0.0);
    case GId::Lp:
      return t == 0.0 ? kInf : std::pow(t / alpha, p.p - 1.0);
    case GId::LogSum:
      return alpha / (t + alpha * p.a);
    case GId::Scad:
      return std::clamp((alpha * p.a * p.b - t) / (alpha * p.a * (p.b - 1.0)), 0.0, 1.0);
    case GId::Mcp:
      return std::max(p.a - t / (alpha * p.b), 0.0);
    case GId::CappedL1:
      return t < alpha * p.a ? 1.0 : 0.0;
    case GId::TransformedL1: {
      const double r = alpha / (t + alpha * p.a);
      return p.a * r * r;
    }
    case GId::Erf: {
      const double r = t / (alpha * p.sigma);
      return std::exp(-r * r);
    }
    case GId::ConstZero:
      return 1.0;
  }
  return 0.0;
}

}  // namespace

double coord_objective(const LiftedPenalty& lp, double t, double u) {
  if (std::isinf(u)) return 0.0;
  return u * t + lp.alpha * g_eval(lp.g, u);
}

double bracket_upper(const LiftedPenalty& lp, double t) {
  const GSpec& g = lp.g;
  if (g.domain() != Domain::NonNeg) return 1.0;
  const GParams& p = g.params();
  double hi = 1.0;
  switch (g.id()) {
    case GId::Mcp: hi = p.a; break;
    case GId::LogSum:
    case GId::TransformedL1: hi = 1.0 / p.a; break;
    default: break;
  }
  auto f = [&](double u) { return coord_objective(lp, t, u); };
  bool expanded = false;
  while (hi < 1e12 && f(2.0 * hi) < f(hi)) {
    hi *= 2.0;
    expanded = true;
  }
  return expanded ? 2.0 * hi : hi;
}

double u_minimize_coord(const LiftedPenalty& lp, double t, UMethod method) {
  require(t >= 0.0 && std::isfinite(t), "u_minimize_coord: t must be finite and >= 0");
  if (method == UMethod::Auto) return closed_form_u(lp.g.id(), lp.g.params(), lp.alpha, t);
  if (lp.g.domain() == Domain::Ones) return 1.0;
  auto f = [&](double u) { return coord_objective(lp, t, u); };
  return golden_section(f, lp.g.lower(), bracket_upper(lp, t), kNumericTol);
}

void u_minimize_into(const LiftedPenalty& lp, const Vec& x, Vec& u) {
  u.resize(x.size());
  const GId id = lp.g.id();
  const GParams& p = lp.g.params();
  const double alpha = lp.alpha;
  switch (id) {
    case GId::G1: {
      const double thr = 0.5 * alpha;
      for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = std::abs(x[i]) < thr ? 1.0 : 0.0;
      return;
    }
    case GId::G2:
      for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = std::max(1.0 - std::abs(x[i]) / alpha, 0.0);
      return;
    case GId::ConstZero:
      u.setOnes();
      return;
    default:
      for (Eigen::Index i = 0; i < x.size(); ++i) u[i] = closed_form_u(id, p, alpha, std::abs(x[i]));
  }
}

Vec u_minimize(const LiftedPenalty& lp, const Vec& x) {
  Vec u;
  u_minimize_into(lp, x, u);
  return u;
}

double f_eval(const LiftedPenalty& lp, const Vec& x) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = std::abs(x[i]);
    total += coord_objective(lp, t, closed_form_u(lp.g.id(), lp.g.params(), lp.alpha, t));
  }
  return total;
}

Vec f_grad_abs(const LiftedPenalty& lp, const Vec& x) {
  const GId id = lp.g.id();
  if (id != GId::G2 && id != GId::Mcp && id != GId::Scad) {
    throw UnsupportedOperation("f_grad_abs: g '" + std::string(to_string(id)) +
                               "' is not strongly convex; the inner minimizer may be non-unique");
  }
  require((x.array() > 0.0).all(), "f_grad_abs: x must be strictly positive");
  return u_minimize(lp, x);
}

// ---------------------------------------------------------------------------
// Catalog lifts

namespace {

void require_catalog(GId id) {
  if (id == GId::G1 || id == GId::G2 || id == GId::ConstZero) {
    throw PreconditionError("'" + std::string(to_string(id)) +
                            "' is not a catalog regularizer with a classical counterpart");
  }
}

double scad_penalty(double t, double a, double b) {
  t = std::abs(t);
  if (t <= a) return a * t;
  if (t <= a * b) return (2.0 * a * b * t - t * t - a * a) / (2.0 * (b - 1.0));
  return 0.5 * (b + 1.0) * a * a;
}

double mcp_penalty(double t, double a, double b) {
  t = std::abs(t);
  if (t <= a * b) return a * t - t * t / (2.0 * b);
  return 0.5 * b * a * a;
}

}  // namespace

double lift_target(GId id, const GParams& p, const Vec& x) {
  require_catalog(id);
  validate_params(id, p);
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = std::abs(x[i]);
    switch (id) {
      case GId::Lp: total += std::pow(t, p.p) / p.p; break;
      case GId::LogSum: total += std::log(t + p.a); break;
      case GId::Scad: total += scad_penalty(t, p.a, p.b) / p.a; break;
      case GId::Mcp: total += mcp_penalty(t, p.a, p.b); break;
      case GId::CappedL1: total += std::min(t, p.a); break;
      case GId::TransformedL1: total += t / (p.a + t); break;
      case GId::Erf: total += p.sigma * 0.5 * std::sqrt(M_PI) * std::erf(t / p.sigma); break;
      default: break;
    }
  }
  return total;
}

double lift_constant(GId id, const GParams& p, Eigen::Index n) {
  require_catalog(id);
  const double dn = static_cast<double>(n);
  switch (id) {
    case GId::Lp: return 0.0;
    case GId::LogSum: return -dn;
    case GId::Scad: return dn * 0.5 * (p.b + 1.0) * p.a;
    case GId::Mcp: return dn * 0.5 * p.b * p.a * p.a;
    case GId::CappedL1: return dn * p.a;
    case GId::TransformedL1: return dn;
    case GId::Erf: return 0.0;
    default: return 0.0;
  }
}

double lift_residual(GId id, const GParams& params, const Vec& x) {
  require_catalog(id);
  const LiftedPenalty lp(GSpec::make(id, params), 1.0);
  return std::abs(f_eval(lp, x) + lift_constant(id, params, x.size()) - lift_target(id, params, x));
}

// ---------------------------------------------------------------------------
// Type checks

namespace {

double max_quotient(const GSpec& g, int n) {
  double q = 0.0;
  double prev = g_eval(g, 0.0);
  for (int k = 1; k < n; ++k) {
    const double u = static_cast<double>(k) / (n - 1);
    const double cur = g_eval(g, u);
    q = std::max(q, std::abs(cur - prev) * (n - 1));
    prev = cur;
  }
  return q;
}

bool check_type_b(const GSpec& g, int n) {
  if (g.domain() != Domain::Box01) return false;
  double prev = g_eval(g, 0.0);
  if (!std::isfinite(prev)) return false;
  for (int k = 1; k < n; ++k) {
    const double cur = g_eval(g, static_cast<double>(k) / (n - 1));
    if (!std::isfinite(cur) || !(cur < prev)) return false;
    prev = cur;
  }
  // A bounded derivative keeps the steepest difference quotient stable under refinement.
  const double coarse = max_quotient(g, n);
  const double fine = max_quotient(g, 4 * n);
  return fine <= 1.25 * coarse + 1e-12;
}

bool check_type_c(const GSpec& g, int n) {
  if (g.domain() != Domain::NonNeg) return false;
  const double g0 = g_eval(g, 0.0);
  if (!std::isfinite(g0)) return false;
  // Past the minimizer of g itself; give up if g keeps decreasing.
  double hi = 1.0;
  while (g_eval(g, 2.0 * hi) < g_eval(g, hi)) {
    hi *= 2.0;
    if (hi > 1e8) return false;
  }
  const double u_max = 2.0 * hi;
  std::vector<double> vals(n);
  for (int k = 0; k < n; ++k) vals[k] = g_eval(g, u_max * k / (n - 1));
  const double scale = 1.0 + std::abs(g0);
  for (int k = 1; k + 1 < n; ++k) {
    if (vals[k - 1] - 2.0 * vals[k] + vals[k + 1] < -1e-12 * scale) return false;
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  return it != vals.begin() && *it < g0;
}

}  // namespace

bool classify_validate(const GSpec& g, int grid_size) {
  require(grid_size >= 16, "classify_validate: grid_size must be >= 16");
  switch (g.type_class()) {
    case TypeClass::B: return check_type_b(g, grid_size);
    case TypeClass::C: return check_type_c(g, grid_size);
    case TypeClass::Other: return true;
  }
  return false;
}

}  // namespace ll1
