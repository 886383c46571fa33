#pragma once

// Lifted-l1 penalties F(x) = min_{u in U} <u, |x|> + alpha * g(u) for separable g
// and rectangular U, plus the catalog of classical sparsity penalties written in
// that form.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <string_view>

namespace ll1 {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class GId {
  G1,             // -u^2/2 on [0,1]
  G2,             // u^2/2 - u on [0,inf)
  Lp,             // (1-p)/p u^{p/(p-1)} on [0,inf)
  LogSum,         // a u - log u on (0,inf)
  Scad,           // -a b w + (b-1) a w^2/2 on [0,1] (weights rescaled by 1/a)
  Mcp,            // -b (a u - u^2/2) on [0,inf)
  CappedL1,       // -a u on [0,1]
  TransformedL1,  // a u - 2 sqrt(a u) on [0,inf)
  Erf,            // sigma * int_u^1 sqrt(-log t) dt on [0,1]
  ConstZero,      // 0 on {1}: plain l1
};

enum class Domain { Box01, NonNeg, Ones };
enum class TypeClass { B, C, Other };

/// Parameters of g. Only the fields relevant to the GId are meaningful.
struct GParams {
  double p = 0.0;
  double a = 0.0;
  double b = 0.0;
  double sigma = 0.0;

  bool operator==(const GParams&) const = default;
};

/// A separable lifting function g together with its weight domain U and the
/// declared Type B / Type C class. Construction validates parameter ranges and
/// the catalog pairing between g and U.
class GSpec {
 public:
  static GSpec g1();
  static GSpec g2();
  static GSpec lp(double p);
  static GSpec log_sum(double a);
  static GSpec scad(double a, double b);
  static GSpec mcp(double a, double b);
  static GSpec capped_l1(double a);
  static GSpec transformed_l1(double a);
  static GSpec erf(double sigma);
  static GSpec const_zero();

  /// Catalog entry for `id` with the catalog domain and declared type.
  static GSpec make(GId id, const GParams& params);
  /// Full constructor used by deserialization; `domain` must be the catalog one.
  static GSpec make(GId id, const GParams& params, Domain domain, TypeClass type);

  GId id() const { return id_; }
  const GParams& params() const { return params_; }
  Domain domain() const { return domain_; }
  TypeClass type_class() const { return type_; }

  /// Same g with a different declared type (checked by classify_validate).
  GSpec declared_as(TypeClass type) const;

  /// Upper end of the scalar domain: 1 for [0,1] and {1}, +inf for [0,inf).
  double upper() const;
  /// Lower end actually usable by numeric routines (log-sum excludes 0).
  double lower() const;

  bool operator==(const GSpec&) const = default;

 private:
  GSpec(GId id, GParams params, Domain domain, TypeClass type)
      : id_(id), params_(params), domain_(domain), type_(type) {}

  GId id_;
  GParams params_;
  Domain domain_;
  TypeClass type_;
};

/// A lifting function scaled by alpha > 0.
struct LiftedPenalty {
  LiftedPenalty(GSpec g, double alpha);

  GSpec g;
  double alpha;
};

enum class UMethod { Auto, Numeric };

std::string_view to_string(GId id);
std::string_view to_string(Domain d);
std::string_view to_string(TypeClass t);
GId gid_from_string(std::string_view s);
Domain domain_from_string(std::string_view s);
TypeClass type_from_string(std::string_view s);

/// h(t) = int_t^1 sqrt(-log tau) dtau, in closed form via erf.
double erf_h(double t);

/// g_i(u). Throws PreconditionError when u lies outside the scalar domain.
/// Log-sum at u = 0 returns +inf.
double g_eval(const GSpec& g, double u);

/// g_i'(u) on the domain (one-sided at the endpoints).
double g_deriv(const GSpec& g, double u);

/// argmin over the scalar domain of u t + alpha g(u), t >= 0.
/// For l_p at t = 0 the infimum is approached as u -> inf and +inf is returned.
double u_minimize_coord(const LiftedPenalty& lp, double t, UMethod method = UMethod::Auto);

/// Coordinate-wise u_minimize_coord on |x_i|.
Vec u_minimize(const LiftedPenalty& lp, const Vec& x);
void u_minimize_into(const LiftedPenalty& lp, const Vec& x, Vec& u);

/// u t + alpha g(u), with the l_p limit (u = inf, t = 0) mapped to 0.
double coord_objective(const LiftedPenalty& lp, double t, double u);

/// Upper end of a bracket containing the minimizer of u t + alpha g(u).
double bracket_upper(const LiftedPenalty& lp, double t);

/// F(x) = <u*, |x|> + alpha g(u*).
double f_eval(const LiftedPenalty& lp, const Vec& x);

/// Gradient of F on the positive cone (equals u*). Requires x > 0 and a strongly
/// convex g; otherwise throws UnsupportedOperation / PreconditionError.
Vec f_grad_abs(const LiftedPenalty& lp, const Vec& x);

/// Closed-form classical penalty J_scaled(x) the catalog entry lifts, and the
/// additive constant c with F + c = J_scaled (alpha = 1).
double lift_target(GId id, const GParams& params, const Vec& x);
double lift_constant(GId id, const GParams& params, Eigen::Index n);

/// |F(x) + c - J_scaled(x)| for the catalog entry (id, params) at alpha = 1.
double lift_residual(GId id, const GParams& params, const Vec& x);

/// Falsification check of the declared type on a sampled grid.
bool classify_validate(const GSpec& g, int grid_size);

/// Golden-section minimization of a unimodal f on [lo, hi].
template <class F>
double golden_section(F&& f, double lo, double hi, double tol) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  const double lo0 = lo;
  const double hi0 = hi;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  // Domain endpoints are candidates too; concave objectives are minimized there.
  double best = 0.5 * (lo + hi);
  double fbest = f(best);
  for (double cand : {lo0, hi0}) {
    double fv = f(cand);
    if (fv < fbest) {
      fbest = fv;
      best = cand;
    }
  }
  return best;
}

}  // namespace ll1
