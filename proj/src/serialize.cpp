#include "ll1/serialize.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "ll1/error.hpp"

namespace ll1 {

namespace {

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw PreconditionError(where + ": " + what);
}

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) field_error(where, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items()) {
    if (!allowed.count(k)) field_error(where + "." + k, "unknown field");
  }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number()) field_error(where + "." + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_number_integer()) field_error(where + "." + key, "expected an integer");
  return v.get<int>();
}

bool get_bool(const json& j, const std::string& key, const std::string& where) {
  const json& v = j.at(key);
  if (!v.is_boolean()) field_error(where + "." + key, "expected true or false");
  return v.get<bool>();
}

json params_json(const GSpec& g) {
  const GParams& p = g.params();
  json out = json::object();
  switch (g.id()) {
    case GId::Lp: out["p"] = p.p; break;
    case GId::LogSum:
    case GId::CappedL1:
    case GId::TransformedL1: out["a"] = p.a; break;
    case GId::Scad:
    case GId::Mcp:
      out["a"] = p.a;
      out["b"] = p.b;
      break;
    case GId::Erf: out["sigma"] = p.sigma; break;
    default: break;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json to_json(const GSpec& g) {
  return json{{"g", std::string(to_string(g.id()))},
              {"params", params_json(g)},
              {"domain", std::string(to_string(g.domain()))},
              {"type", std::string(to_string(g.type_class()))}};
}

GSpec gspec_from_json(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return GSpec::make(gid_from_string(j.get<std::string>()), {});
    reject_unknown(j, where, {"g", "params", "domain", "type"});
    if (!j.contains("g") || !j.at("g").is_string()) field_error(where + ".g", "expected a name");
    const GId id = gid_from_string(j.at("g").get<std::string>());
    GParams p;
    if (j.contains("params")) {
      const json& pj = j.at("params");
      const std::string pw = where + ".params";
      reject_unknown(pj, pw, {"p", "a", "b", "sigma"});
      if (pj.contains("p")) p.p = get_number(pj, "p", pw);
      if (pj.contains("a")) p.a = get_number(pj, "a", pw);
      if (pj.contains("b")) p.b = get_number(pj, "b", pw);
      if (pj.contains("sigma")) p.sigma = get_number(pj, "sigma", pw);
    }
    const GSpec base = GSpec::make(id, p);
    const Domain dom =
        j.contains("domain") ? domain_from_string(j.at("domain").get<std::string>()) : base.domain();
    const TypeClass type =
        j.contains("type") ? type_from_string(j.at("type").get<std::string>()) : base.type_class();
    return GSpec::make(id, p, dom, type);
  } catch (const json::exception& e) {
    field_error(where, e.what());
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    field_error(where, msg);
  }
}

json to_json(const SolverConfig& c) {
  json j{{"rho", c.rho},   {"eta", c.eta},           {"alpha_floor", c.alpha_floor},
         {"eps", c.eps},   {"max_iter", c.max_iter}, {"alpha0_scale", c.alpha0_scale},
         {"record_traces", c.record_traces}};
  if (c.alpha0) j["alpha0"] = *c.alpha0;
  return j;
}

SolverConfig solver_config_from_json(const json& j, const std::string& where) {
  reject_unknown(j, where,
                 {"rho", "alpha0", "alpha0_scale", "eta", "alpha_floor", "eps", "max_iter",
                  "record_traces"});
  SolverConfig c;
  if (j.contains("rho")) c.rho = get_number(j, "rho", where);
  if (j.contains("alpha0")) c.alpha0 = get_number(j, "alpha0", where);
  if (j.contains("alpha0_scale")) c.alpha0_scale = get_number(j, "alpha0_scale", where);
  if (j.contains("eta")) c.eta = get_number(j, "eta", where);
  if (j.contains("alpha_floor")) c.alpha_floor = get_number(j, "alpha_floor", where);
  if (j.contains("eps")) c.eps = get_number(j, "eps", where);
  if (j.contains("max_iter")) c.max_iter = get_int(j, "max_iter", where);
  if (j.contains("record_traces")) c.record_traces = get_bool(j, "record_traces", where);
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    field_error(where, e.what());
  }
  return c;
}

json to_json(const DcaConfig& c) {
  json j{{"eta", c.eta},
         {"alpha_floor", c.alpha_floor},
         {"alpha0_scale", c.alpha0_scale},
         {"max_outer", c.max_outer},
         {"max_inner", c.max_inner},
         {"inner_tol", c.inner_tol},
         {"rho", c.rho},
         {"sub_max_iter", c.sub_max_iter},
         {"record_traces", c.record_traces}};
  if (c.alpha0) j["alpha0"] = *c.alpha0;
  return j;
}

DcaConfig dca_config_from_json(const json& j, const std::string& where) {
  reject_unknown(j, where,
                 {"alpha0", "alpha0_scale", "eta", "alpha_floor", "max_outer", "max_inner",
                  "inner_tol", "rho", "sub_max_iter", "record_traces"});
  DcaConfig c;
  if (j.contains("alpha0")) c.alpha0 = get_number(j, "alpha0", where);
  if (j.contains("alpha0_scale")) c.alpha0_scale = get_number(j, "alpha0_scale", where);
  if (j.contains("eta")) c.eta = get_number(j, "eta", where);
  if (j.contains("alpha_floor")) c.alpha_floor = get_number(j, "alpha_floor", where);
  if (j.contains("max_outer")) c.max_outer = get_int(j, "max_outer", where);
  if (j.contains("max_inner")) c.max_inner = get_int(j, "max_inner", where);
  if (j.contains("inner_tol")) c.inner_tol = get_number(j, "inner_tol", where);
  if (j.contains("rho")) c.rho = get_number(j, "rho", where);
  if (j.contains("sub_max_iter")) c.sub_max_iter = get_int(j, "sub_max_iter", where);
  if (j.contains("record_traces")) c.record_traces = get_bool(j, "record_traces", where);
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    field_error(where, e.what());
  }
  return c;
}

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) field_error(where, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) field_error(where + "[" + std::to_string(i) + "]", "expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json to_json(const SolveResult& r, bool include_x, bool include_traces) {
  json j{{"solver", r.solver},
         {"iterations", r.iterations},
         {"outer_iterations", r.outer_iterations},
         {"inner_iterations", r.inner_iterations},
         {"time_ms", r.time_ms},
         {"alpha0", r.alpha0},
         {"final_alpha", r.final_alpha}};
  if (r.rel_err) j["rel_err"] = *r.rel_err;
  if (include_x) j["x"] = vec_to_json(r.x);
  if (include_traces) {
    j["L_trace"] = r.L_trace;
    j["r_trace"] = r.r_trace;
    j["objective_trace"] = r.objective_trace;
  }
  return j;
}

json to_json(const L0Certificate& c) {
  json sols = json::array();
  for (const auto& s : c.solutions) sols.push_back({{"support", s.support}, {"x", vec_to_json(s.x)}});
  return json{{"s_star", c.s_star}, {"epsilon0", c.epsilon0}, {"solutions", sols}};
}

L0Certificate certificate_from_json(const json& j) {
  const std::string where = "certificate";
  reject_unknown(j, where, {"s_star", "epsilon0", "solutions"});
  L0Certificate c;
  c.s_star = get_int(j, "s_star", where);
  c.epsilon0 = get_number(j, "epsilon0", where);
  const json& sols = j.at("solutions");
  if (!sols.is_array()) field_error(where + ".solutions", "expected an array");
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const std::string w = where + ".solutions[" + std::to_string(i) + "]";
    reject_unknown(sols[i], w, {"support", "x"});
    L0Solution s;
    s.support = sols[i].at("support").get<std::vector<int>>();
    s.x = vec_from_json(sols[i].at("x"), w + ".x");
    c.solutions.push_back(std::move(s));
  }
  return c;
}

}  // namespace ll1
