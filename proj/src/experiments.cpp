#include "ll1/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include "ll1/error.hpp"

namespace ll1 {

namespace {

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw PreconditionError(where + ": " + what);
}

std::string solver_name(SolverKind k) { return k == SolverKind::Admm ? "admm" : "dca"; }

SolverKind solver_from_string(const std::string& s, const std::string& where) {
  if (s == "admm") return SolverKind::Admm;
  if (s == "dca") return SolverKind::Dca;
  field_error(where, "unknown solver '" + s + "' (expected admm or dca)");
}

std::vector<int> int_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) field_error(where, "expected a non-empty list of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) {
      field_error(where + "[" + std::to_string(i) + "]", "expected an integer");
    }
    out.push_back(j[i].get<int>());
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// ---------------------------------------------------------------------------

void SweepConfig::validate() const {
  matrix.validate();
  require(!grid.empty(), "sweep: grid must be non-empty");
  require(trials >= 1, "sweep: trials must be >= 1");
  require(!methods.empty(), "sweep: methods must be non-empty");
  require(std::isfinite(sigma) && sigma >= 0.0, "sweep: sigma must be >= 0");
  if (gamma) require(std::isfinite(*gamma) && *gamma > 0.0, "sweep: gamma must be > 0");
  for (int v : grid) {
    if (grid_kind == GridKind::Sparsity) {
      require(v >= 1 && v <= matrix.n, "sweep: sparsity grid values must lie in [1, n]");
    } else {
      require(v >= 1, "sweep: m grid values must be >= 1");
    }
  }
  if (grid_kind == GridKind::Measurements) {
    require(sparsity >= 1 && sparsity <= matrix.n, "sweep: sparsity must lie in [1, n]");
  }
  for (std::size_t i = 0; i < methods.size(); ++i) {
    require(!methods[i].label.empty(), "sweep: method labels must be non-empty");
    for (std::size_t k = 0; k < i; ++k) {
      require(methods[k].label != methods[i].label, "sweep: duplicate method label '" + methods[i].label + "'");
    }
    methods[i].admm.validate();
    methods[i].dca.validate();
  }
}

double SweepConfig::effective_gamma() const {
  if (gamma) return *gamma;
  if (sigma > 0.0) return std::min(100.0 / (sigma * sigma), 1e8);
  return 1e6;
}

SweepConfig sweep_config_from_json(const json& j) {
  if (!j.is_object()) field_error("config", "expected an object");
  static const std::set<std::string> known = {
      "matrix", "sparsity_grid", "m_grid", "sparsity", "sigma", "formulation", "gamma", "methods",
      "trials", "master_seed",   "output", "timing",   "plot"};
  for (const auto& [k, _] : j.items()) {
    if (!known.count(k)) field_error("config." + k, "unknown field");
  }
  SweepConfig c;
  try {
    if (!j.contains("matrix")) field_error("config.matrix", "missing");
    const json& mj = j.at("matrix");
    if (!mj.is_object()) field_error("config.matrix", "expected an object");
    for (const auto& [k, _] : mj.items()) {
      if (k != "kind" && k != "param" && k != "m" && k != "n" && k != "normalize_columns") {
        field_error("config.matrix." + k, "unknown field");
      }
    }
    try {
      c.matrix.kind = matrix_kind_from_string(mj.at("kind").get<std::string>());
    } catch (const std::exception& e) {
      field_error("config.matrix.kind", e.what());
    }
    c.matrix.param = mj.value("param", 0.0);
    c.matrix.m = mj.value("m", 64);
    c.matrix.n = mj.value("n", 1024);
    c.matrix.normalize_columns = mj.value("normalize_columns", false);

    const bool has_s = j.contains("sparsity_grid");
    const bool has_m = j.contains("m_grid");
    if (has_s == has_m) field_error("config", "exactly one of sparsity_grid and m_grid is required");
    if (has_s) {
      c.grid_kind = GridKind::Sparsity;
      c.grid = int_list(j.at("sparsity_grid"), "config.sparsity_grid");
    } else {
      c.grid_kind = GridKind::Measurements;
      c.grid = int_list(j.at("m_grid"), "config.m_grid");
      if (!j.contains("sparsity") || !j.at("sparsity").is_number_integer()) {
        field_error("config.sparsity", "an integer sparsity is required with m_grid");
      }
      c.sparsity = j.at("sparsity").get<int>();
    }
    if (j.contains("sigma")) {
      if (!j.at("sigma").is_number()) field_error("config.sigma", "expected a number");
      c.sigma = j.at("sigma").get<double>();
    }
    const std::string form = j.value("formulation", std::string("constrained"));
    if (form == "constrained") {
      c.mode = Mode::Constrained;
    } else if (form == "unconstrained") {
      c.mode = Mode::Unconstrained;
    } else {
      field_error("config.formulation", "expected constrained or unconstrained");
    }
    if (j.contains("gamma")) {
      if (!j.at("gamma").is_number()) field_error("config.gamma", "expected a number");
      c.gamma = j.at("gamma").get<double>();
    }
    if (!j.contains("methods") || !j.at("methods").is_array()) {
      field_error("config.methods", "expected a list of methods");
    }
    const json& ms = j.at("methods");
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const std::string w = "config.methods[" + std::to_string(i) + "]";
      const json& e = ms[i];
      if (!e.is_object()) field_error(w, "expected an object");
      for (const auto& [k, _] : e.items()) {
        if (k != "label" && k != "solver" && k != "g" && k != "config") field_error(w + "." + k, "unknown field");
      }
      MethodSpec m;
      m.solver = solver_from_string(e.value("solver", std::string("admm")), w + ".solver");
      if (!e.contains("g")) field_error(w + ".g", "missing");
      m.g = gspec_from_json(e.at("g"), w + ".g");
      if (e.contains("config")) {
        if (m.solver == SolverKind::Admm) {
          m.admm = solver_config_from_json(e.at("config"), w + ".config");
        } else {
          m.dca = dca_config_from_json(e.at("config"), w + ".config");
        }
      }
      m.label = e.value("label", solver_name(m.solver) + "-" + std::string(to_string(m.g.id())));
      c.methods.push_back(std::move(m));
    }
    if (j.contains("trials")) {
      if (!j.at("trials").is_number_integer()) field_error("config.trials", "expected an integer");
      c.trials = j.at("trials").get<int>();
    }
    if (j.contains("master_seed")) {
      if (!j.at("master_seed").is_number_unsigned()) {
        field_error("config.master_seed", "expected a non-negative integer");
      }
      c.master_seed = j.at("master_seed").get<std::uint64_t>();
    }
    c.output_path = j.value("output", std::string());
    c.timing = j.value("timing", false);
    c.plot = j.value("plot", false);
  } catch (const json::exception& e) {
    field_error("config", e.what());
  }
  try {
    c.validate();
  } catch (const PreconditionError& e) {
    field_error("config", e.what());
  }
  return c;
}

json to_json(const SweepConfig& c) {
  json j;
  j["matrix"] = {{"kind", to_string(c.matrix.kind)},
                 {"param", c.matrix.param},
                 {"m", c.matrix.m},
                 {"n", c.matrix.n},
                 {"normalize_columns", c.matrix.normalize_columns}};
  if (c.grid_kind == GridKind::Sparsity) {
    j["sparsity_grid"] = c.grid;
  } else {
    j["m_grid"] = c.grid;
    j["sparsity"] = c.sparsity;
  }
  j["sigma"] = c.sigma;
  j["formulation"] = c.mode == Mode::Constrained ? "constrained" : "unconstrained";
  if (c.gamma) j["gamma"] = *c.gamma;
  json ms = json::array();
  for (const auto& m : c.methods) {
    ms.push_back({{"label", m.label},
                  {"solver", solver_name(m.solver)},
                  {"g", to_json(m.g)},
                  {"config", m.solver == SolverKind::Admm ? to_json(m.admm) : to_json(m.dca)}});
  }
  j["methods"] = ms;
  j["trials"] = c.trials;
  j["master_seed"] = c.master_seed;
  if (!c.output_path.empty()) j["output"] = c.output_path;
  j["timing"] = c.timing;
  j["plot"] = c.plot;
  return j;
}

// ---------------------------------------------------------------------------

int default_thread_count() {
  if (const char* env = std::getenv("LL1_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// Every method of one (grid point, trial) task on a shared instance.
void run_task(const SweepConfig& config, std::size_t gi, int t, ExperimentRecord* out) {
  MatrixSpec spec = config.matrix;
  int s = config.grid[gi];
  if (config.grid_kind == GridKind::Measurements) {
    spec.m = config.grid[gi];
    s = config.sparsity;
  }
  const TrialSeed seed{config.master_seed,
                       static_cast<std::uint64_t>(gi) * static_cast<std::uint64_t>(config.trials) +
                           static_cast<std::uint64_t>(t)};
  const double gamma = config.mode == Mode::Unconstrained ? config.effective_gamma() : 0.0;

  std::optional<Instance> inst;
  std::string gen_error;
  try {
    inst = gen_instance(spec, s, config.sigma, seed);
  } catch (const std::exception& e) {
    gen_error = std::string("generation: ") + e.what();
  }
  std::optional<Problem> problem;
  if (inst) {
    problem = config.mode == Mode::Constrained ? Problem::constrained(inst->A, inst->b)
                                               : Problem::unconstrained(inst->A, inst->b, gamma);
    problem->ground_truth = inst->x_true;
  }
  std::map<double, std::shared_ptr<const PrecomputedOps>> cache;  // by rho, ADMM methods only

  for (std::size_t k = 0; k < config.methods.size(); ++k) {
    const MethodSpec& m = config.methods[k];
    ExperimentRecord& r = out[k];
    r.trial = t;
    r.seed = seed.id();
    r.method_label = m.label;
    r.g_id = std::string(to_string(m.g.id()));
    r.eta = m.solver == SolverKind::Admm ? m.admm.eta : m.dca.eta;
    r.rho = m.solver == SolverKind::Admm ? m.admm.rho : m.dca.rho;
    r.gamma = gamma;
    r.s = s;
    r.m = spec.m;
    r.n = spec.n;
    r.matrix_param = spec.param;
    r.rel_err = std::numeric_limits<double>::quiet_NaN();
    r.mse = std::numeric_limits<double>::quiet_NaN();
    if (!inst) {
      r.error = gen_error;
      continue;
    }
    try {
      SolveResult res;
      if (m.solver == SolverKind::Admm) {
        SolverConfig cfg = m.admm;
        cfg.record_traces = false;
        auto& pre = cache[cfg.rho];
        if (!pre) pre = std::make_shared<const PrecomputedOps>(*problem, cfg.rho);
        res = admm_solve(m.g, *problem, cfg, *pre);
      } else {
        DcaConfig cfg = m.dca;
        cfg.record_traces = false;
        res = dca_solve(m.g, *problem, cfg);
      }
      const Metrics met = metrics(res.x, inst->x_true);
      r.alpha0 = res.alpha0;
      r.rel_err = met.rel_err;
      r.mse = met.mse;
      r.success = met.success;
      r.iters = res.iterations;
      r.time_ms = config.timing ? res.time_ms : 0.0;
    } catch (const std::exception& e) {
      r.success = false;
      r.error = e.what();
    }
  }
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config, int threads) {
  config.validate();
  const std::size_t nm = config.methods.size();
  const std::size_t tasks = config.grid.size() * static_cast<std::size_t>(config.trials);
  SweepResult result;
  result.records.resize(tasks * nm);

  const int workers = std::max(1, std::min<int>(threads > 0 ? threads : default_thread_count(),
                                                 static_cast<int>(tasks)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < tasks; i = next++) {
      const std::size_t gi = i / static_cast<std::size_t>(config.trials);
      const int t = static_cast<int>(i % static_cast<std::size_t>(config.trials));
      run_task(config, gi, t, result.records.data() + i * nm);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  result.summary = summarize(result.records, config);
  return result;
}

std::vector<GroupSummary> summarize(const std::vector<ExperimentRecord>& records,
                                    const SweepConfig& config) {
  std::vector<GroupSummary> out;
  for (int gv : config.grid) {
    for (const auto& m : config.methods) {
      GroupSummary g;
      g.method_label = m.label;
      g.grid_value = gv;
      std::vector<double> mses, rels;
      for (const auto& r : records) {
        const int key = config.grid_kind == GridKind::Sparsity ? r.s : r.m;
        if (key != gv || r.method_label != m.label) continue;
        ++g.trials;
        g.successes += r.success ? 1 : 0;
        if (!r.error.empty()) {
          ++g.errors;
          continue;
        }
        mses.push_back(r.mse);
        rels.push_back(r.rel_err);
      }
      g.success_rate = g.trials ? static_cast<double>(g.successes) / g.trials : 0.0;
      double sum = 0.0;
      for (double v : mses) sum += v;
      g.mean_mse = mses.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / mses.size();
      g.median_mse = median(mses);
      g.median_rel_err = median(rels);
      out.push_back(g);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << "trial,seed,method_label,g_id,alpha0,eta,rho,gamma,s,m,n,matrix_param,rel_err,success,"
         "iters,time_ms,error\r\n";
  for (const auto& r : records) {
    out << r.trial << ',' << r.seed << ',' << csv_field(r.method_label) << ','
        << csv_field(r.g_id) << ',' << format_double(r.alpha0) << ',' << format_double(r.eta)
        << ',' << format_double(r.rho) << ',' << format_double(r.gamma) << ',' << r.s << ','
        << r.m << ',' << r.n << ',' << format_double(r.matrix_param) << ','
        << format_double(r.rel_err) << ',' << (r.success ? 1 : 0) << ',' << r.iters << ','
        << format_double(r.time_ms) << ',' << csv_field(r.error) << "\r\n";
  }
}

json summary_to_json(const SweepResult& result, const SweepConfig& config) {
  json groups = json::array();
  for (const auto& g : result.summary) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    groups.push_back({{"method", g.method_label},
                      {config.grid_kind == GridKind::Sparsity ? "s" : "m", g.grid_value},
                      {"trials", g.trials},
                      {"successes", g.successes},
                      {"errors", g.errors},
                      {"success_rate", g.success_rate},
                      {"mean_mse", num(g.mean_mse)},
                      {"median_mse", num(g.median_mse)},
                      {"median_rel_err", num(g.median_rel_err)}});
  }
  return json{{"config", to_json(config)}, {"rows", result.records.size()}, {"groups", groups}};
}

void write_svg(std::ostream& out, const SweepResult& result, const SweepConfig& config) {
  const bool rate = config.grid_kind == GridKind::Sparsity;
  const double W = 640, H = 420, L = 70, R = 170, T = 30, B = 50;
  const double gx0 = *std::min_element(config.grid.begin(), config.grid.end());
  double gx1 = *std::max_element(config.grid.begin(), config.grid.end());
  if (gx1 == gx0) gx1 = gx0 + 1;
  double y0 = 0.0, y1 = 1.0;
  if (!rate) {
    // log10 of the median MSE
    y0 = std::numeric_limits<double>::infinity();
    y1 = -y0;
    for (const auto& g : result.summary) {
      if (g.median_mse > 0 && std::isfinite(g.median_mse)) {
        y0 = std::min(y0, std::floor(std::log10(g.median_mse)));
        y1 = std::max(y1, std::ceil(std::log10(g.median_mse)));
      }
    }
    if (!std::isfinite(y0)) y0 = -1, y1 = 0;
    if (y1 == y0) y1 = y0 + 1;
  }
  auto px = [&](double x) { return L + (x - gx0) / (gx1 - gx0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";
  for (int v : config.grid) {
    out << "<text x=\"" << px(v) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << v
        << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double yv = y0 + (y1 - y0) * k / 4.0;
    std::ostringstream lab;
    if (rate) {
      lab << yv;
    } else {
      lab << "1e" << format_double(yv);
    }
    out << "<text x=\"" << L - 8 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
        << lab.str() << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
      << (rate ? "sparsity s" : "measurements m") << "</text>\n";
  out << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\" text-anchor=\"middle\">"
      << (rate ? "success rate" : "median MSE") << "</text>\n";
  for (std::size_t k = 0; k < config.methods.size(); ++k) {
    const char* col = colors[k % 6];
    std::ostringstream pts;
    for (const auto& g : result.summary) {
      if (g.method_label != config.methods[k].label) continue;
      const double yv = rate ? g.success_rate : std::log10(g.median_mse);
      if (!std::isfinite(yv)) continue;
      pts << px(g.grid_value) << ',' << py(yv) << ' ';
    }
    out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\""
        << pts.str() << "\"/>\n";
    const double ly = T + 20.0 * static_cast<double>(k);
    out << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30
        << "\" y2=\"" << ly << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << W - R + 36 << "\" y=\"" << ly + 4 << "\">" << config.methods[k].label
        << "</text>\n";
  }
  out << "</svg>\n";
}

void emit_outputs(const SweepResult& result, const SweepConfig& config, const std::string& dir) {
  require(!result.records.empty(), "emit_outputs: no records");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + (fs::path(dir) / name).string() + "'");
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, result.records);
  }
  {
    auto f = open("summary.json");
    f << summary_to_json(result, config).dump(2) << "\n";
  }
  if (config.plot) {
    auto f = open("curve.svg");
    write_svg(f, result, config);
  }
}

}  // namespace ll1
