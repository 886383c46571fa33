// ll1: instance generation, single solves, benchmark sweeps and self-checks.
//
// Exit status: 0 success, 1 invalid input or configuration, 2 internal failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "ll1/admm.hpp"
#include "ll1/dca.hpp"
#include "ll1/error.hpp"
#include "ll1/experiments.hpp"
#include "ll1/problems.hpp"
#include "ll1/serialize.hpp"
#include "ll1/verification.hpp"

namespace fs = std::filesystem;
using namespace ll1;

namespace {

struct InstanceOpts {
  std::string matrix = "gaussian";
  int m = 64;
  int n = 1024;
  double r = 0.0;
  double F = 1.0;
  bool normalize = false;
  int s = 6;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

void add_instance_opts(CLI::App* cmd, InstanceOpts& o) {
  cmd->add_option("--matrix", o.matrix, "gaussian or dct")->check(CLI::IsMember({"gaussian", "dct"}));
  cmd->add_option("--m", o.m, "measurements");
  cmd->add_option("--n", o.n, "signal length");
  cmd->add_option("--r", o.r, "Gaussian row correlation");
  cmd->add_option("--F", o.F, "DCT oversampling factor");
  cmd->add_flag("--normalize", o.normalize, "zero-mean, unit-norm columns");
  cmd->add_option("--s", o.s, "sparsity");
  cmd->add_option("--sigma", o.sigma, "measurement noise level");
  cmd->add_option("--seed", o.seed, "master seed");
}

Instance make_instance(const InstanceOpts& o) {
  MatrixSpec spec = o.matrix == "gaussian" ? MatrixSpec::gaussian(o.m, o.n, o.r, o.normalize)
                                           : MatrixSpec::dct(o.m, o.n, o.F, o.normalize);
  return gen_instance(spec, o.s, o.sigma, TrialSeed{o.seed, 0});
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw PreconditionError("cannot open '" + path + "'");
  return read_matrix_csv(f);
}

void write_matrix_file(const fs::path& path, const Mat& A, const std::string& kind,
                       std::uint64_t seed) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_matrix_csv(f, A, kind, seed);
}

/// "admm-g1", "dca-g2", "admm-l1", ...
std::pair<SolverKind, GSpec> parse_method(const std::string& method) {
  const auto dash = method.find('-');
  if (dash == std::string::npos) throw PreconditionError("--method: expected <solver>-<g>, got '" + method + "'");
  const std::string solver = method.substr(0, dash);
  std::string g = method.substr(dash + 1);
  SolverKind kind;
  if (solver == "admm") {
    kind = SolverKind::Admm;
  } else if (solver == "dca") {
    kind = SolverKind::Dca;
  } else {
    throw PreconditionError("--method: unknown solver '" + solver + "'");
  }
  if (g == "l1") g = "const_zero";
  return {kind, GSpec::make(gid_from_string(g), {})};
}

int cmd_gen(const InstanceOpts& o, const std::string& out) {
  const Instance inst = make_instance(o);
  fs::create_directories(out);
  write_matrix_file(fs::path(out) / "A.csv", inst.A, o.matrix, o.seed);
  write_matrix_file(fs::path(out) / "x.csv", inst.x_true, "signal", o.seed);
  write_matrix_file(fs::path(out) / "b.csv", inst.b, "measurements", o.seed);
  std::cout << "wrote " << (fs::path(out) / "A.csv").string() << ", x.csv, b.csv\n";
  return 0;
}

struct SolveOpts {
  std::string method = "admm-g1";
  std::string g_json;
  std::string a_path, b_path, x_path;
  std::string formulation = "constrained";
  std::optional<double> gamma;
  std::optional<double> rho, eta, eps, alpha0, alpha0_scale;
  std::optional<int> max_iter;
  bool include_x = false;
  bool traces = false;
};

int cmd_solve(const InstanceOpts& io, const SolveOpts& so) {
  auto [kind, g] = parse_method(so.method);
  if (!so.g_json.empty()) g = gspec_from_json(json::parse(so.g_json), "--g");

  Mat A;
  Vec b;
  std::optional<Vec> truth;
  if (!so.a_path.empty() || !so.b_path.empty()) {
    if (so.a_path.empty() || so.b_path.empty()) throw PreconditionError("--A and --b go together");
    A = read_matrix_file(so.a_path);
    const Mat bm = read_matrix_file(so.b_path);
    b = bm.col(0);
    if (!so.x_path.empty()) truth = Vec(read_matrix_file(so.x_path).col(0));
  } else {
    Instance inst = make_instance(io);
    A = std::move(inst.A);
    b = std::move(inst.b);
    truth = std::move(inst.x_true);
  }

  Problem p;
  if (so.formulation == "constrained") {
    p = Problem::constrained(A, b);
  } else {
    double gamma = so.gamma.value_or(io.sigma > 0 ? std::min(100.0 / (io.sigma * io.sigma), 1e8) : 1e6);
    p = Problem::unconstrained(A, b, gamma);
  }
  p.ground_truth = truth;

  SolveResult r;
  if (kind == SolverKind::Admm) {
    SolverConfig c;
    c.eps = 1e-8;
    if (so.rho) c.rho = *so.rho;
    if (so.eta) c.eta = *so.eta;
    if (so.eps) c.eps = *so.eps;
    if (so.alpha0) c.alpha0 = *so.alpha0;
    if (so.alpha0_scale) c.alpha0_scale = *so.alpha0_scale;
    if (so.max_iter) c.max_iter = *so.max_iter;
    c.record_traces = so.traces;
    r = admm_solve(g, p, c);
  } else {
    DcaConfig c;
    if (so.rho) c.rho = *so.rho;
    if (so.eta) c.eta = *so.eta;
    if (so.eps) c.inner_tol = *so.eps;
    if (so.alpha0) c.alpha0 = *so.alpha0;
    if (so.alpha0_scale) c.alpha0_scale = *so.alpha0_scale;
    if (so.max_iter) c.sub_max_iter = *so.max_iter;
    c.record_traces = so.traces;
    r = dca_solve(g, p, c);
  }
  json j = to_json(r, so.include_x, so.traces);
  j["g"] = to_json(g);
  if (truth) j["success"] = metrics(r.x, *truth).success;
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct SweepOpts {
  std::string config;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string output;
  int threads = 0;
  bool plot = false;
  bool timing = false;
};

int cmd_sweep(const SweepOpts& o) {
  std::ifstream f(o.config);
  if (!f) throw PreconditionError("--config: cannot open '" + o.config + "'");
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    throw PreconditionError("--config: " + std::string(e.what()));
  }
  SweepConfig c = sweep_config_from_json(j);
  if (o.trials) c.trials = *o.trials;
  if (o.seed) c.master_seed = *o.seed;
  if (!o.output.empty()) c.output_path = o.output;
  if (o.plot) c.plot = true;
  if (o.timing) c.timing = true;
  c.validate();
  if (c.output_path.empty()) throw PreconditionError("config.output: an output directory is required");

  const SweepResult res = run_sweep(c, o.threads);
  emit_outputs(res, c, c.output_path);

  std::cout << std::left << std::setw(24) << "method" << std::setw(8)
            << (c.grid_kind == GridKind::Sparsity ? "s" : "m") << std::setw(10) << "success"
            << std::setw(14) << "median_mse" << "errors\n";
  for (const auto& g : res.summary) {
    std::cout << std::setw(24) << g.method_label << std::setw(8) << g.grid_value << std::setw(10)
              << g.success_rate << std::setw(14) << g.median_mse << g.errors << "\n";
  }
  std::cout << "wrote " << (fs::path(c.output_path) / "records.csv").string() << "\n";
  return 0;
}

int cmd_verify(std::uint64_t seed) {
  const auto rows = run_verification_suite(seed);
  bool all = true;
  for (const auto& r : rows) {
    std::cout << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(44) << r.name
              << r.detail << "\n";
    all = all && r.passed;
  }
  std::cout << (all ? "all checks passed\n" : "some checks FAILED\n");
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifted-l1 sparse recovery toolkit"};
  app.require_subcommand(1);

  InstanceOpts gen_o;
  std::string gen_out = "instance";
  auto* gen = app.add_subcommand("gen", "generate a problem instance (A.csv, x.csv, b.csv)");
  add_instance_opts(gen, gen_o);
  gen->add_option("--out", gen_out, "output directory");

  InstanceOpts solve_io;
  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "solve one instance and print the result as JSON");
  add_instance_opts(solve, solve_io);
  solve->add_option("--method", so.method, "admm-g1, admm-g2, admm-l1, dca-g1, ...");
  solve->add_option("--g", so.g_json, "lifting function as JSON, overrides the method's g");
  solve->add_option("--A", so.a_path, "matrix CSV (instead of generating)");
  solve->add_option("--b", so.b_path, "measurement CSV");
  solve->add_option("--x", so.x_path, "ground-truth CSV");
  solve->add_option("--formulation", so.formulation)->check(CLI::IsMember({"constrained", "unconstrained"}));
  solve->add_option("--gamma", so.gamma);
  solve->add_option("--rho", so.rho);
  solve->add_option("--eta", so.eta);
  solve->add_option("--eps", so.eps, "stopping tolerance (default 1e-8)");
  solve->add_option("--alpha0", so.alpha0);
  solve->add_option("--alpha0-scale", so.alpha0_scale);
  solve->add_option("--max-iter", so.max_iter);
  solve->add_flag("--include-x", so.include_x);
  solve->add_flag("--traces", so.traces);

  SweepOpts sw;
  auto* sweep = app.add_subcommand("sweep", "run a benchmark sweep from a JSON config");
  sweep->add_option("--config", sw.config, "sweep configuration file")->required();
  sweep->add_option("--trials", sw.trials);
  sweep->add_option("--seed", sw.seed, "master seed");
  sweep->add_option("--output", sw.output, "output directory");
  sweep->add_option("--threads", sw.threads, "worker threads (default LL1_THREADS or all cores)");
  sweep->add_flag("--plot", sw.plot, "also write curve.svg");
  sweep->add_flag("--timing", sw.timing, "record wall time per solve");

  std::uint64_t verify_seed = 20240521;
  auto* verify = app.add_subcommand("verify", "run the built-in verification checks");
  verify->add_option("--seed", verify_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) return cmd_gen(gen_o, gen_out);
    if (*solve) return cmd_solve(solve_io, so);
    if (*sweep) return cmd_sweep(sw);
    if (*verify) return cmd_verify(verify_seed);
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
