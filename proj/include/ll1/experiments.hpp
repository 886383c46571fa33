#pragma once

// Seeded benchmark sweeps: success rate over a sparsity grid or error over a
// measurement grid, several methods per instance, parallel across trials.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ll1/admm.hpp"
#include "ll1/dca.hpp"
#include "ll1/problems.hpp"
#include "ll1/serialize.hpp"

namespace ll1 {

enum class SolverKind { Admm, Dca };

struct MethodSpec {
  std::string label;
  SolverKind solver = SolverKind::Admm;
  GSpec g = GSpec::g1();
  SolverConfig admm;
  DcaConfig dca;
};

enum class GridKind { Sparsity, Measurements };

struct SweepConfig {
  MatrixSpec matrix;
  GridKind grid_kind = GridKind::Sparsity;
  std::vector<int> grid;  // s values, or m values
  int sparsity = 0;       // fixed s for a measurement grid
  double sigma = 0.0;
  Mode mode = Mode::Constrained;
  std::optional<double> gamma;  // unconstrained only; default from sigma
  std::vector<MethodSpec> methods;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string output_path;
  bool timing = false;  // false writes time_ms = 0 so outputs are byte-reproducible
  bool plot = false;

  void validate() const;
  /// gamma, or 100 / sigma^2 capped at 1e8 (1e6 when sigma = 0).
  double effective_gamma() const;
};

SweepConfig sweep_config_from_json(const json& j);
json to_json(const SweepConfig& c);

struct ExperimentRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string method_label;
  std::string g_id;
  double alpha0 = 0.0;
  double eta = 0.0;
  double rho = 0.0;
  double gamma = 0.0;
  int s = 0;
  int m = 0;
  int n = 0;
  double matrix_param = 0.0;
  double rel_err = 0.0;
  double mse = 0.0;  // summary only, not a CSV column
  bool success = false;
  int iters = 0;
  double time_ms = 0.0;
  std::string error;  // empty unless the solve threw
};

struct GroupSummary {
  std::string method_label;
  int grid_value = 0;  // s or m
  int trials = 0;
  int successes = 0;
  int errors = 0;
  double success_rate = 0.0;
  double mean_mse = 0.0;
  double median_mse = 0.0;
  double median_rel_err = 0.0;
};

struct SweepResult {
  std::vector<ExperimentRecord> records;  // ordered by (grid point, trial, method)
  std::vector<GroupSummary> summary;      // ordered by (grid point, method)
};

/// Worker count: LL1_THREADS if set (>= 1), else hardware concurrency.
int default_thread_count();

SweepResult run_sweep(const SweepConfig& config, int threads = 0);

std::vector<GroupSummary> summarize(const std::vector<ExperimentRecord>& records,
                                    const SweepConfig& config);

/// RFC-4180 CSV with the ExperimentRecord field names as header.
void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
json summary_to_json(const SweepResult& result, const SweepConfig& config);
/// Success rate (sparsity grid) or median MSE (measurement grid) per method.
void write_svg(std::ostream& out, const SweepResult& result, const SweepConfig& config);

/// Writes records.csv, summary.json and, if requested, curve.svg under `dir`.
void emit_outputs(const SweepResult& result, const SweepConfig& config, const std::string& dir);

}  // namespace ll1
