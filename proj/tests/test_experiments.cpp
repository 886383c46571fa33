#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ll1/error.hpp"
#include "ll1/experiments.hpp"

using namespace ll1;
namespace fs = std::filesystem;

namespace {

MethodSpec admm_method(const std::string& label, const GSpec& g) {
  MethodSpec m;
  m.label = label;
  m.g = g;
  m.admm.eps = 1e-8;
  m.admm.rho = 16;
  m.admm.alpha0_scale = 10;
  m.admm.record_traces = false;
  return m;
}

SweepConfig small_sweep() {
  SweepConfig c;
  c.matrix = MatrixSpec::gaussian(32, 96, 0.0);
  c.grid = {2, 6};
  c.methods = {admm_method("g1", GSpec::g1()), admm_method("l1", GSpec::const_zero())};
  c.trials = 4;
  c.master_seed = 61;
  return c;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream ss;
  write_records_csv(ss, r.records);
  return ss.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Sweep, LiftedBeatsL1OnGaussian) {
  SweepConfig c;
  c.matrix = MatrixSpec::gaussian(64, 256, 0.0);
  c.grid = {2, 6, 10};
  c.methods = {admm_method("admm-g1", GSpec::g1()), admm_method("admm-l1", GSpec::const_zero())};
  c.trials = 50;
  c.master_seed = 62;
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.summary.size(), 6u);
  for (std::size_t k = 0; k < r.summary.size(); k += 2) {
    ASSERT_EQ(r.summary[k].method_label, "admm-g1");
    ASSERT_EQ(r.summary[k + 1].method_label, "admm-l1");
    EXPECT_GE(r.summary[k].success_rate, r.summary[k + 1].success_rate) << "s=" << r.summary[k].grid_value;
  }
}

TEST(Sweep, DeterministicAcrossRunsAndThreadCounts) {
  const SweepConfig c = small_sweep();
  const std::string a = csv_of(run_sweep(c, 1));
  EXPECT_EQ(a, csv_of(run_sweep(c, 1)));
  EXPECT_EQ(a, csv_of(run_sweep(c, 3)));
  SweepConfig d = c;
  d.master_seed = 63;
  EXPECT_NE(a, csv_of(run_sweep(d, 1)));
}

TEST(Sweep, RowCountAndOrdering) {
  const SweepConfig c = small_sweep();
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.records.size(), c.grid.size() * c.trials * c.methods.size());
  std::size_t k = 0;
  for (int s : c.grid)
    for (int t = 0; t < c.trials; ++t)
      for (const auto& m : c.methods) {
        EXPECT_EQ(r.records[k].s, s);
        EXPECT_EQ(r.records[k].trial, t);
        EXPECT_EQ(r.records[k].method_label, m.label);
        EXPECT_EQ(r.records[k].success, r.records[k].rel_err <= 1e-2);
        ++k;
      }
}

TEST(Sweep, SummaryMatchesIndependentAggregation) {
  const SweepConfig c = small_sweep();
  const SweepResult r = run_sweep(c);
  std::map<std::pair<std::string, int>, std::pair<int, int>> agg;
  for (const auto& rec : r.records) {
    auto& [succ, tot] = agg[{rec.method_label, rec.s}];
    succ += rec.success;
    ++tot;
  }
  for (const auto& g : r.summary) {
    const auto [succ, tot] = agg.at({g.method_label, g.grid_value});
    EXPECT_EQ(g.successes, succ);
    EXPECT_EQ(g.trials, tot);
    EXPECT_EQ(g.success_rate, static_cast<double>(succ) / tot);
  }
}

TEST(Sweep, FailuresRecordedInRow) {
  // m > n makes A A^T singular, so every constrained solve fails to factorize.
  SweepConfig c = small_sweep();
  c.matrix = MatrixSpec::gaussian(12, 8, 0.0);
  c.grid = {2};
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.records.size(), c.trials * c.methods.size());
  for (const auto& rec : r.records) {
    EXPECT_FALSE(rec.success);
    EXPECT_FALSE(rec.error.empty());
  }
  for (const auto& g : r.summary) EXPECT_EQ(g.errors, c.trials);
}

TEST(Sweep, MeasurementGrid) {
  SweepConfig c;
  c.matrix = MatrixSpec::gaussian(50, 128, 0.0, true);
  c.grid_kind = GridKind::Measurements;
  c.grid = {30, 50};
  c.sparsity = 3;
  c.sigma = 1e-3;
  c.mode = Mode::Unconstrained;
  c.methods = {admm_method("g2", GSpec::g2())};
  c.trials = 3;
  const SweepResult r = run_sweep(c);
  ASSERT_EQ(r.records.size(), 6u);
  EXPECT_EQ(r.records[0].m, 30);
  EXPECT_EQ(r.records[5].m, 50);
  EXPECT_EQ(r.records[0].gamma, c.effective_gamma());
}

TEST(SweepConfigTest, Validation) {
  SweepConfig c = small_sweep();
  c.methods.clear();
  EXPECT_THROW(c.validate(), PreconditionError);
  c = small_sweep();
  c.trials = 0;
  EXPECT_THROW(c.validate(), PreconditionError);
  c = small_sweep();
  c.grid.clear();
  EXPECT_THROW(c.validate(), PreconditionError);
}

TEST(SweepConfigTest, EffectiveGamma) {
  SweepConfig c;
  c.sigma = 0.0;
  EXPECT_EQ(c.effective_gamma(), 1e6);
  c.sigma = 0.01;
  EXPECT_DOUBLE_EQ(c.effective_gamma(), 1e6);
  c.sigma = 1e-6;
  EXPECT_EQ(c.effective_gamma(), 1e8);
  c.gamma = 5.0;
  EXPECT_EQ(c.effective_gamma(), 5.0);
}

TEST(SweepConfigTest, JsonRoundTrip) {
  const SweepConfig c = small_sweep();
  const SweepConfig d = sweep_config_from_json(to_json(c));
  EXPECT_EQ(to_json(d), to_json(c));
}

TEST(SweepConfigTest, ErrorsNameTheField) {
  json j = to_json(small_sweep());
  j["methods"][1]["config"]["rhoo"] = 3;
  try {
    sweep_config_from_json(j);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("config.methods[1].config.rhoo"), std::string::npos) << e.what();
  }
  json k = to_json(small_sweep());
  k["trials"] = "many";
  try {
    sweep_config_from_json(k);
    FAIL();
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("config.trials"), std::string::npos) << e.what();
  }
}

TEST(SweepConfigTest, ShippedPresetsParse) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(LL1_CONFIG_DIR)) {
    if (e.path().extension() != ".json") continue;
    std::ifstream f(e.path());
    EXPECT_NO_THROW(sweep_config_from_json(json::parse(f)).validate()) << e.path();
    ++n;
  }
  EXPECT_GE(n, 6);
}

TEST(Outputs, CsvShape) {
  ExperimentRecord r;
  r.method_label = "a,\"b\"";
  r.g_id = "g1";
  std::ostringstream ss;
  write_records_csv(ss, {r});
  const std::string s = ss.str();
  EXPECT_EQ(s.substr(0, s.find("\r\n")),
            "trial,seed,method_label,g_id,alpha0,eta,rho,gamma,s,m,n,matrix_param,rel_err,success,iters,time_ms,error");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 2);
  EXPECT_NE(s.find(",\"a,\"\"b\"\"\",g1,"), std::string::npos) << s;
}

TEST(Outputs, FilesReproducible) {
  SweepConfig c = small_sweep();
  c.plot = true;
  const fs::path d1 = fs::temp_directory_path() / "ll1_out_a";
  const fs::path d2 = fs::temp_directory_path() / "ll1_out_b";
  fs::remove_all(d1);
  fs::remove_all(d2);
  emit_outputs(run_sweep(c), c, d1.string());
  emit_outputs(run_sweep(c), c, d2.string());
  for (const char* f : {"records.csv", "summary.json", "curve.svg"}) {
    ASSERT_TRUE(fs::exists(d1 / f)) << f;
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  }
  const json summary = json::parse(slurp(d1 / "summary.json"));
  for (const auto& g : summary["groups"])
    EXPECT_EQ(g["success_rate"].get<double>(), g["successes"].get<double>() / g["trials"].get<double>());
  EXPECT_NE(slurp(d1 / "curve.svg").find("<svg"), std::string::npos);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Outputs, UnwritablePath) {
  const SweepConfig c = small_sweep();
  EXPECT_ANY_THROW(emit_outputs(run_sweep(c), c, "/proc/ll1_no_such_dir/x"));
}
