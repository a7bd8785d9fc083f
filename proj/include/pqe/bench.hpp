#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pqe/datagen.hpp"
#include "pqe/hardness.hpp"
#include "pqe/query.hpp"

namespace pqe {

enum class BenchMethod {
  progressive_shading,
  dual_reducer_only,
  exact,              // branch and bound on the full ILP
  exact_feasibility,  // objective stripped: ground-truth solvability
  shading_random_augment,
  dual_reducer_random,
};

const char* to_string(BenchMethod m);
std::optional<BenchMethod> bench_method_from_string(const std::string& s);

struct SuiteConfig {
  std::vector<std::string> datasets = {"sdss"};  // sdss | tpch
  std::vector<double> hardness = {1.0};
  std::vector<uint64_t> seeds = {1};
  int64_t n = 100'000;
  std::vector<BenchMethod> methods = {BenchMethod::progressive_shading,
                                      BenchMethod::exact};
  double time_limit_s = 300.0;  // per query and method
  int64_t alpha = 100'000;
  double df = 100.0;
  int64_t q = 5000;
  int threads = 1;
  uint64_t master_seed = 0;
  double correlation = 0.0;
  bool trace = false;
};

struct BenchRow {
  std::string dataset;
  double hardness = 0.0;
  uint64_t seed = 0;
  std::string method;
  SolveStatus status = SolveStatus::infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double lp_bound = std::numeric_limits<double>::quiet_NaN();  // full-relation LP
  GapResult gap;
  int fallbacks = 0;
  int64_t package_size = 0;
  double wall_s = 0.0;
  std::string trace;

  bool solved() const {
    return status == SolveStatus::optimal || status == SolveStatus::feasible;
  }
};

struct BenchResult {
  std::vector<BenchRow> rows;
};

BenchResult run_suite(const SuiteConfig& cfg);

// Deterministic result table (no wall-clock column) and the separate timings
// table; plus a machine-readable summary.
std::string results_table(const BenchResult& res);
std::string timings_table(const BenchResult& res);
std::string summary_json(const SuiteConfig& cfg, const BenchResult& res);

SuiteConfig suite_config_from_json(const std::string& text);
std::string suite_config_to_json(const SuiteConfig& cfg);

}  // namespace pqe
