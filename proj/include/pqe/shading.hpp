#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pqe/dual_reducer.hpp"
#include "pqe/hierarchy.hpp"
#include "pqe/query.hpp"

namespace pqe {

struct ShadingOptions {
  int64_t alpha = 100'000;
  SolverOptions solver;
  DualReducerConfig dr;
  // Benchmark variant: fill the candidate set with uniformly sampled tuples
  // instead of neighbor expansion.
  bool random_augment = false;
  uint64_t seed = 0;
  double time_limit_s = kInf;
};

struct LayerTrace {
  int layer = 0;
  int64_t candidates = 0;
  double lp_objective = 0.0;  // internal minimization orientation
  int64_t support = 0;
  int64_t expansions = 0;  // neighbor groups pulled in
};

struct ShadingStepResult {
  std::vector<int64_t> next;  // candidate tuple ids at layer l-1
  double lp_objective = 0.0;
  int64_t support = 0;
  int64_t expansions = 0;
  bool infeasible = false;
  bool out_of_time = false;
};

// Solve the layer-l LP over candidates s_l, take its positive support and
// expand it into layer l-1 (neighbor sampling or the random variant).
ShadingStepResult shading_step(const Hierarchy& h, int l, int64_t alpha,
                               std::span<const int64_t> s_l, const NormalizedQuery& nq,
                               const ShadingOptions& opts);

// Breadth-first box-probe expansion of the support groups; members of the
// support groups always precede neighbor members, and the result is cut to
// the first alpha tuples.
std::vector<int64_t> neighbor_sampling(const Hierarchy& h, int l, int64_t alpha,
                                       std::span<const int64_t> support_groups,
                                       int64_t* expansions = nullptr);

struct ShadingResult {
  PackageSolution solution;
  std::vector<LayerTrace> trace;
  int failed_layer = -1;  // layer whose LP was infeasible, when any
  DrDiagnostics dr;
};

ShadingResult progressive_shading(const Hierarchy& h, const NormalizedQuery& nq,
                                  const ShadingOptions& opts);

// Line-delimited trace rows for the bench harness.
std::string format_trace(const std::vector<LayerTrace>& trace);

}  // namespace pqe
