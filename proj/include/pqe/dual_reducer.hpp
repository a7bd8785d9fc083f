#pragma once

#include <cstdint>
#include <span>

#include "pqe/ilp.hpp"
#include "pqe/query.hpp"

namespace pqe {

struct DualReducerConfig {
  int64_t q = 5000;  // initial sub-ILP size
  uint64_t seed = 0;
  double time_limit_s = kInf;          // whole-call budget
  double subilp_time_limit_s = kInf;   // per sub-ILP attempt
  double mip_gap = 1e-3;
  SolverOptions solver;
};

struct DrDiagnostics {
  double lp_mass = 0.0;  // E, the L1 norm of the relaxation solution
  int64_t x_support = 0;
  int64_t y_support = 0;
  int fallback_iterations = 0;
  int64_t final_subilp_size = 0;
  double lp_objective_internal = std::numeric_limits<double>::quiet_NaN();
  uint64_t seed = 0;
};

struct DualReducerResult {
  PackageSolution solution;
  DrDiagnostics diag;
};

// LP relaxation -> auxiliary LP with per-variable caps E/q -> sub-ILP over
// the union of both supports; on sub-ILP infeasibility, q doubles and the
// candidate set grows by uniform sampling until the full ILP is solved.
DualReducerResult dual_reducer(const NormalizedQuery& nq, const Relation& rel,
                               std::span<const int64_t> subset,
                               const DualReducerConfig& cfg);

// Benchmark comparison variant: the auxiliary-LP support is replaced by a
// uniform random draw of expected size q.
DualReducerResult dual_reducer_random_variant(const NormalizedQuery& nq,
                                              const Relation& rel,
                                              std::span<const int64_t> subset,
                                              const DualReducerConfig& cfg);

}  // namespace pqe
