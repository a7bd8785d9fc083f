#include "pqe/dual_reducer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace pqe {

namespace {

constexpr double kSupportTol = 1e-9;

struct Clock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double budget;
  explicit Clock(double b) : budget(b) {}
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  double remaining() const { return budget - elapsed(); }
  bool expired() const { return elapsed() > budget; }
};

// Solves the ILP restricted to the positions in `chosen` (indices into
// `subset`) and maps an integral solution back to tuple multiplicities.
BnbResult solve_subilp(const NormalizedQuery& nq, const Relation& rel,
                       std::span<const int64_t> subset, const std::vector<int64_t>& chosen,
                       const DualReducerConfig& cfg, double time_left) {
  std::vector<int64_t> ids(chosen.size());
  for (size_t i = 0; i < chosen.size(); ++i) ids[i] = subset[chosen[i]];
  IlpInstance inst{to_standard_form(make_dense_lp(nq, rel, ids))};
  BnbLimits limits;
  limits.mip_gap = cfg.mip_gap;
  limits.time_limit_s = std::min(cfg.subilp_time_limit_s, std::max(0.0, time_left));
  return branch_and_bound(inst, limits, cfg.solver);
}

DualReducerResult run(const NormalizedQuery& nq, const Relation& rel,
                      std::span<const int64_t> subset, const DualReducerConfig& cfg,
                      bool random_variant) {
  DualReducerResult out;
  out.diag.seed = cfg.seed;
  const int64_t n = static_cast<int64_t>(subset.size());
  Clock clock(cfg.time_limit_s);

  DenseLp dense = make_dense_lp(nq, rel, subset);
  StandardFormLP sf = to_standard_form(dense);

  SolverLimits lp_limits;
  lp_limits.time_limit_s = clock.remaining();
  LpSolution relax = dual_simplex_solve(sf, lp_limits, cfg.solver);
  out.diag.lp_objective_internal = relax.objective;
  if (relax.status == LpStatus::infeasible) {
    out.solution.status = SolveStatus::infeasible;
    return out;
  }
  if (relax.status == LpStatus::iteration_limit) {
    out.solution.status = SolveStatus::timeout;
    return out;
  }
  out.solution.lp_bound = nq.report_objective(relax.objective);

  const double lp_mass = relax.x.sum();
  out.diag.lp_mass = lp_mass;

  std::vector<char> in_set(n, 0);
  std::vector<int64_t> chosen;
  for (int64_t j = 0; j < n; ++j)
    if (relax.x(j) > kSupportTol) {
      in_set[j] = 1;
      chosen.push_back(j);
    }
  out.diag.x_support = static_cast<int64_t>(chosen.size());

  int64_t q = std::max<int64_t>(1, cfg.q);

  if (!random_variant) {
    // Auxiliary LP: capping every variable at E/q spreads the relaxation
    // mass over ~q positive entries.
    const double cap = lp_mass / static_cast<double>(q);
    DenseLp aux = dense;
    for (int64_t j = 0; j < aux.n(); ++j) aux.upper(j) = std::min(aux.upper(j), cap);
    SolverLimits aux_limits;
    aux_limits.time_limit_s = clock.remaining();
    LpSolution spread = dual_simplex_solve(to_standard_form(aux), aux_limits, cfg.solver);
    if (spread.status == LpStatus::optimal) {
      for (int64_t j = 0; j < n; ++j)
        if (spread.x(j) > kSupportTol && !in_set[j]) {
          in_set[j] = 1;
          chosen.push_back(j);
          ++out.diag.y_support;
        }
    }
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double p = static_cast<double>(q) / static_cast<double>(n);
    for (int64_t j = 0; j < n; ++j)
      if (unit(rng) < p && !in_set[j]) {
        in_set[j] = 1;
        chosen.push_back(j);
        ++out.diag.y_support;
      }
  }
  std::sort(chosen.begin(), chosen.end());

  std::mt19937_64 fallback_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  while (true) {
    out.diag.final_subilp_size = static_cast<int64_t>(chosen.size());
    BnbResult sub = solve_subilp(nq, rel, subset, chosen, cfg, clock.remaining());
    if (sub.status == SolveStatus::optimal || sub.status == SolveStatus::feasible) {
      PackageSolution& sol = out.solution;
      sol.status = sub.status;
      double internal = 0.0;
      for (int64_t i = 0; i < static_cast<int64_t>(chosen.size()); ++i) {
        const int64_t mult = std::llround(sub.x(i));
        if (mult > 0) sol.multiplicities[subset[chosen[i]]] = mult;
      }
      internal = sub.objective;
      sol.objective = nq.report_objective(internal);
      sol.fallback_iterations = out.diag.fallback_iterations;
      return out;
    }
    if (sub.status == SolveStatus::timeout || clock.expired()) {
      out.solution.status = SolveStatus::timeout;
      out.solution.fallback_iterations = out.diag.fallback_iterations;
      return out;
    }
    // Sub-ILP infeasible: double q, sample unseen tuples up to the new size.
    if (q >= n) {
      out.solution.status = SolveStatus::infeasible;
      out.solution.fallback_iterations = out.diag.fallback_iterations;
      return out;
    }
    q = std::min(2 * q, n);
    ++out.diag.fallback_iterations;
    const int64_t need = q - static_cast<int64_t>(chosen.size());
    if (need > 0) {
      std::vector<int64_t> pool;
      pool.reserve(n - chosen.size());
      for (int64_t j = 0; j < n; ++j)
        if (!in_set[j]) pool.push_back(j);
      for (int64_t i = 0; i < need && !pool.empty(); ++i) {
        std::uniform_int_distribution<int64_t> pick(0, static_cast<int64_t>(pool.size()) - 1);
        const int64_t at = pick(fallback_rng);
        const int64_t j = pool[at];
        pool[at] = pool.back();
        pool.pop_back();
        in_set[j] = 1;
        chosen.push_back(j);
      }
      std::sort(chosen.begin(), chosen.end());
    }
  }
}

}  // namespace

DualReducerResult dual_reducer(const NormalizedQuery& nq, const Relation& rel,
                               std::span<const int64_t> subset,
                               const DualReducerConfig& cfg) {
  return run(nq, rel, subset, cfg, false);
}

DualReducerResult dual_reducer_random_variant(const NormalizedQuery& nq,
                                              const Relation& rel,
                                              std::span<const int64_t> subset,
                                              const DualReducerConfig& cfg) {
  return run(nq, rel, subset, cfg, true);
}

}  // namespace pqe
