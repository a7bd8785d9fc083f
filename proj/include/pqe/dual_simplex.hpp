#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "pqe/bfrt.hpp"
#include "pqe/lp.hpp"

namespace pqe {

enum class VarStatus : uint8_t { basic, at_lower, at_upper };

// Working state of the bounded dual simplex: basic index list, nonbasic
// statuses, the explicit m x m basis inverse, current values and reduced
// costs. Dual feasibility (status/sign rule on d) holds at every iteration.
struct BasisState {
  std::vector<int64_t> basic;
  std::vector<VarStatus> status;
  Eigen::MatrixXd binv;
  Eigen::VectorXd x;
  Eigen::VectorXd d;
};

enum class LpStatus { optimal, infeasible, iteration_limit };

const char* to_string(LpStatus s);

struct LpSolution {
  Eigen::VectorXd x;  // structural variables only
  double objective = 0.0;
  LpStatus status = LpStatus::iteration_limit;
  int64_t iterations = 0;
  int64_t long_steps = 0;  // iterations that flipped at least one bound
  // Diagnostics
  int64_t support_size = 0;  // |{i : x_i > 1e-9}| over structural variables
  double l1_norm = 0.0;
  double min_upper = kInf;   // smallest structural upper bound
  // Infeasibility certificate y: max over the box of (y'A)x is negative,
  // while Ax = 0 must hold for any feasible x.
  Eigen::VectorXd farkas_ray;
};

struct SolverOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-8;
  int threads = 1;
  int64_t parallel_threshold = 50000;  // engage parallel paths at this n
  std::optional<BfrtVariant> forced_bfrt;
  int refactor_interval = 200;
  double condition_limit = 1e12;
  bool paranoid_checks = false;  // per-iteration dual feasibility scan
};

struct SolverLimits {
  int64_t max_iterations = -1;  // -1: derived from problem size
  double time_limit_s = kInf;
};

class DualSimplex {
public:
  explicit DualSimplex(const StandardFormLP& lp, SolverOptions opts = {});

  // Bound edits for warm-started re-solves (branch and bound, bound caps).
  void set_var_bounds(int64_t j, double lo, double hi);
  void reset_bounds();
  double var_lower(int64_t j) const { return lower_(j); }
  double var_upper(int64_t j) const { return upper_(j); }

  // Solves from the slack basis.
  LpSolution solve(const SolverLimits& limits = {});
  // Warm start from a previously returned basis (statuses sized n+m).
  LpSolution solve_warm(const std::vector<int64_t>& basic,
                        const std::vector<VarStatus>& status,
                        const SolverLimits& limits = {});

  const BasisState& state() const { return state_; }

private:
  LpSolution run(const SolverLimits& limits);
  void install_slack_basis();
  void refactorize();
  void recompute_x();
  void recompute_d();
  double condition_estimate() const;
  void perturb_costs();
  bool unperturb_and_repair();
  LpSolution finish(LpStatus status);

  const StandardFormLP& lp_;
  SolverOptions opts_;
  Eigen::VectorXd lower_, upper_;
  Eigen::VectorXd cost_;  // possibly perturbed working copy
  bool perturbed_ = false;
  int perturb_rounds_ = 0;
  BasisState state_;
  int64_t iterations_ = 0;
  int64_t long_steps_ = 0;
  int pivots_since_refactor_ = 0;
  Eigen::VectorXd farkas_;
};

// Slack basis with structural variables set by cost sign; dual-feasible by
// construction since the reduced cost equals the cost vector.
BasisState initial_dual_feasible_basis(const StandardFormLP& lp);

// Solve A_B p = q (ftran) and A_B' p = q (btran) via the explicit inverse.
Eigen::VectorXd ftran(const BasisState& state, const Eigen::VectorXd& q);
Eigen::VectorXd btran(const BasisState& state, const Eigen::VectorXd& q);

// A' rho over every column (structural block and slacks). Deterministic for
// any thread count: each entry is an independently accumulated dot product.
Eigen::VectorXd pivot_pricing(const StandardFormLP& lp, const Eigen::VectorXd& rho,
                              int threads);

LpSolution dual_simplex_solve(const StandardFormLP& lp, const SolverLimits& limits = {},
                              const SolverOptions& opts = {});

// Process-wide instrumentation used by the test suites: records, for every
// optimal solve, whether the positive-support bound |supp| <= ceil(m + |x|_1)
// held. LPs with some upper bound below 1 shrink supports by design and are
// tallied separately.
struct SupportBoundStats {
  std::atomic<int64_t> solves{0};
  std::atomic<int64_t> checked{0};     // solves with all structural u_i >= 1
  std::atomic<int64_t> violations{0};  // among checked
};
SupportBoundStats& support_bound_stats();

}  // namespace pqe
