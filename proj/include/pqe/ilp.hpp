#pragma once

#include <cstdint>

#include "pqe/dual_simplex.hpp"
#include "pqe/lp.hpp"

namespace pqe {

// Standard-form LP whose structural variables are all integral with finite
// bounds.
struct IlpInstance {
  StandardFormLP lp;
};

struct BnbLimits {
  double time_limit_s = kInf;
  int64_t max_nodes = -1;   // -1: unlimited
  double mip_gap = 1e-3;    // relative gap at which the search stops
};

struct BnbResult {
  SolveStatus status = SolveStatus::infeasible;
  Eigen::VectorXd x;  // structural, integral when status is optimal/feasible
  double objective = 0.0;  // internal minimization objective
  double root_lp_objective = std::numeric_limits<double>::quiet_NaN();
  int64_t nodes = 0;
  bool root_lp_infeasible = false;
};

// Best-bound node order, most-fractional branching, warm-started dual simplex
// per node. With feasibility_only the objective is dropped and the search
// stops at the first integral solution.
BnbResult branch_and_bound(const IlpInstance& ilp, const BnbLimits& limits = {},
                           const SolverOptions& solver_opts = {},
                           bool feasibility_only = false);

}  // namespace pqe
