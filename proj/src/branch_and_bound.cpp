#include "pqe/ilp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <vector>

namespace pqe {

namespace {

struct Node {
  double bound;
  int depth;
  int64_t id;
  // Cumulative variable-bound tightenings along the path from the root.
  std::vector<std::pair<int64_t, std::pair<double, double>>> overrides;
  // Warm-start basis: the parent's final basis.
  std::vector<int64_t> basic;
  std::vector<VarStatus> status;
};

// Best bound first; on bound plateaus (common when many objective
// coefficients are zero) dive depth-first so incumbents appear early.
struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min bound on top
    if (a.depth != b.depth) return a.depth < b.depth;  // deepest on top
    return a.id > b.id;  // then the nearest-side child, which was pushed first
  }
};

// Rounded candidate must satisfy the row bounds directly; the LP tolerance
// alone does not survive rounding when coefficients are large.
bool rounded_feasible(const StandardFormLP& lp, const Eigen::VectorXd& xr) {
  constexpr double tol = 1e-6;
  for (int i = 0; i < lp.m; ++i) {
    double act = -lp.structural.row(i).dot(xr);  // structural block is -R
    const double lo = lp.lower(lp.n + i), hi = lp.upper(lp.n + i);
    if (act < lo - tol || act > hi + tol) return false;
  }
  for (int64_t j = 0; j < lp.n; ++j)
    if (xr(j) < lp.lower(j) - tol || xr(j) > lp.upper(j) + tol) return false;
  return true;
}

}  // namespace

BnbResult branch_and_bound(const IlpInstance& ilp, const BnbLimits& limits,
                           const SolverOptions& solver_opts, bool feasibility_only) {
  BnbResult res;
  const StandardFormLP* lp = &ilp.lp;
  StandardFormLP stripped;
  if (feasibility_only) {
    stripped = ilp.lp;
    stripped.cost.setZero();
    lp = &stripped;
  }

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  DualSimplex solver(*lp, solver_opts);
  SolverLimits lp_limits;
  lp_limits.time_limit_s = limits.time_limit_s;

  LpSolution root = solver.solve(lp_limits);
  res.root_lp_objective = root.objective;
  if (root.status == LpStatus::infeasible) {
    res.status = SolveStatus::infeasible;
    res.root_lp_infeasible = true;
    return res;
  }
  if (root.status == LpStatus::iteration_limit) {
    res.status = SolveStatus::timeout;
    return res;
  }

  bool have_incumbent = false;
  Eigen::VectorXd best_x;
  double best_obj = kInf;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  int64_t next_id = 0;
  open.push({root.objective, 0, next_id++, {}, solver.state().basic, solver.state().status});

  bool out_of_budget = false;
  while (!open.empty()) {
    if (elapsed() > limits.time_limit_s ||
        (limits.max_nodes > 0 && res.nodes >= limits.max_nodes)) {
      out_of_budget = true;
      break;
    }
    const double global_lb = open.top().bound;
    if (have_incumbent &&
        best_obj - global_lb <= limits.mip_gap * std::max(1.0, std::abs(best_obj)))
      break;

    Node node = open.top();
    open.pop();
    if (have_incumbent &&
        node.bound >= best_obj - limits.mip_gap * std::max(1.0, std::abs(best_obj)))
      continue;

    ++res.nodes;
    solver.reset_bounds();
    for (auto& [j, b] : node.overrides) solver.set_var_bounds(j, b.first, b.second);
    SolverLimits node_limits;
    node_limits.time_limit_s = std::max(0.0, limits.time_limit_s - elapsed());
    LpSolution sol = (res.nodes == 1 && node.overrides.empty())
                         ? std::move(root)
                         : solver.solve_warm(node.basic, node.status, node_limits);
    if (sol.status == LpStatus::infeasible) continue;
    if (sol.status == LpStatus::iteration_limit) {
      out_of_budget = true;
      break;
    }
    if (have_incumbent &&
        sol.objective >= best_obj - limits.mip_gap * std::max(1.0, std::abs(best_obj)))
      continue;

    // Most-fractional structural variable.
    int64_t frac_var = -1;
    double worst_frac = 1e-6;
    for (int64_t j = 0; j < lp->n; ++j) {
      const double f = std::abs(sol.x(j) - std::round(sol.x(j)));
      if (f > worst_frac) {
        worst_frac = f;
        frac_var = j;
      }
    }

    if (frac_var < 0) {
      Eigen::VectorXd xr = sol.x.unaryExpr([](double v) { return std::round(v); });
      if (rounded_feasible(*lp, xr)) {
        const double obj = lp->cost.head(lp->n).dot(xr);
        if (!have_incumbent || obj < best_obj) {
          have_incumbent = true;
          best_obj = obj;
          best_x = std::move(xr);
          if (feasibility_only) break;
        }
        continue;
      }
      // Rounding broke a row: branch on the largest sub-tolerance fraction.
      worst_frac = 0.0;
      for (int64_t j = 0; j < lp->n; ++j) {
        const double f = std::abs(sol.x(j) - std::round(sol.x(j)));
        if (f > worst_frac) {
          worst_frac = f;
          frac_var = j;
        }
      }
      if (frac_var < 0) continue;  // exactly integral yet infeasible: a dead end
    }

    const double xv = sol.x(frac_var);
    const double lo = solver.var_lower(frac_var), hi = solver.var_upper(frac_var);
    const double down = std::floor(xv), up = std::floor(xv) + 1.0;

    auto make_child = [&](double clo, double chi) {
      if (clo > chi) return;
      Node child;
      child.bound = sol.objective;
      child.depth = node.depth + 1;
      child.id = next_id++;
      child.overrides = node.overrides;
      bool merged = false;
      for (auto& [j, b] : child.overrides) {
        if (j == frac_var) {
          b.first = std::max(b.first, clo);
          b.second = std::min(b.second, chi);
          merged = true;
          break;
        }
      }
      if (!merged) child.overrides.emplace_back(frac_var, std::make_pair(clo, chi));
      child.basic = solver.state().basic;
      child.status = solver.state().status;
      open.push(std::move(child));
    };
    // Nearest side first gets the smaller node id.
    if (xv - down <= up - xv) {
      make_child(lo, down);
      make_child(up, hi);
    } else {
      make_child(up, hi);
      make_child(lo, down);
    }
  }

  if (have_incumbent) {
    res.x = best_x;
    res.objective = best_obj;
    res.status = out_of_budget ? SolveStatus::feasible : SolveStatus::optimal;
    if (feasibility_only) res.status = SolveStatus::feasible;
  } else {
    res.status = out_of_budget ? SolveStatus::timeout : SolveStatus::infeasible;
  }
  return res;
}

}  // namespace pqe
