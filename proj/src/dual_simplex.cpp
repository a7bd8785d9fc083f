#include "pqe/dual_simplex.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <stdexcept>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace pqe {

namespace {

double splitmix_unit(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x = x ^ (x >> 31);
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::iteration_limit: return "iteration_limit";
  }
  return "?";
}

SupportBoundStats& support_bound_stats() {
  static SupportBoundStats stats;
  return stats;
}

BasisState initial_dual_feasible_basis(const StandardFormLP& lp) {
  BasisState st;
  const int64_t total = lp.total();
  st.basic.resize(lp.m);
  st.status.assign(total, VarStatus::at_lower);
  for (int i = 0; i < lp.m; ++i) {
    st.basic[i] = lp.n + i;
    st.status[lp.n + i] = VarStatus::basic;
  }
  st.binv = Eigen::MatrixXd::Identity(lp.m, lp.m);
  st.d = lp.cost;
  st.x = Eigen::VectorXd::Zero(total);
  for (int64_t j = 0; j < lp.n; ++j) {
    st.status[j] = lp.cost(j) >= 0.0 ? VarStatus::at_lower : VarStatus::at_upper;
    st.x(j) = st.status[j] == VarStatus::at_lower ? lp.lower(j) : lp.upper(j);
  }
  // x_B = -A_B^{-1} A_N x_N; with the slack basis A_B = I and the structural
  // block of A equal to -R, so the slack values are the row activities R x.
  Eigen::VectorXd v = Eigen::VectorXd::Zero(lp.m);
  for (int64_t j = 0; j < lp.n; ++j)
    if (st.x(j) != 0.0) lp.col_axpy(j, st.x(j), v);
  Eigen::VectorXd xb = -(st.binv * v);
  for (int i = 0; i < lp.m; ++i) st.x(lp.n + i) = xb(i);
  return st;
}

Eigen::VectorXd ftran(const BasisState& state, const Eigen::VectorXd& q) {
  return state.binv * q;
}

Eigen::VectorXd btran(const BasisState& state, const Eigen::VectorXd& q) {
  return state.binv.transpose() * q;
}

Eigen::VectorXd pivot_pricing(const StandardFormLP& lp, const Eigen::VectorXd& rho,
                              int threads) {
  Eigen::VectorXd alpha(lp.total());
#if defined(_OPENMP)
  if (threads > 1 && lp.n >= 4096) {
    omp_set_num_threads(threads);
#pragma omp parallel for schedule(static)
    for (int64_t j = 0; j < lp.n; ++j) alpha(j) = lp.structural.col(j).dot(rho);
  } else {
    alpha.head(lp.n) = lp.structural.transpose() * rho;
  }
#else
  (void)threads;
  alpha.head(lp.n) = lp.structural.transpose() * rho;
#endif
  alpha.tail(lp.m) = rho;
  return alpha;
}

DualSimplex::DualSimplex(const StandardFormLP& lp, SolverOptions opts)
    : lp_(lp), opts_(opts), lower_(lp.lower), upper_(lp.upper), cost_(lp.cost) {}

void DualSimplex::set_var_bounds(int64_t j, double lo, double hi) {
  lower_(j) = lo;
  upper_(j) = hi;
}

void DualSimplex::reset_bounds() {
  lower_ = lp_.lower;
  upper_ = lp_.upper;
}

void DualSimplex::install_slack_basis() {
  state_.basic.resize(lp_.m);
  state_.status.assign(lp_.total(), VarStatus::at_lower);
  for (int i = 0; i < lp_.m; ++i) {
    state_.basic[i] = lp_.n + i;
    state_.status[lp_.n + i] = VarStatus::basic;
  }
  for (int64_t j = 0; j < lp_.n; ++j)
    state_.status[j] = cost_(j) >= 0.0 ? VarStatus::at_lower : VarStatus::at_upper;
  refactorize();
}

void DualSimplex::refactorize() {
  const int m = lp_.m;
  if (m == 0) {
    state_.binv.resize(0, 0);
    recompute_x();
    recompute_d();
    pivots_since_refactor_ = 0;
    return;
  }
  Eigen::MatrixXd ab(m, m);
  for (int r = 0; r < m; ++r) {
    const int64_t j = state_.basic[r];
    if (j < lp_.n)
      ab.col(r) = lp_.structural.col(j);
    else {
      ab.col(r).setZero();
      ab(j - lp_.n, r) = 1.0;
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ab);
  if (!lu.isInvertible())
    throw std::runtime_error("dual simplex: singular basis at refactorization");
  state_.binv = lu.inverse();
  recompute_x();
  recompute_d();
  pivots_since_refactor_ = 0;
}

void DualSimplex::recompute_x() {
  state_.x.resize(lp_.total());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(lp_.m);
  for (int64_t j = 0; j < lp_.total(); ++j) {
    if (state_.status[j] == VarStatus::basic) continue;
    const double xj = state_.status[j] == VarStatus::at_lower ? lower_(j) : upper_(j);
    state_.x(j) = xj;
    if (xj != 0.0) lp_.col_axpy(j, xj, v);
  }
  Eigen::VectorXd xb = -(state_.binv * v);
  for (int i = 0; i < lp_.m; ++i) state_.x(state_.basic[i]) = xb(i);
}

void DualSimplex::recompute_d() {
  Eigen::VectorXd cb(lp_.m);
  for (int i = 0; i < lp_.m; ++i) cb(i) = cost_(state_.basic[i]);
  const Eigen::VectorXd y = state_.binv.transpose() * cb;
  state_.d = pivot_pricing(lp_, y, opts_.threads);
  state_.d = cost_ - state_.d;
  for (int i = 0; i < lp_.m; ++i) state_.d(state_.basic[i]) = 0.0;
}

double DualSimplex::condition_estimate() const {
  const int m = lp_.m;
  if (m == 0) return 1.0;
  double norm_ab = 0.0;
  for (int r = 0; r < m; ++r) {
    const int64_t j = state_.basic[r];
    const double s = j < lp_.n ? lp_.structural.col(j).cwiseAbs().sum() : 1.0;
    norm_ab = std::max(norm_ab, s);
  }
  const double norm_inv = state_.binv.cwiseAbs().colwise().sum().maxCoeff();
  return norm_ab * norm_inv;
}

void DualSimplex::perturb_costs() {
  // Nonbasic-only cost perturbation: keeps c_B, hence y and every other
  // reduced cost, untouched while pushing each nonbasic d away from zero in
  // its feasible direction.
  for (int64_t j = 0; j < lp_.total(); ++j) {
    if (state_.status[j] == VarStatus::basic) continue;
    if (lower_(j) == upper_(j)) continue;
    const double mag = 1e-10 * (1.0 + std::abs(cost_(j))) *
                       (0.5 + 0.5 * splitmix_unit(j + 1000003ULL * perturb_rounds_));
    const double delta = state_.status[j] == VarStatus::at_lower ? mag : -mag;
    cost_(j) += delta;
    state_.d(j) += delta;
  }
  perturbed_ = true;
  ++perturb_rounds_;
}

bool DualSimplex::unperturb_and_repair() {
  if (!perturbed_) return true;
  cost_ = lp_.cost;
  perturbed_ = false;
  recompute_d();
  // Restoring true costs can leave boxed nonbasic variables on the wrong
  // bound for their reduced-cost sign; flip them and recompute.
  bool flipped = false;
  bool clean = true;
  for (int64_t j = 0; j < lp_.total(); ++j) {
    if (state_.status[j] == VarStatus::basic) continue;
    if (lower_(j) == upper_(j)) continue;
    if (state_.status[j] == VarStatus::at_lower && state_.d(j) < -opts_.dual_tol) {
      if (std::isfinite(upper_(j))) {
        state_.status[j] = VarStatus::at_upper;
        flipped = true;
      } else {
        clean = false;
      }
    } else if (state_.status[j] == VarStatus::at_upper && state_.d(j) > opts_.dual_tol) {
      if (std::isfinite(lower_(j))) {
        state_.status[j] = VarStatus::at_lower;
        flipped = true;
      } else {
        clean = false;
      }
    }
  }
  if (flipped) recompute_x();
  return clean;
}

LpSolution DualSimplex::solve(const SolverLimits& limits) {
  cost_ = lp_.cost;
  perturbed_ = false;
  perturb_rounds_ = 0;
  install_slack_basis();
  return run(limits);
}

LpSolution DualSimplex::solve_warm(const std::vector<int64_t>& basic,
                                   const std::vector<VarStatus>& status,
                                   const SolverLimits& limits) {
  cost_ = lp_.cost;
  perturbed_ = false;
  perturb_rounds_ = 0;
  state_.basic = basic;
  state_.status = status;
  // Nonbasic statuses must respect finite bounds after bound edits.
  for (int64_t j = 0; j < lp_.total(); ++j) {
    if (state_.status[j] == VarStatus::at_lower && !std::isfinite(lower_(j)))
      state_.status[j] = VarStatus::at_upper;
    else if (state_.status[j] == VarStatus::at_upper && !std::isfinite(upper_(j)))
      state_.status[j] = VarStatus::at_lower;
  }
  refactorize();
  return run(limits);
}

LpSolution DualSimplex::finish(LpStatus status) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations_;
  sol.long_steps = long_steps_;
  sol.x = state_.x.head(lp_.n);
  sol.objective = lp_.cost.head(lp_.n).dot(sol.x);
  sol.min_upper = lp_.n > 0 ? upper_.head(lp_.n).minCoeff() : kInf;
  for (int64_t j = 0; j < lp_.n; ++j) {
    if (sol.x(j) > 1e-9) {
      ++sol.support_size;
      sol.l1_norm += sol.x(j);
    }
  }
  if (status == LpStatus::infeasible) sol.farkas_ray = farkas_;
  if (status == LpStatus::optimal) {
    auto& stats = support_bound_stats();
    stats.solves.fetch_add(1, std::memory_order_relaxed);
    if (sol.min_upper >= 1.0 - 1e-12) {
      stats.checked.fetch_add(1, std::memory_order_relaxed);
      const double cap = std::ceil(static_cast<double>(lp_.m) + sol.l1_norm);
      if (static_cast<double>(sol.support_size) > cap)
        stats.violations.fetch_add(1, std::memory_order_relaxed);
    }
  }
  return sol;
}

LpSolution DualSimplex::run(const SolverLimits& limits) {
  iterations_ = 0;
  long_steps_ = 0;
  farkas_.resize(0);

  if (lp_.bound_infeasible) return finish(LpStatus::infeasible);
  for (int64_t j = 0; j < lp_.total(); ++j)
    if (lower_(j) > upper_(j)) return finish(LpStatus::infeasible);

  const int64_t max_iters =
      limits.max_iterations > 0 ? limits.max_iterations : 20 * (lp_.total()) + 10000;
  const bool has_deadline =
      std::isfinite(limits.time_limit_s) && limits.time_limit_s < 1e9;
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(has_deadline ? limits.time_limit_s : 0.0));

  const double dp = opts_.primal_tol;

  double last_obj = -kInf;
  int64_t stall_iters = 0;
  const int64_t stall_limit = 5 * lp_.total();

  BfrtInstance inst;
  std::vector<int64_t> cand_var;  // kernel index -> variable

  while (true) {
    if (iterations_ >= max_iters) return finish(LpStatus::iteration_limit);
    if (has_deadline && (iterations_ & 63) == 0 &&
        std::chrono::steady_clock::now() > deadline)
      return finish(LpStatus::iteration_limit);

    if (opts_.paranoid_checks) {
      for (int64_t j = 0; j < lp_.total(); ++j) {
        if (state_.status[j] == VarStatus::at_lower) assert(state_.d(j) >= -1e-6);
        if (state_.status[j] == VarStatus::at_upper) assert(state_.d(j) <= 1e-6);
      }
    }

    // Leaving row: largest bound violation among basic variables.
    int row = -1;
    double worst = dp;
    double delta = 0.0;  // signed infeasibility of the leaving variable
    for (int r = 0; r < lp_.m; ++r) {
      const int64_t j = state_.basic[r];
      const double xj = state_.x(j);
      if (xj < lower_(j) - worst) {
        worst = lower_(j) - xj;
        row = r;
        delta = xj - lower_(j);
      } else if (xj > upper_(j) + worst) {
        worst = xj - upper_(j);
        row = r;
        delta = xj - upper_(j);
      }
    }
    if (row < 0) {
      const bool dual_clean = unperturb_and_repair();
      if (!dual_clean) {
        // A one-sided variable ended on the wrong side of its reduced cost
        // under the true costs; restart cleanly without perturbation.
        install_slack_basis();
        continue;
      }
      // Repair flips can reintroduce primal infeasibility; re-enter the loop.
      bool clean = true;
      for (int r = 0; r < lp_.m && clean; ++r) {
        const int64_t j = state_.basic[r];
        clean = state_.x(j) >= lower_(j) - dp && state_.x(j) <= upper_(j) + dp;
      }
      if (clean) return finish(LpStatus::optimal);
      continue;
    }

    ++iterations_;

    const int64_t leave = state_.basic[row];
    const double sigma = delta > 0 ? 1.0 : -1.0;
    const double budget = std::abs(delta);

    Eigen::VectorXd er = Eigen::VectorXd::Zero(lp_.m);
    er(row) = 1.0;
    const Eigen::VectorXd rho = btran(state_, er);
    const Eigen::VectorXd alpha = pivot_pricing(lp_, rho, opts_.threads);

    // Candidate construction for the ratio-test kernel.
    inst.locations.clear();
    cand_var.clear();
    inst.budget = budget;
    for (int64_t j = 0; j < lp_.total(); ++j) {
      const VarStatus st = state_.status[j];
      if (st == VarStatus::basic) continue;
      if (lower_(j) == upper_(j)) continue;  // fixed variables never move
      const double abar = sigma * alpha(j);
      bool eligible = false;
      if (st == VarStatus::at_lower && abar > opts_.pivot_tol) eligible = true;
      if (st == VarStatus::at_upper && abar < -opts_.pivot_tol) eligible = true;
      if (!eligible) continue;
      const double ratio = std::max(0.0, state_.d(j) / abar);
      const double span = upper_(j) - lower_(j);
      const double flip_cost =
          std::isfinite(span) ? std::abs(alpha(j)) * span : budget + 1.0;
      cand_var.push_back(j);
      inst.locations.push_back(
          {ratio, flip_cost, static_cast<int32_t>(cand_var.size() - 1)});
    }

    if (inst.locations.empty()) {
      farkas_ = sigma * rho;
      return finish(LpStatus::infeasible);
    }

    BfrtVariant variant = BfrtVariant::sequential;
    if (static_cast<int64_t>(inst.locations.size()) >= opts_.parallel_threshold &&
        opts_.threads > 1)
      variant = choose_bfrt_variant(iterations_ - 1, opts_.forced_bfrt);
    else if (opts_.forced_bfrt)
      variant = *opts_.forced_bfrt;

    BfrtSelection sel;
    switch (variant) {
      case BfrtVariant::sequential: sel = bfrt_select_sequential(inst); break;
      case BfrtVariant::large_budget: sel = bfrt_large_budget(inst, opts_.threads); break;
      case BfrtVariant::small_budget: sel = bfrt_small_budget(inst, opts_.threads); break;
    }

    int64_t entering;
    std::vector<int32_t> flips(sel.selected);
    if (sel.breakpoint.has_value()) {
      entering = cand_var[*sel.breakpoint];
    } else if (budget - sel.selected_cost > dp) {
      // Every candidate can flip and the infeasibility survives: the dual is
      // unbounded along this row.
      farkas_ = sigma * rho;
      return finish(LpStatus::infeasible);
    } else {
      // Exact-tie corner: re-enter on the last breakpoint instead of flipping it.
      entering = cand_var[flips.back()];
      flips.pop_back();
    }

    // Apply bound flips, accumulate their effect on the basic values.
    if (!flips.empty()) {
      ++long_steps_;
      Eigen::VectorXd dv = Eigen::VectorXd::Zero(lp_.m);
      for (int32_t c : flips) {
        const int64_t j = cand_var[c];
        const double old_x = state_.x(j);
        if (state_.status[j] == VarStatus::at_lower) {
          state_.status[j] = VarStatus::at_upper;
          state_.x(j) = upper_(j);
        } else {
          state_.status[j] = VarStatus::at_lower;
          state_.x(j) = lower_(j);
        }
        lp_.col_axpy(j, state_.x(j) - old_x, dv);
      }
      const Eigen::VectorXd dxb = state_.binv * dv;
      for (int i = 0; i < lp_.m; ++i) state_.x(state_.basic[i]) -= dxb(i);
    }

    // Entering column and pivot.
    Eigen::VectorXd aq = Eigen::VectorXd::Zero(lp_.m);
    lp_.col_axpy(entering, 1.0, aq);
    Eigen::VectorXd w = state_.binv * aq;
    if (std::abs(w(row)) < opts_.pivot_tol) {
      if (pivots_since_refactor_ > 0) {
        // Stale inverse; rebuild and restart the iteration with fresh prices.
        refactorize();
        continue;
      }
      // Fresh inverse and still unusable: the pricing and ftran routes
      // disagree at tolerance level. Perturb (bounded rounds) and move on.
      if (perturb_rounds_ < 3) {
        perturb_costs();
        stall_iters = 0;
      }
      continue;
    }

    const double viol_bound = sigma > 0 ? upper_(leave) : lower_(leave);
    const double dprime = state_.x(leave) - viol_bound;
    const double t = dprime / w(row);

    const double bound_q =
        state_.status[entering] == VarStatus::at_lower ? lower_(entering) : upper_(entering);
    for (int i = 0; i < lp_.m; ++i) state_.x(state_.basic[i]) -= w(i) * t;
    state_.x(entering) = bound_q + t;
    state_.x(leave) = viol_bound;

    // Reduced-cost update from the dual step.
    const double theta_d = state_.d(entering) / w(row);
    if (theta_d != 0.0) {
      for (int64_t j = 0; j < lp_.total(); ++j) {
        if (state_.status[j] == VarStatus::basic) continue;
        state_.d(j) -= theta_d * alpha(j);
      }
    }
    state_.d(leave) = -theta_d;
    state_.d(entering) = 0.0;

    state_.status[entering] = VarStatus::basic;
    state_.status[leave] = sigma > 0 ? VarStatus::at_upper : VarStatus::at_lower;
    state_.basic[row] = entering;

    // Product-form update of the explicit inverse.
    const double wr = w(row);
    state_.binv.row(row) /= wr;
    for (int i = 0; i < lp_.m; ++i) {
      if (i == row) continue;
      if (w(i) != 0.0) state_.binv.row(i) -= w(i) * state_.binv.row(row);
    }

    ++pivots_since_refactor_;
    if (pivots_since_refactor_ >= opts_.refactor_interval ||
        condition_estimate() > opts_.condition_limit)
      refactorize();

    // Degeneracy guard: perturb after a long stretch without progress.
    const double obj = cost_.dot(state_.x);
    if (obj > last_obj + 1e-12 * (1.0 + std::abs(obj))) {
      last_obj = obj;
      stall_iters = 0;
    } else if (++stall_iters > stall_limit && perturb_rounds_ < 3) {
      perturb_costs();
      stall_iters = 0;
    }
  }
}

LpSolution dual_simplex_solve(const StandardFormLP& lp, const SolverLimits& limits,
                              const SolverOptions& opts) {
  if (lp.m == 0) {
    // Box-only problem: each variable sits at the bound favored by its cost.
    LpSolution sol;
    sol.x.resize(lp.n);
    if (lp.bound_infeasible) {
      sol.status = LpStatus::infeasible;
      return sol;
    }
    for (int64_t j = 0; j < lp.n; ++j)
      sol.x(j) = lp.cost(j) >= 0.0 ? lp.lower(j) : lp.upper(j);
    sol.objective = lp.cost.head(lp.n).dot(sol.x);
    sol.status = LpStatus::optimal;
    sol.min_upper = lp.n > 0 ? lp.upper.head(lp.n).minCoeff() : kInf;
    for (int64_t j = 0; j < lp.n; ++j)
      if (sol.x(j) > 1e-9) {
        ++sol.support_size;
        sol.l1_norm += sol.x(j);
      }
    auto& stats = support_bound_stats();
    stats.solves.fetch_add(1, std::memory_order_relaxed);
    if (sol.min_upper >= 1.0 - 1e-12) {
      stats.checked.fetch_add(1, std::memory_order_relaxed);
      if (static_cast<double>(sol.support_size) > std::ceil(sol.l1_norm))
        stats.violations.fetch_add(1, std::memory_order_relaxed);
    }
    return sol;
  }
  DualSimplex solver(lp, opts);
  return solver.solve(limits);
}

}  // namespace pqe
