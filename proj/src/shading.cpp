#include "pqe/shading.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pqe {

namespace {

constexpr double kSupportTol = 1e-9;

std::vector<double> probe_coords(double lo, double hi, double eps, double attr_min,
                                 double attr_max) {
  // Infinite box edges are clamped to the layer's value range so probes stay
  // finite; the box itself is unchanged.
  const double flo = std::isfinite(lo) ? lo : attr_min;
  const double fhi = std::isfinite(hi) ? hi : attr_max;
  return {flo - eps, flo + (fhi - flo) / 2.0, fhi + eps};
}

}  // namespace

std::vector<int64_t> neighbor_sampling(const Hierarchy& h, int l, int64_t alpha,
                                       std::span<const int64_t> support_groups,
                                       int64_t* expansions) {
  const Partition& part = h.partitions[l - 1];
  const MembershipIndex& index = h.indexes[l - 1];
  const Relation& below = h.layer(l - 1);
  const int k = below.n_attrs();
  const double eps = h.eps[l];

  std::vector<double> attr_min(k), attr_max(k);
  for (int j = 0; j < k; ++j) std::tie(attr_min[j], attr_max[j]) = below.column_range(j);

  std::vector<char> seen(part.p(), 0);
  std::deque<int64_t> queue;
  std::vector<int64_t> out;
  std::vector<int64_t> seeds(support_groups.begin(), support_groups.end());
  std::sort(seeds.begin(), seeds.end());
  for (int64_t g : seeds) {
    seen[g] = 1;
    queue.push_back(g);
    const auto members = part.group_members(static_cast<int32_t>(g));
    out.insert(out.end(), members.begin(), members.end());
  }

  int64_t accepted = 0;
  std::vector<double> probe(k);
  while (!queue.empty() && static_cast<int64_t>(out.size()) < alpha) {
    const int64_t g = queue.front();
    queue.pop_front();
    const Group& grp = part.groups[g];
    std::vector<std::vector<double>> coords(k);
    for (int j = 0; j < k; ++j)
      coords[j] = probe_coords(grp.lo[j], grp.hi[j], eps, attr_min[j], attr_max[j]);
    // 3^k probes, first attribute as the most significant ternary digit.
    int64_t total = 1;
    for (int j = 0; j < k; ++j) total *= 3;
    for (int64_t code = 0; code < total; ++code) {
      int64_t c = code;
      for (int j = k - 1; j >= 0; --j) {
        probe[j] = coords[j][c % 3];
        c /= 3;
      }
      const auto found = index.get_group(probe);
      if (!found || *found == g || seen[*found]) continue;
      seen[*found] = 1;
      queue.push_back(*found);
      ++accepted;
      const auto members = part.group_members(*found);
      out.insert(out.end(), members.begin(), members.end());
    }
  }
  if (expansions) *expansions = accepted;
  if (static_cast<int64_t>(out.size()) > alpha) out.resize(alpha);
  return out;
}

namespace {

std::vector<int64_t> random_augment(const Hierarchy& h, int l, int64_t alpha,
                                    std::span<const int64_t> support_groups,
                                    uint64_t seed) {
  const Partition& part = h.partitions[l - 1];
  const Relation& below = h.layer(l - 1);
  std::vector<int64_t> out;
  std::vector<int64_t> seeds(support_groups.begin(), support_groups.end());
  std::sort(seeds.begin(), seeds.end());
  std::vector<char> taken(below.n_tuples(), 0);
  for (int64_t g : seeds)
    for (int64_t id : part.group_members(static_cast<int32_t>(g))) {
      out.push_back(id);
      taken[id] = 1;
    }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> pick(0, below.n_tuples() - 1);
  int64_t misses = 0;
  while (static_cast<int64_t>(out.size()) < std::min(alpha, below.n_tuples()) &&
         misses < 50 * below.n_tuples()) {
    const int64_t id = pick(rng);
    if (taken[id]) {
      ++misses;
      continue;
    }
    taken[id] = 1;
    out.push_back(id);
  }
  if (static_cast<int64_t>(out.size()) > alpha) out.resize(alpha);
  return out;
}

}  // namespace

ShadingStepResult shading_step(const Hierarchy& h, int l, int64_t alpha,
                               std::span<const int64_t> s_l, const NormalizedQuery& nq,
                               const ShadingOptions& opts) {
  ShadingStepResult res;
  const Relation& layer = h.layer(l);
  DenseLp lp = make_dense_lp(nq, layer, s_l);
  SolverLimits limits;
  limits.time_limit_s = opts.time_limit_s;
  const LpSolution sol = dual_simplex_solve(to_standard_form(lp), limits, opts.solver);
  if (sol.status == LpStatus::infeasible) {
    res.infeasible = true;
    return res;
  }
  if (sol.status == LpStatus::iteration_limit) {
    res.out_of_time = true;
    return res;
  }
  res.lp_objective = sol.objective;

  std::vector<int64_t> support;
  for (int64_t i = 0; i < sol.x.size(); ++i)
    if (sol.x(i) > kSupportTol) support.push_back(s_l[i]);
  res.support = static_cast<int64_t>(support.size());

  if (opts.random_augment)
    res.next = random_augment(h, l, alpha, support, opts.seed + static_cast<uint64_t>(l));
  else
    res.next = neighbor_sampling(h, l, alpha, support, &res.expansions);
  return res;
}

ShadingResult progressive_shading(const Hierarchy& h, const NormalizedQuery& nq,
                                  const ShadingOptions& opts) {
  ShadingResult out;
  const auto t0 = std::chrono::steady_clock::now();
  auto remaining = [&] {
    const double used =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return opts.time_limit_s - used;
  };

  std::vector<int64_t> candidates;
  const int levels = h.levels();
  if (levels == 0) {
    candidates = all_tuple_ids(*h.base);
  } else {
    candidates = all_tuple_ids(h.layer(levels));
    for (int l = levels; l >= 1; --l) {
      ShadingOptions step_opts = opts;
      step_opts.time_limit_s = remaining();
      ShadingStepResult step = shading_step(h, l, opts.alpha, candidates, nq, step_opts);
      if (step.infeasible) {
        out.failed_layer = l;
        out.solution.status = SolveStatus::infeasible;
        return out;
      }
      if (step.out_of_time) {
        out.failed_layer = l;
        out.solution.status = SolveStatus::timeout;
        return out;
      }
      out.trace.push_back({l, static_cast<int64_t>(candidates.size()), step.lp_objective,
                           step.support, step.expansions});
      candidates = std::move(step.next);
    }
  }

  DualReducerConfig dr_cfg = opts.dr;
  dr_cfg.solver = opts.solver;
  dr_cfg.time_limit_s = std::min(dr_cfg.time_limit_s, std::max(0.0, remaining()));
  DualReducerResult dr = dual_reducer(nq, *h.base, candidates, dr_cfg);
  out.dr = dr.diag;
  out.solution = std::move(dr.solution);

  if (out.solution.status == SolveStatus::optimal ||
      out.solution.status == SolveStatus::feasible) {
    const FeasibilityReport rep = check_feasible(out.solution, nq, *h.base);
    if (!rep.feasible)
      throw std::logic_error("progressive shading produced an infeasible package");
  }
  return out;
}

std::string format_trace(const std::vector<LayerTrace>& trace) {
  std::ostringstream os;
  for (const LayerTrace& t : trace)
    os << "layer=" << t.layer << " candidates=" << t.candidates
       << " lp_objective=" << t.lp_objective << " support=" << t.support
       << " expansions=" << t.expansions << "\n";
  return os.str();
}

}  // namespace pqe
