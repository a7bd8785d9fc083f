#include "pqe/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "pqe/dual_reducer.hpp"
#include "pqe/hierarchy.hpp"
#include "pqe/ilp.hpp"
#include "pqe/shading.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace pqe {

namespace {

uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  return x ^ (x >> 33);
}

BenchTemplate template_for(const std::string& dataset) {
  if (dataset == "sdss") return sdss_template();
  if (dataset == "tpch") return tpch_template();
  throw std::invalid_argument("unknown dataset: " + dataset);
}

struct QueryContext {
  const Relation* rel;
  const Hierarchy* hier;
  NormalizedQuery nq;
  Sense sense;
  double lp_bound_internal;  // full-relation relaxation
};

BenchRow run_method(BenchMethod method, const QueryContext& ctx, const SuiteConfig& cfg,
                    uint64_t seed) {
  BenchRow row;
  row.method = to_string(method);
  const auto t0 = std::chrono::steady_clock::now();

  DualReducerConfig dr_cfg;
  dr_cfg.q = cfg.q;
  dr_cfg.seed = seed;
  dr_cfg.time_limit_s = cfg.time_limit_s;

  ShadingOptions ps_opts;
  ps_opts.alpha = cfg.alpha;
  ps_opts.dr = dr_cfg;
  ps_opts.seed = seed;
  ps_opts.time_limit_s = cfg.time_limit_s;

  PackageSolution sol;
  switch (method) {
    case BenchMethod::progressive_shading:
    case BenchMethod::shading_random_augment: {
      ps_opts.random_augment = method == BenchMethod::shading_random_augment;
      ShadingResult res = progressive_shading(*ctx.hier, ctx.nq, ps_opts);
      sol = std::move(res.solution);
      row.fallbacks = res.dr.fallback_iterations;
      if (cfg.trace) row.trace = format_trace(res.trace);
      break;
    }
    case BenchMethod::dual_reducer_only:
    case BenchMethod::dual_reducer_random: {
      const std::vector<int64_t> ids = all_tuple_ids(*ctx.rel);
      DualReducerResult res = method == BenchMethod::dual_reducer_only
                                  ? dual_reducer(ctx.nq, *ctx.rel, ids, dr_cfg)
                                  : dual_reducer_random_variant(ctx.nq, *ctx.rel, ids, dr_cfg);
      sol = std::move(res.solution);
      row.fallbacks = res.diag.fallback_iterations;
      break;
    }
    case BenchMethod::exact:
    case BenchMethod::exact_feasibility: {
      const std::vector<int64_t> ids = all_tuple_ids(*ctx.rel);
      IlpInstance inst{to_standard_form(make_dense_lp(ctx.nq, *ctx.rel, ids))};
      BnbLimits limits;
      limits.time_limit_s = cfg.time_limit_s;
      BnbResult res = branch_and_bound(inst, limits, {},
                                       method == BenchMethod::exact_feasibility);
      sol.status = res.status;
      if (res.status == SolveStatus::optimal || res.status == SolveStatus::feasible) {
        for (int64_t j = 0; j < res.x.size(); ++j) {
          const int64_t mult = std::llround(res.x(j));
          if (mult > 0) sol.multiplicities[j] = mult;
        }
        sol.objective = ctx.nq.report_objective(res.objective);
      }
      break;
    }
  }

  row.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  row.status = sol.status;
  row.package_size = sol.package_size();
  row.lp_bound = ctx.nq.report_objective(ctx.lp_bound_internal);
  if (row.solved()) {
    row.objective = sol.objective;
    row.gap = integrality_gap(sol.objective, row.lp_bound, ctx.sense);
  }
  return row;
}

}  // namespace

const char* to_string(BenchMethod m) {
  switch (m) {
    case BenchMethod::progressive_shading: return "progressive_shading";
    case BenchMethod::dual_reducer_only: return "dual_reducer";
    case BenchMethod::exact: return "exact";
    case BenchMethod::exact_feasibility: return "exact_feasibility";
    case BenchMethod::shading_random_augment: return "shading_random_augment";
    case BenchMethod::dual_reducer_random: return "dual_reducer_random";
  }
  return "?";
}

std::optional<BenchMethod> bench_method_from_string(const std::string& s) {
  for (BenchMethod m :
       {BenchMethod::progressive_shading, BenchMethod::dual_reducer_only, BenchMethod::exact,
        BenchMethod::exact_feasibility, BenchMethod::shading_random_augment,
        BenchMethod::dual_reducer_random})
    if (s == to_string(m)) return m;
  return std::nullopt;
}

BenchResult run_suite(const SuiteConfig& cfg) {
  struct Task {
    std::string dataset;
    uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const std::string& ds : cfg.datasets)
    for (uint64_t s : cfg.seeds) tasks.push_back({ds, s});

  std::vector<std::vector<BenchRow>> per_task(tasks.size());

#if defined(_OPENMP)
  omp_set_num_threads(std::max(1, cfg.threads));
#pragma omp parallel for schedule(dynamic)
#endif
  for (size_t ti = 0; ti < tasks.size(); ++ti) {
    const Task& task = tasks[ti];
    const BenchTemplate tpl = template_for(task.dataset);
    RelationSpec rspec = bench_relation_spec(tpl, cfg.n);
    rspec.correlation = cfg.correlation;
    const uint64_t rel_seed = mix(cfg.master_seed, mix(std::hash<std::string>{}(task.dataset),
                                                       task.seed));
    const Relation rel = generate_relation(rspec, rel_seed);

    const bool needs_hier =
        std::any_of(cfg.methods.begin(), cfg.methods.end(), [](BenchMethod m) {
          return m == BenchMethod::progressive_shading ||
                 m == BenchMethod::shading_random_augment;
        });
    Hierarchy hier;
    if (needs_hier) {
      HierarchyConfig hcfg;
      hcfg.alpha = cfg.alpha;
      hcfg.partition.df = cfg.df;
      hcfg.partition.seed = rel_seed;
      hier = build_hierarchy(rel, hcfg);
    }

    for (double h : cfg.hardness) {
      const PackageQuery query = make_bench_query(tpl, h);
      QueryContext ctx;
      ctx.rel = &rel;
      ctx.hier = &hier;
      ctx.nq = normalize_query(query, rel);
      ctx.sense = query.sense;
      {
        const std::vector<int64_t> ids = all_tuple_ids(rel);
        SolverLimits limits;
        limits.time_limit_s = cfg.time_limit_s;
        const LpSolution root =
            dual_simplex_solve(to_standard_form(make_dense_lp(ctx.nq, rel, ids)), limits);
        ctx.lp_bound_internal = root.status == LpStatus::optimal
                                    ? root.objective
                                    : std::numeric_limits<double>::quiet_NaN();
      }
      for (BenchMethod m : cfg.methods) {
        BenchRow row = run_method(m, ctx, cfg, mix(rel_seed, static_cast<uint64_t>(h * 64)));
        row.dataset = task.dataset;
        row.hardness = h;
        row.seed = task.seed;
        per_task[ti].push_back(std::move(row));
      }
    }
  }

  BenchResult out;
  for (auto& rows : per_task)
    for (auto& r : rows) out.rows.push_back(std::move(r));
  std::sort(out.rows.begin(), out.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.dataset, a.hardness, a.seed, a.method) <
           std::tie(b.dataset, b.hardness, b.seed, b.method);
  });
  return out;
}

namespace {

void row_key(std::ostream& os, const BenchRow& r) {
  os << r.dataset << "\t" << r.hardness << "\t" << r.seed << "\t" << r.method;
}

}  // namespace

std::string results_table(const BenchResult& res) {
  std::ostringstream os;
  os.precision(12);
  os << "dataset\thardness\tseed\tmethod\tstatus\tobjective\tlp_bound\tgap\tfallbacks\t"
        "package_size\n";
  for (const BenchRow& r : res.rows) {
    row_key(os, r);
    os << "\t" << to_string(r.status) << "\t" << r.objective << "\t" << r.lp_bound << "\t";
    if (r.gap.defined)
      os << r.gap.value;
    else
      os << "undefined";
    os << "\t" << r.fallbacks << "\t" << r.package_size << "\n";
  }
  return os.str();
}

std::string timings_table(const BenchResult& res) {
  std::ostringstream os;
  os.precision(6);
  os << "dataset\thardness\tseed\tmethod\twall_s\n";
  for (const BenchRow& r : res.rows) {
    row_key(os, r);
    os << "\t" << r.wall_s << "\n";
  }
  return os.str();
}

std::string summary_json(const SuiteConfig& cfg, const BenchResult& res) {
  nlohmann::json j;
  j["config"] = nlohmann::json::parse(suite_config_to_json(cfg));
  int64_t solved = 0;
  for (const BenchRow& r : res.rows) solved += r.solved() ? 1 : 0;
  j["rows"] = res.rows.size();
  j["solved"] = solved;
  nlohmann::json rows = nlohmann::json::array();
  for (const BenchRow& r : res.rows) {
    nlohmann::json o;
    o["dataset"] = r.dataset;
    o["hardness"] = r.hardness;
    o["seed"] = r.seed;
    o["method"] = r.method;
    o["status"] = to_string(r.status);
    o["objective"] = r.objective;
    o["lp_bound"] = r.lp_bound;
    o["gap"] = r.gap.defined ? nlohmann::json(r.gap.value) : nlohmann::json();
    o["fallbacks"] = r.fallbacks;
    o["package_size"] = r.package_size;
    o["wall_s"] = r.wall_s;
    rows.push_back(std::move(o));
  }
  j["results"] = std::move(rows);
  return j.dump(2);
}

SuiteConfig suite_config_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  SuiteConfig cfg;
  if (j.contains("datasets")) cfg.datasets = j["datasets"].get<std::vector<std::string>>();
  if (j.contains("hardness")) cfg.hardness = j["hardness"].get<std::vector<double>>();
  if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<uint64_t>>();
  if (j.contains("n")) cfg.n = j["n"].get<int64_t>();
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j["methods"]) {
      const auto parsed = bench_method_from_string(m.get<std::string>());
      if (!parsed) throw std::invalid_argument("unknown method: " + m.get<std::string>());
      cfg.methods.push_back(*parsed);
    }
  }
  if (j.contains("time_limit_s")) cfg.time_limit_s = j["time_limit_s"].get<double>();
  if (j.contains("alpha")) cfg.alpha = j["alpha"].get<int64_t>();
  if (j.contains("df")) cfg.df = j["df"].get<double>();
  if (j.contains("q")) cfg.q = j["q"].get<int64_t>();
  if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<uint64_t>();
  if (j.contains("correlation")) cfg.correlation = j["correlation"].get<double>();
  if (j.contains("trace")) cfg.trace = j["trace"].get<bool>();
  return cfg;
}

std::string suite_config_to_json(const SuiteConfig& cfg) {
  nlohmann::json j;
  j["datasets"] = cfg.datasets;
  j["hardness"] = cfg.hardness;
  j["seeds"] = cfg.seeds;
  j["n"] = cfg.n;
  std::vector<std::string> methods;
  for (BenchMethod m : cfg.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["time_limit_s"] = cfg.time_limit_s;
  j["alpha"] = cfg.alpha;
  j["df"] = cfg.df;
  j["q"] = cfg.q;
  j["threads"] = cfg.threads;
  j["master_seed"] = cfg.master_seed;
  j["correlation"] = cfg.correlation;
  j["trace"] = cfg.trace;
  return j.dump(2);
}

}  // namespace pqe
