#include "pqe/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pqe/bench.hpp"
#include "pqe/csv.hpp"
#include "pqe/hierarchy.hpp"
#include "pqe/paql.hpp"
#include "pqe/shading.hpp"

namespace pqe {

namespace {

PackageQuery load_query(const std::string& paql_path, const std::string& json_path) {
  if (!paql_path.empty()) {
    std::ifstream in(paql_path);
    if (!in) throw std::runtime_error("cannot open " + paql_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_paql(ss.str());
  }
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open " + json_path);
  nlohmann::json j;
  in >> j;
  PackageQuery q;
  q.table = j.value("table", "");
  q.sense = j.at("sense").get<std::string>() == "maximize" ? Sense::maximize : Sense::minimize;
  q.objective_attr = j.at("objective_attr").get<std::string>();
  if (j.contains("repeat") && !j["repeat"].is_null()) q.repeat = j["repeat"].get<int64_t>();
  for (const auto& c : j.at("constraints")) {
    GlobalConstraint gc;
    const std::string kind = c.at("kind").get<std::string>();
    gc.kind = kind == "count" ? AggKind::count : (kind == "sum" ? AggKind::sum : AggKind::avg);
    if (gc.kind != AggKind::count) gc.attr = c.at("attr").get<std::string>();
    if (c.contains("lower") && !c["lower"].is_null()) gc.lower = c["lower"].get<double>();
    if (c.contains("upper") && !c["upper"].is_null()) gc.upper = c["upper"].get<double>();
    q.constraints.push_back(std::move(gc));
  }
  return q;
}

int cmd_ingest(const std::string& csv_path, const std::string& out_dir,
               const std::vector<std::string>& columns) {
  CsvOptions opts;
  opts.columns = columns;
  const Relation rel = ingest_csv(csv_path, opts);
  save_relation(rel, out_dir);
  std::cout << "ingested " << rel.n_tuples() << " tuples, " << rel.n_attrs()
            << " attributes -> " << out_dir << "\n";
  return 0;
}

int cmd_partition(const std::string& rel_dir, const std::string& out_dir, int64_t alpha,
                  double df, double c_override, int threads, uint64_t seed) {
  const Relation rel = load_relation(rel_dir);
  HierarchyConfig cfg;
  cfg.alpha = alpha;
  cfg.partition.df = df;
  cfg.partition.threads = threads;
  cfg.partition.seed = seed;
  if (c_override > 0.0)
    cfg.partition.scale_factors.assign(rel.n_attrs(), c_override);
  const Hierarchy h = build_hierarchy(rel, cfg);
  save_hierarchy(h, out_dir);
  std::cout << "hierarchy with " << h.levels() << " partitioned layer(s)";
  for (int l = 1; l <= h.levels(); ++l) std::cout << " | layer " << l << ": "
                                                  << h.layer(l).n_tuples();
  std::cout << " -> " << out_dir << "\n";
  return 0;
}

int cmd_solve(const std::string& rel_dir, const std::string& hier_dir,
              const std::string& paql_path, const std::string& json_path, int64_t alpha,
              double df, int64_t q, int threads, uint64_t seed, double time_limit,
              bool trace, const std::string& out_path) {
  const Relation rel = load_relation(rel_dir);
  const PackageQuery query = load_query(paql_path, json_path);
  if (!query.where.empty())
    throw std::runtime_error("local predicates unsupported: WHERE " + query.where[0].attr +
                             " " + query.where[0].op + " " + query.where[0].value_text);
  const NormalizedQuery nq = normalize_query(query, rel);

  Hierarchy h;
  if (!hier_dir.empty()) {
    h = load_hierarchy(rel, hier_dir);
  } else if (rel.n_tuples() > alpha) {
    HierarchyConfig cfg;
    cfg.alpha = alpha;
    cfg.partition.df = df;
    cfg.partition.threads = threads;
    cfg.partition.seed = seed;
    h = build_hierarchy(rel, cfg);
  } else {
    h.base = &rel;  // trivial hierarchy: the relation itself
    h.alpha = alpha;
    h.df = df;
  }
  if (h.base == nullptr) h.base = &rel;

  ShadingOptions opts;
  opts.alpha = alpha;
  opts.dr.q = q;
  opts.dr.seed = seed;
  opts.seed = seed;
  opts.solver.threads = threads;
  opts.time_limit_s = time_limit;

  const auto t0 = std::chrono::steady_clock::now();
  const ShadingResult res = progressive_shading(h, nq, opts);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostringstream out;
  out.precision(12);
  out << "status\t" << to_string(res.solution.status) << "\n";
  if (res.failed_layer >= 0) out << "failed_layer\t" << res.failed_layer << "\n";
  if (res.solution.status == SolveStatus::optimal ||
      res.solution.status == SolveStatus::feasible) {
    out << "objective\t" << res.solution.objective << "\n";
    out << "lp_bound\t" << res.solution.lp_bound << "\n";
    const GapResult gap =
        integrality_gap(res.solution.objective, res.solution.lp_bound, query.sense);
    out << "gap\t" << (gap.defined ? std::to_string(gap.value) : "undefined") << "\n";
    out << "fallbacks\t" << res.solution.fallback_iterations << "\n";
    out << "package_size\t" << res.solution.package_size() << "\n";
    out << "tuples\n";
    for (auto& [id, mult] : res.solution.multiplicities)
      out << id << "\t" << mult << "\n";
  }
  if (trace) out << "trace\n" << format_trace(res.trace);
  std::ostringstream timing;
  timing << "wall_s\t" << wall << "\n";

  if (!out_path.empty()) {
    std::ofstream f(out_path);
    f << out.str();
    std::cout << timing.str();
  } else {
    std::cout << out.str() << timing.str();
  }
  switch (res.solution.status) {
    case SolveStatus::optimal:
    case SolveStatus::feasible: return 0;
    case SolveStatus::infeasible: return 1;
    case SolveStatus::timeout: return 3;
  }
  return 2;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open " + config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const SuiteConfig cfg = suite_config_from_json(ss.str());
  const BenchResult res = run_suite(cfg);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream f(out_dir + "/results.tsv");
    f << results_table(res);
  }
  {
    std::ofstream f(out_dir + "/timings.tsv");
    f << timings_table(res);
  }
  {
    std::ofstream f(out_dir + "/summary.json");
    f << summary_json(cfg, res) << "\n";
  }
  int64_t solved = 0;
  for (const BenchRow& r : res.rows) solved += r.solved() ? 1 : 0;
  std::cout << "bench: " << res.rows.size() << " rows, " << solved << " solved -> "
            << out_dir << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"package query engine"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "load a CSV into a columnar relation cache");
  std::string csv_path, ingest_out;
  std::vector<std::string> columns;
  ingest->add_option("csv", csv_path, "input CSV with header")->required();
  ingest->add_option("-o,--out", ingest_out, "output relation directory")->required();
  ingest->add_option("--columns", columns, "subset of columns to load");

  // shared numeric options
  int64_t alpha = 100'000;
  double df = 100.0;
  int64_t q = 5000;
  double c_override = -1.0;
  int threads = 1;
  uint64_t seed = 0;
  double time_limit = 300.0;
  bool trace = false;

  auto add_common = [&](CLI::App* cmd, bool with_q) {
    cmd->add_option("--alpha", alpha, "augmenting size")->capture_default_str();
    cmd->add_option("--df", df, "downscale factor")->capture_default_str();
    if (with_q) cmd->add_option("--q", q, "initial sub-ILP size")->capture_default_str();
    cmd->add_option("--c", c_override, "scale factor override (auto when unset)");
    cmd->add_option("--threads", threads, "worker threads")->capture_default_str();
    cmd->add_option("--seed", seed, "top-level random seed")->capture_default_str();
  };

  // partition
  auto* partition = app.add_subcommand("partition", "build and persist a hierarchy");
  std::string rel_dir, hier_out;
  partition->add_option("relation", rel_dir, "relation cache directory")->required();
  partition->add_option("-o,--out", hier_out, "output hierarchy directory")->required();
  add_common(partition, false);

  // solve
  auto* solve = app.add_subcommand("solve", "answer a package query");
  std::string solve_rel, solve_hier, paql_path, qjson_path, solve_out;
  solve->add_option("relation", solve_rel, "relation cache directory")->required();
  solve->add_option("--hierarchy", solve_hier, "persisted hierarchy directory");
  solve->add_option("--query", paql_path, "PaQL query file");
  solve->add_option("--query-config", qjson_path, "query as JSON");
  solve->add_option("-o,--out", solve_out, "write the package here instead of stdout");
  solve->add_option("--time-limit", time_limit, "seconds")->capture_default_str();
  solve->add_flag("--trace", trace, "emit the per-layer run trace");
  add_common(solve, true);

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  std::string bench_cfg, bench_out;
  bench->add_option("config", bench_cfg, "suite config JSON")->required();
  bench->add_option("-o,--out", bench_out, "output directory")->required();

  std::vector<const char*> argv;
  argv.push_back("pqe");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(csv_path, ingest_out, columns);
    if (partition->parsed())
      return cmd_partition(rel_dir, hier_out, alpha, df, c_override, threads, seed);
    if (solve->parsed()) {
      if (paql_path.empty() == qjson_path.empty()) {
        std::cerr << "solve needs exactly one of --query / --query-config\n";
        return 2;
      }
      return cmd_solve(solve_rel, solve_hier, paql_path, qjson_path, alpha, df, q, threads,
                       seed, time_limit, trace, solve_out);
    }
    if (bench->parsed()) return cmd_bench(bench_cfg, bench_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace pqe
