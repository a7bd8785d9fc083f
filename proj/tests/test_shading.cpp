#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "pqe/ilp.hpp"
#include "pqe/shading.hpp"
#include "support/fixtures.hpp"

using namespace pqe;
using testsup::make_relation;
using testsup::normal_values;

TEST_CASE("hierarchy depth formula") {
  CHECK(hierarchy_depth(1'000'000'000, 100'000, 100.0) == 2);  // n=1e9, df=100, a=1e5
  CHECK(hierarchy_depth(100'000, 100'000, 100.0) == 0);
  CHECK(hierarchy_depth(100'001, 100'000, 100.0) == 1);
  CHECK(hierarchy_depth(10'000'000, 100'000, 100.0) == 1);
}

TEST_CASE("hierarchy with n below alpha is trivial") {
  const Relation rel = make_relation({{"x", normal_values(500, 1)}});
  HierarchyConfig cfg;
  cfg.alpha = 1000;
  const Hierarchy h = build_hierarchy(rel, cfg);
  CHECK(h.levels() == 0);
  CHECK(&h.layer(0) == &rel);
}

TEST_CASE("three-layer hierarchy shrinks by about the downscale factor") {
  const int64_t n = 4096;
  const Relation rel = make_relation(
      {{"x", normal_values(n, 2)}, {"y", normal_values(n, 3, 10.0, 2.0)}});
  HierarchyConfig cfg;
  cfg.alpha = 100;
  cfg.partition.df = 4.0;
  const Hierarchy h = build_hierarchy(rel, cfg);
  REQUIRE(h.levels() == 3);  // ceil(log4(4096/100)) = 3
  int64_t prev = n;
  for (int l = 1; l <= h.levels(); ++l) {
    const double shrink = static_cast<double>(prev) / h.layer(l).n_tuples();
    CHECK(shrink >= 2.0);
    CHECK(shrink <= 8.0);
    prev = h.layer(l).n_tuples();
  }
  CHECK(h.layer(h.levels()).n_tuples() <=
        static_cast<int64_t>(static_cast<double>(cfg.alpha) * cfg.partition.df));
  // Representatives of every layer resolve to their own group.
  for (int l = 1; l <= h.levels(); ++l) {
    const Relation& reps = h.layer(l);
    std::vector<double> point(reps.n_attrs());
    for (int64_t g = 0; g < reps.n_tuples(); ++g) {
      for (int j = 0; j < reps.n_attrs(); ++j) point[j] = reps.value(g, j);
      const auto got = h.indexes[l - 1].get_group(point);
      REQUIRE(got.has_value());
      CHECK(*got == static_cast<int32_t>(g));
    }
  }
}

namespace {

// 4x4 grid of unit boxes over [0,4)^2, two layer-0 tuples per cell placed
// +-0.125 around the center so the smallest positive gap is 0.25.
Hierarchy grid_hierarchy(const Relation*& base_out) {
  static Relation base;
  static Relation reps;
  base = Relation();
  reps = Relation();
  std::vector<double> x0, y0, xr, yr;
  Partition part;
  part.n_attrs = 2;
  for (int gy = 0; gy < 4; ++gy)
    for (int gx = 0; gx < 4; ++gx) {
      const double cx = gx + 0.5, cy = gy + 0.5;
      Group g;
      g.lo = {static_cast<double>(gx), static_cast<double>(gy)};
      g.hi = {gx + 1.0, gy + 1.0};
      g.rep = {cx, cy};
      g.var = {0.0, 0.0};
      g.offset = static_cast<int64_t>(part.members.size());
      g.count = 2;
      part.members.push_back(static_cast<int64_t>(x0.size()));
      x0.push_back(cx - 0.125);
      y0.push_back(cy);
      part.members.push_back(static_cast<int64_t>(x0.size()));
      x0.push_back(cx + 0.125);
      y0.push_back(cy);
      part.groups.push_back(std::move(g));
      xr.push_back(cx);
      yr.push_back(cy);
    }
  part.source_size = static_cast<int64_t>(x0.size());
  base.add_column("x", x0);
  base.add_column("y", y0);
  reps.add_column("x", xr);
  reps.add_column("y", yr);

  Hierarchy h;
  h.base = &base;
  h.reps.push_back(std::move(reps));
  MembershipIndex index;
  index.build(part, {0, 1});
  h.indexes.push_back(std::move(index));
  h.partitions.push_back(std::move(part));
  h.eps = {0.0, 0.25};
  h.alpha = 1000;
  h.df = 2.0;
  base_out = &base;
  return h;
}

}  // namespace

TEST_CASE("neighbor sampling expands exactly the face and corner neighbors") {
  const Relation* base = nullptr;
  const Hierarchy h = grid_hierarchy(base);
  const int64_t center = 2 * 4 + 2;  // cell (2,2)
  std::vector<int64_t> support = {center};
  int64_t expansions = 0;
  const std::vector<int64_t> out = neighbor_sampling(h, 1, 18, support, &expansions);
  // Seed members first, then one ring: 9 cells x 2 members = 18.
  REQUIRE(static_cast<int64_t>(out.size()) == 18);
  CHECK(expansions == 8);
  CHECK(out[0] == h.partitions[0].group_members(center)[0]);
  CHECK(out[1] == h.partitions[0].group_members(center)[1]);
  // Brute-force adjacency: the expanded members' cells share a face or corner.
  std::set<int64_t> cells;
  for (size_t i = 2; i < out.size(); ++i) cells.insert(out[i] / 2);
  for (int64_t cell : cells) {
    const int64_t dx = std::abs(cell % 4 - 2), dy = std::abs(cell / 4 - 2);
    CHECK(dx <= 1);
    CHECK(dy <= 1);
    CHECK(dx + dy > 0);
  }
  CHECK(cells.size() == 8);
}

TEST_CASE("alpha already met returns the truncated seed set with no expansion") {
  const Relation* base = nullptr;
  const Hierarchy h = grid_hierarchy(base);
  std::vector<int64_t> support = {0, 5, 10};
  int64_t expansions = 0;
  const std::vector<int64_t> out = neighbor_sampling(h, 1, 4, support, &expansions);
  CHECK(out.size() == 4);
  CHECK(expansions == 0);
  CHECK(out[0] == h.partitions[0].group_members(0)[0]);
}

TEST_CASE("corner probes fall off the grid and are skipped") {
  const Relation* base = nullptr;
  const Hierarchy h = grid_hierarchy(base);
  std::vector<int64_t> support = {0};  // cell (0,0)
  int64_t expansions = 0;
  const std::vector<int64_t> out = neighbor_sampling(h, 1, 1000, support, &expansions);
  // The full grid is eventually reached by ring growth.
  CHECK(out.size() == 32);
  CHECK(expansions == 15);
}

namespace {

struct PlantedFixture {
  Relation rel;
  NormalizedQuery nq;
  std::vector<int64_t> planted;
};

// Three zero-cost tuples at the far edge of the b range form the unique
// optimum of COUNT = 3, SUM(b) >= 21, MINIMIZE SUM(obj). The bound keeps
// slack so the coarse representative layers stay feasible.
PlantedFixture planted_instance(int64_t n, uint64_t seed) {
  PlantedFixture f;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> bval(0.0, 8.0);
  std::uniform_real_distribution<double> cost(1.0, 5.0);
  std::vector<double> b(n), obj(n);
  for (int64_t i = 0; i < n; ++i) {
    b[i] = bval(rng);
    obj[i] = cost(rng);
  }
  f.planted = {n / 4, n / 2, 3 * n / 4};
  for (int64_t id : f.planted) {
    b[id] = 9.5 + 0.01 * static_cast<double>(id % 7);
    obj[id] = 0.0;
  }
  f.rel = make_relation({{"b", b}, {"obj", obj}});
  PackageQuery q;
  q.objective_attr = "obj";
  q.repeat = 0;
  q.constraints.push_back({AggKind::count, "", 3.0, 3.0});
  q.constraints.push_back({AggKind::sum, "b", 21.0, kInf});
  f.nq = normalize_query(q, f.rel);
  return f;
}

}  // namespace

TEST_CASE("candidate sets keep the planted optimum through the layers") {
  PlantedFixture f = planted_instance(4000, 7);
  HierarchyConfig hcfg;
  hcfg.alpha = 400;
  hcfg.partition.df = 8.0;
  const Hierarchy h = build_hierarchy(f.rel, hcfg);
  REQUIRE(h.levels() >= 1);

  ShadingOptions opts;
  opts.alpha = 400;
  std::vector<int64_t> candidates = all_tuple_ids(h.layer(h.levels()));
  for (int l = h.levels(); l >= 1; --l) {
    const ShadingStepResult step = shading_step(h, l, opts.alpha, candidates, f.nq, opts);
    REQUIRE_FALSE(step.infeasible);
    CHECK(static_cast<int64_t>(step.next.size()) <= opts.alpha);
    candidates = step.next;
  }
  for (int64_t id : f.planted)
    CHECK(std::find(candidates.begin(), candidates.end(), id) != candidates.end());

  const ShadingResult res = progressive_shading(h, f.nq, opts);
  REQUIRE(res.solution.status == SolveStatus::optimal);
  CHECK(res.solution.objective == doctest::Approx(0.0));
  for (int64_t id : f.planted) CHECK(res.solution.multiplicities.count(id) == 1);
}

TEST_CASE("layer support sizes respect the positive-coefficient bound") {
  PlantedFixture f = planted_instance(3000, 11);
  HierarchyConfig hcfg;
  hcfg.alpha = 300;
  hcfg.partition.df = 8.0;
  const Hierarchy h = build_hierarchy(f.rel, hcfg);
  ShadingOptions opts;
  opts.alpha = 300;
  const ShadingResult res = progressive_shading(h, f.nq, opts);
  REQUIRE(res.solution.status == SolveStatus::optimal);
  for (const LayerTrace& t : res.trace) {
    // |S'| <= ceil(m + |x|_1); the package mass here is the count cap 3.
    CHECK(t.support <= static_cast<int64_t>(std::ceil(f.nq.m() + 3.0)));
    if (t.layer < h.levels()) CHECK(t.candidates <= opts.alpha);
  }
}

TEST_CASE("a trivial hierarchy degenerates to the dual reducer") {
  PlantedFixture f = planted_instance(600, 3);
  Hierarchy h;
  h.base = &f.rel;
  h.alpha = 1000;
  ShadingOptions opts;
  opts.alpha = 1000;
  opts.dr.seed = 5;
  const ShadingResult res = progressive_shading(h, f.nq, opts);

  DualReducerConfig dr_cfg;
  dr_cfg.seed = 5;
  const DualReducerResult direct =
      dual_reducer(f.nq, f.rel, all_tuple_ids(f.rel), dr_cfg);
  REQUIRE(res.solution.status == direct.solution.status);
  CHECK(res.solution.multiplicities == direct.solution.multiplicities);
}

TEST_CASE("infeasible layer aborts with the failing layer recorded") {
  PlantedFixture f = planted_instance(3000, 13);
  // Unsatisfiable count floor.
  PackageQuery q;
  q.objective_attr = "obj";
  q.repeat = 0;
  q.constraints.push_back({AggKind::count, "", 1e7, kInf});
  const NormalizedQuery bad = normalize_query(q, f.rel);
  HierarchyConfig hcfg;
  hcfg.alpha = 300;
  hcfg.partition.df = 8.0;
  const Hierarchy h = build_hierarchy(f.rel, hcfg);
  ShadingOptions opts;
  opts.alpha = 300;
  const ShadingResult res = progressive_shading(h, bad, opts);
  CHECK(res.solution.status == SolveStatus::infeasible);
  CHECK(res.failed_layer == h.levels());
}

TEST_CASE("fixed seed and thread configuration reproduce the package") {
  PlantedFixture f = planted_instance(2500, 23);
  HierarchyConfig hcfg;
  hcfg.alpha = 250;
  hcfg.partition.df = 8.0;
  const Hierarchy h = build_hierarchy(f.rel, hcfg);
  ShadingOptions opts;
  opts.alpha = 250;
  opts.seed = 77;
  opts.dr.seed = 77;
  const ShadingResult a = progressive_shading(h, f.nq, opts);
  const ShadingResult b = progressive_shading(h, f.nq, opts);
  CHECK(a.solution.status == b.solution.status);
  CHECK(a.solution.multiplicities == b.solution.multiplicities);
  CHECK(a.solution.objective == b.solution.objective);
}

TEST_CASE("random augmentation fills the candidate set deterministically") {
  PlantedFixture f = planted_instance(2500, 29);
  HierarchyConfig hcfg;
  hcfg.alpha = 250;
  hcfg.partition.df = 8.0;
  const Hierarchy h = build_hierarchy(f.rel, hcfg);
  ShadingOptions opts;
  opts.alpha = 250;
  opts.random_augment = true;
  opts.seed = 11;
  opts.dr.seed = 11;
  const ShadingResult a = progressive_shading(h, f.nq, opts);
  const ShadingResult b = progressive_shading(h, f.nq, opts);
  CHECK(a.solution.status == b.solution.status);
  CHECK(a.solution.multiplicities == b.solution.multiplicities);
}
