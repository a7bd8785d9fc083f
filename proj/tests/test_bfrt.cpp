#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "pqe/bfrt.hpp"

using namespace pqe;

namespace {

BfrtInstance random_instance(uint64_t seed, int64_t n, double budget_scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> score(0.0, 100.0);
  std::uniform_real_distribution<double> cost(0.0, 1.0);
  BfrtInstance inst;
  inst.locations.resize(n);
  for (int64_t i = 0; i < n; ++i)
    inst.locations[i] = {score(rng) + 1e-3, cost(rng), static_cast<int32_t>(i)};
  inst.budget = budget_scale * static_cast<double>(n) * 0.5;
  return inst;
}

// O(n^2) reference: for each prefix length, re-sum the costs from scratch.
BfrtSelection brute_force(const BfrtInstance& inst) {
  std::vector<BfrtLocation> ordered = inst.locations;
  std::sort(ordered.begin(), ordered.end(), [](const BfrtLocation& a, const BfrtLocation& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.index < b.index;
  });
  BfrtSelection out;
  for (size_t len = 0; len < ordered.size(); ++len) {
    double cum = 0.0;
    for (size_t i = 0; i <= len; ++i) cum += ordered[i].cost;
    if (cum <= inst.budget) {
      out.selected.push_back(ordered[len].index);
      out.selected_cost = cum;
    } else {
      out.breakpoint = ordered[len].index;
      break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("budget covering every cost selects everything") {
  BfrtInstance inst;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double total = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double c = u(rng);
    inst.locations.push_back({u(rng) + 0.01, c, i});
    total += c;
  }
  inst.budget = total + 1.0;
  const BfrtSelection sel = bfrt_select_sequential(inst);
  CHECK(sel.selected.size() == 100);
  CHECK_FALSE(sel.breakpoint.has_value());
}

TEST_CASE("zero budget with positive costs selects nothing") {
  BfrtInstance inst;
  inst.locations = {{1.0, 0.5, 0}, {2.0, 0.25, 1}};
  inst.budget = 0.0;
  const BfrtSelection sel = bfrt_select_sequential(inst);
  CHECK(sel.selected.empty());
  REQUIRE(sel.breakpoint.has_value());
  CHECK(*sel.breakpoint == 0);
}

TEST_CASE("sequential matches the quadratic brute force") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const BfrtInstance inst = random_instance(seed, 20, seed % 3 == 0 ? 0.05 : 0.8);
    const BfrtSelection got = bfrt_select_sequential(inst);
    const BfrtSelection want = brute_force(inst);
    CHECK(got == want);
  }
}

TEST_CASE("score ties break by original index") {
  BfrtInstance inst;
  inst.locations = {{5.0, 1.0, 2}, {5.0, 1.0, 0}, {5.0, 1.0, 1}};
  inst.budget = 2.0;
  const BfrtSelection sel = bfrt_select_sequential(inst);
  REQUIRE(sel.selected.size() == 2);
  CHECK(sel.selected[0] == 0);
  CHECK(sel.selected[1] == 1);
  CHECK(*sel.breakpoint == 2);
}

TEST_CASE("all three variants agree on random instances") {
  for (uint64_t seed = 100; seed < 160; ++seed) {
    std::mt19937_64 meta(seed);
    std::uniform_int_distribution<int64_t> size(1, 3000);
    const BfrtInstance inst =
        random_instance(seed, size(meta), seed % 2 == 0 ? 0.01 : 0.9);
    const BfrtSelection seq = bfrt_select_sequential(inst);
    for (int threads : {1, 2, 4}) {
      CHECK(bfrt_large_budget(inst, threads) == seq);
      CHECK(bfrt_small_budget(inst, threads) == seq);
    }
  }
}

TEST_CASE("variants agree on a large instance") {
  const BfrtInstance inst = random_instance(424242, 1'000'000, 0.5);
  const BfrtSelection seq = bfrt_select_sequential(inst);
  CHECK(bfrt_large_budget(inst, 2) == seq);
  CHECK(bfrt_small_budget(inst, 2) == seq);
}

TEST_CASE("small-budget stress keeps selections tiny") {
  for (uint64_t seed = 900; seed < 910; ++seed) {
    BfrtInstance inst = random_instance(seed, 100'000, 1.0);
    // Budget sized so only ~0-200 locations fit.
    inst.budget = 50.0;
    const BfrtSelection seq = bfrt_select_sequential(inst);
    CHECK(seq.selected.size() <= 200);
    CHECK(bfrt_small_budget(inst, 2) == seq);
    CHECK(bfrt_large_budget(inst, 2) == seq);
  }
}

TEST_CASE("variant choice by iteration with override") {
  CHECK(choose_bfrt_variant(0) == BfrtVariant::large_budget);
  CHECK(choose_bfrt_variant(5) == BfrtVariant::small_budget);
  CHECK(choose_bfrt_variant(0, BfrtVariant::sequential) == BfrtVariant::sequential);
}
