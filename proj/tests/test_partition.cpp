#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pqe/dlv.hpp"
#include "pqe/kdtree.hpp"
#include "support/fixtures.hpp"

using namespace pqe;
using testsup::adversarial_set;
using testsup::adversarial_variance;
using testsup::make_relation;
using testsup::normal_values;
using testsup::uniform_values;

TEST_CASE("equal values stay in a single subset") {
  const OneDPartition part = one_d_dlv(std::vector<double>(100, 3.25), 1e-12);
  REQUIRE(part.p() == 1);
  CHECK(part.subset_variance(0) == 0.0);
}

TEST_CASE("empty input yields an empty partition") {
  const OneDPartition part = one_d_dlv({}, 1.0);
  CHECK(part.p() == 0);
  CHECK_THROWS_AS(one_d_dlv({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("adversarial family is fully isolated from n = 39 on") {
  for (int64_t n : {39, 100, 1000}) {
    for (double omega : {1.0, 7.5}) {
      const std::vector<double> vals = adversarial_set(n, omega);
      const double sigma2 = population_variance(vals);
      CHECK(sigma2 == doctest::Approx(adversarial_variance(n, omega)).epsilon(1e-9));
      const double beta =
          24.0 * sigma2 / (static_cast<double>(vals.size()) * static_cast<double>(vals.size()));
      const OneDPartition part = one_d_dlv(vals, beta);
      REQUIRE(part.p() == 3);
      CHECK(part.subset(0).size() == 1);
      CHECK(part.subset(1).size() == 1);
      const RatioScore score = ratio_score(part);
      REQUIRE(score.defined);
      CHECK(score.value == 0.0);
    }
  }
}

TEST_CASE("theorem beta bounds subset variance and count on normal samples") {
  const int64_t n = 1000;
  for (uint64_t seed = 0; seed < 5; ++seed) {
    const std::vector<double> vals = normal_values(n, seed);
    const double sigma2 = population_variance(vals);
    const double beta = 24.0 * sigma2 / (static_cast<double>(n) * static_cast<double>(n));
    const OneDPartition part = one_d_dlv(vals, beta);
    CHECK(static_cast<double>(part.p()) <= 0.75 * static_cast<double>(n) + 0.5);
    for (int64_t i = 0; i < part.p(); ++i)
      CHECK(part.subset_variance(i) <= beta + 1e-12 * (1.0 + beta));
    const RatioScore score = ratio_score(part);
    REQUIRE(score.defined);
    CHECK(score.value <= 24.0 / static_cast<double>(n));
  }
}

TEST_CASE("ratio score endpoints") {
  SUBCASE("singletons score zero") {
    const OneDPartition part = one_d_dlv({0.0, 10.0, 20.0, 30.0}, 1e-9);
    REQUIRE(part.p() == 4);
    const RatioScore score = ratio_score(part);
    REQUIRE(score.defined);
    CHECK(score.value == 0.0);
  }
  SUBCASE("one subset holding everything scores exactly one") {
    const std::vector<double> vals = normal_values(500, 3);
    const double beta = population_variance(vals) * 2.0;
    const OneDPartition part = one_d_dlv(vals, beta);
    REQUIRE(part.p() == 1);
    CHECK(ratio_score(part).value == 1.0);
  }
  SUBCASE("zero source variance is undefined") {
    const OneDPartition part = one_d_dlv(std::vector<double>(10, 1.0), 1.0);
    CHECK_FALSE(ratio_score(part).defined);
  }
}

TEST_CASE("kd-tree groups the discrepant pair and scores about n/4") {
  for (int64_t n : {100, 1000}) {
    const double omega = 1.0;
    const std::vector<double> vals = adversarial_set(n, omega);
    KdTreeConfig cfg;
    cfg.size_threshold = 2;
    cfg.radius_limit = omega;
    const OneDPartition part = kdtree_partition_1d(vals, cfg);
    // First split leaves {-w, w} together; the bulk cannot split further.
    REQUIRE(part.p() == 2);
    CHECK(part.subset(0).size() == 2);
    const RatioScore score = ratio_score(part);
    REQUIRE(score.defined);
    const double expect = omega * omega / adversarial_variance(n, omega);
    CHECK(score.value == doctest::Approx(expect).epsilon(1e-9));
    CHECK(score.value == doctest::Approx(static_cast<double>(n) / 4.0).epsilon(0.1));
  }
}

TEST_CASE("kd-tree splits all the way down with tau=1 omega=0") {
  KdTreeConfig cfg;
  cfg.size_threshold = 1;
  cfg.radius_limit = 0.0;
  const OneDPartition part = kdtree_partition_1d({5.0, 1.0, 9.0, 3.0, 7.0}, cfg);
  CHECK(part.p() == 5);
  CHECK(ratio_score(part).value == 0.0);
}

TEST_CASE("kd-tree leaves satisfy the stopping rule") {
  const int64_t n = 4096;
  const std::vector<double> vals = normal_values(n, 17);
  KdTreeConfig cfg;
  cfg.size_threshold = n / 8;
  cfg.radius_limit = 0.4;
  const OneDPartition part = kdtree_partition_1d(vals, cfg);
  for (int64_t i = 0; i < part.p(); ++i) {
    const auto sub = part.subset(i);
    const double mu = population_mean(sub);
    double radius = 0.0;
    for (double v : sub) radius = std::max(radius, std::abs(v - mu));
    const bool small_enough = static_cast<int64_t>(sub.size()) <= cfg.size_threshold;
    const bool tight_enough = radius <= cfg.radius_limit;
    const bool degenerate = sub.front() == sub.back();
    CHECK((small_enough || tight_enough || degenerate));
  }
}

TEST_CASE("scale factor search lands near the target subset count") {
  std::vector<double> col = uniform_values(20'000, 5);
  Relation rel;
  rel.add_column("u", col);
  PartitionConfig cfg;
  cfg.df = 10.0;
  cfg.sample_size = 10'000;
  std::vector<std::string> warnings;
  const std::vector<double> c = get_scale_factors(rel, 10.0, cfg, &warnings);
  REQUIRE(c.size() == 1);
  CHECK(warnings.empty());
  // Replay the found beta on a fresh sample.
  const std::vector<double> fresh = uniform_values(10'000, 99);
  const double sigma2 = population_variance(fresh);
  const double beta = c[0] * sigma2 / (10.0 * 10.0);
  const OneDPartition part = one_d_dlv(fresh, beta);
  CHECK(part.p() >= 7);
  CHECK(part.p() <= 13);
}

TEST_CASE("constant attribute falls back to the default scale factor") {
  Relation rel;
  rel.add_column("c", std::vector<double>(1000, 2.0));
  PartitionConfig cfg;
  std::vector<std::string> warnings;
  const std::vector<double> c = get_scale_factors(rel, 10.0, cfg, &warnings);
  CHECK(c[0] == 13.5);
  CHECK_FALSE(warnings.empty());
}

TEST_CASE("subset count is non-increasing in beta") {
  const std::vector<double> vals = normal_values(2000, 23);
  const double sigma2 = population_variance(vals);
  int64_t last = std::numeric_limits<int64_t>::max();
  for (double factor : {1e-4, 1e-3, 1e-2, 1e-1, 0.5, 1.0, 2.0}) {
    const int64_t p = one_d_dlv(vals, factor * sigma2).p();
    CHECK(p <= last);
    last = p;
  }
}

namespace {

void check_partition_integrity(const Relation& rel, const Partition& part) {
  // Exact cover with disjoint members.
  int64_t covered = 0;
  std::vector<char> seen(rel.n_tuples(), 0);
  for (int64_t g = 0; g < part.p(); ++g) {
    const Group& grp = part.groups[g];
    covered += grp.count;
    for (int64_t id : part.group_members(static_cast<int32_t>(g))) {
      CHECK_FALSE(seen[id]);
      seen[id] = 1;
      for (int j = 0; j < rel.n_attrs(); ++j) {
        CHECK(rel.value(id, j) >= grp.lo[j]);
        CHECK(rel.value(id, j) < grp.hi[j]);
      }
    }
    // Representative equals the member mean.
    for (int j = 0; j < rel.n_attrs(); ++j) {
      double s = 0.0;
      for (int64_t id : part.group_members(static_cast<int32_t>(g)))
        s += rel.value(id, j);
      const double mu = s / static_cast<double>(grp.count);
      CHECK(grp.rep[j] == doctest::Approx(mu).epsilon(1e-9));
    }
  }
  CHECK(covered == rel.n_tuples());
}

Relation bivariate_normal(int64_t n, uint64_t seed) {
  return make_relation(
      {{"x", normal_values(n, seed)}, {"y", normal_values(n, seed + 1, 5.0, 3.0)}});
}

}  // namespace

TEST_CASE("dlv partition covers the relation and shrinks variance") {
  const int64_t n = 20'000;
  const Relation rel = bivariate_normal(n, 31);
  PartitionConfig cfg;
  cfg.df = 100.0;
  const Partition part = dlv_partition(rel, cfg);
  check_partition_integrity(rel, part);

  // Group count within the stop-rule window.
  const double target = static_cast<double>(n) / cfg.df;
  CHECK(static_cast<double>(part.p()) >= target);
  CHECK(static_cast<double>(part.p()) <=
        target + static_cast<double>(rel.n_attrs()) * cfg.df);

  // Within-group total variance strictly below the unpartitioned total.
  double within = 0.0;
  for (const Group& g : part.groups)
    for (double v : g.var) within += static_cast<double>(g.count) * v;
  double total = 0.0;
  for (int j = 0; j < rel.n_attrs(); ++j)
    total += static_cast<double>(n) * rel.column_variance(j);
  CHECK(within < total);
}

TEST_CASE("single-attribute dlv is iterated 1-d splitting") {
  const Relation rel = make_relation({{"x", normal_values(5000, 77)}});
  PartitionConfig cfg;
  cfg.df = 50.0;
  const Partition part = dlv_partition(rel, cfg);
  check_partition_integrity(rel, part);
  CHECK(part.p() >= 100);
}

TEST_CASE("downscale factor four lands in the documented window") {
  const Relation rel = bivariate_normal(512, 5);
  PartitionConfig cfg;
  cfg.df = 4.0;
  const Partition part = dlv_partition(rel, cfg);
  CHECK(part.p() >= 512 / 8);
  CHECK(part.p() <= 512 / 2);
}

TEST_CASE("bucketed run with capacity above n is the plain run") {
  const Relation rel = bivariate_normal(3000, 11);
  PartitionConfig cfg;
  cfg.df = 30.0;
  cfg.bucket_capacity = 10'000;
  const Partition a = dlv_partition(rel, cfg);
  const Partition b = dlv_bucketed(rel, cfg);
  REQUIRE(a.p() == b.p());
  CHECK(a.members == b.members);
}

TEST_CASE("bucketed group count stays near the unbucketed one") {
  const int64_t n = 20'000;
  const Relation rel =
      make_relation({{"x", uniform_values(n, 3)}, {"y", uniform_values(n, 4)}});
  PartitionConfig cfg;
  cfg.df = 50.0;
  const Partition full = dlv_partition(rel, cfg);
  PartitionConfig bucketed_cfg = cfg;
  bucketed_cfg.bucket_capacity = n / 10;
  bucketed_cfg.threads = 2;
  const Partition bucketed = dlv_bucketed(rel, bucketed_cfg);
  check_partition_integrity(rel, bucketed);
  const double ratio =
      static_cast<double>(bucketed.p()) / static_cast<double>(full.p());
  CHECK(ratio >= 0.8);
  CHECK(ratio <= 1.2);
}

TEST_CASE("an oversized run of duplicates becomes one homogeneous group") {
  std::vector<double> vals(5000, 42.0);
  for (int i = 0; i < 500; ++i) vals.push_back(static_cast<double>(i));
  const Relation rel = make_relation({{"x", vals}});
  PartitionConfig cfg;
  cfg.df = 10.0;
  cfg.bucket_capacity = 1000;
  const Partition part = dlv_bucketed(rel, cfg);
  check_partition_integrity(rel, part);
  bool found = false;
  for (const Group& g : part.groups)
    if (g.count >= 5000 && g.var[0] == 0.0) found = true;
  CHECK(found);
}
