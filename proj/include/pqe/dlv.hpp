#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pqe/relation.hpp"

namespace pqe {

// Axis-aligned group of a partition. Boxes are lower-inclusive,
// upper-exclusive along every attribute, with +/-inf sentinels on the
// outermost groups; every member satisfies lo_j <= t.j < hi_j.
struct Group {
  std::vector<double> lo, hi;
  std::vector<double> rep;  // per-attribute mean of the members
  std::vector<double> var;  // per-attribute population variance
  int64_t offset = 0;       // into Partition::members
  int64_t count = 0;
  int32_t parent = -1;
};

struct Partition {
  std::vector<Group> groups;
  std::vector<int64_t> members;  // tuple ids, grouped contiguously
  int64_t source_size = 0;
  int n_attrs = 0;
  std::vector<std::string> warnings;

  int64_t p() const { return static_cast<int64_t>(groups.size()); }
  std::span<const int64_t> group_members(int32_t g) const {
    return {members.data() + groups[g].offset, static_cast<size_t>(groups[g].count)};
  }
};

struct PartitionConfig {
  double df = 100.0;                   // downscale factor
  std::vector<double> scale_factors;   // per-attribute c_j; empty = auto
  double default_scale = 13.5;         // fallback c for degenerate attributes
  int64_t bucket_capacity = 1'000'000; // r, max tuples partitioned in memory
  int64_t sample_size = 10'000;        // N for the scale-factor search
  uint64_t seed = 0;
  int threads = 1;
};

// 1-D partition as contiguous ranges over the ascending值 order.
struct OneDPartition {
  std::vector<double> sorted;
  std::vector<int64_t> starts;      // subset start offsets; empty input -> empty
  std::vector<double> delimiters;   // first value of each subset after the first

  int64_t p() const { return static_cast<int64_t>(starts.size()); }
  std::span<const double> subset(int64_t i) const {
    const int64_t lo = starts[i];
    const int64_t hi = (i + 1 < p()) ? starts[i + 1] : static_cast<int64_t>(sorted.size());
    return {sorted.data() + lo, static_cast<size_t>(hi - lo)};
  }
  double subset_variance(int64_t i) const { return population_variance(subset(i)); }
};

// Ascending scan with a running variance; a delimiter is placed whenever the
// next value run would push the variance over beta. Runs of equal values are
// kept whole so subsets match the delimiter-value semantics.
OneDPartition one_d_dlv(std::vector<double> values, double beta);

// Splitting kernel over already-sorted values: subset start offsets.
std::vector<int64_t> dlv_boundaries(std::span<const double> sorted_values, double beta);

struct RatioScore {
  double value = 0.0;
  bool defined = false;  // false when the source variance is zero
};

// Sum of subset variances over the unpartitioned variance.
RatioScore ratio_score(const OneDPartition& part);
RatioScore ratio_score(const std::vector<std::vector<double>>& subsets);

// Per-attribute scale factors c_j via sampling plus binary search on beta so
// that the 1-D split of a sample yields ~df subsets. Constant attributes get
// the default with a warning.
std::vector<double> get_scale_factors(const Relation& rel, double df,
                                      const PartitionConfig& cfg,
                                      std::vector<std::string>* warnings = nullptr);

// Divisive splitting prioritized by |P| * max_j var(P, j) until ~|S|/df
// groups exist.
Partition dlv_partition(const Relation& rel, const PartitionConfig& cfg);

// Out-of-core variant: equal-width buckets on the highest-variance attribute
// (at most `bucket_capacity` tuples each), then dlv_partition per bucket.
Partition dlv_bucketed(const Relation& rel, const PartitionConfig& cfg);

}  // namespace pqe
