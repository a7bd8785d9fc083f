#include "pqe/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pqe {

namespace {

void split_1d(const std::vector<double>& vals, int64_t lo, int64_t hi,
              const KdTreeConfig& cfg, std::vector<int64_t>& starts) {
  const int64_t n = hi - lo;
  double sum = 0.0;
  for (int64_t i = lo; i < hi; ++i) sum += vals[i];
  const double mu = sum / static_cast<double>(n);
  const double radius = std::max(mu - vals[lo], vals[hi - 1] - mu);
  const bool considered = n > cfg.size_threshold || radius > cfg.radius_limit;
  if (!considered) {
    starts.push_back(lo);
    return;
  }
  // Values are ascending: the left cluster is {x < mu}.
  const int64_t mid =
      std::lower_bound(vals.begin() + lo, vals.begin() + hi, mu) - vals.begin();
  if (mid == lo || mid == hi) {  // degenerate mean split
    starts.push_back(lo);
    return;
  }
  split_1d(vals, lo, mid, cfg, starts);
  split_1d(vals, mid, hi, cfg, starts);
}

}  // namespace

OneDPartition kdtree_partition_1d(std::vector<double> values, const KdTreeConfig& cfg) {
  OneDPartition part;
  part.sorted = std::move(values);
  std::sort(part.sorted.begin(), part.sorted.end());
  if (part.sorted.empty()) return part;
  split_1d(part.sorted, 0, static_cast<int64_t>(part.sorted.size()), cfg, part.starts);
  for (size_t s = 1; s < part.starts.size(); ++s)
    part.delimiters.push_back(part.sorted[part.starts[s]]);
  return part;
}

namespace {

struct KdFrame {
  int64_t offset, count;
  int depth;
  std::vector<double> lo, hi;
};

}  // namespace

Partition kdtree_partition(const Relation& rel, const KdTreeConfig& cfg) {
  const int k = rel.n_attrs();
  Partition part;
  part.source_size = rel.n_tuples();
  part.n_attrs = k;
  part.members.resize(rel.n_tuples());
  std::iota(part.members.begin(), part.members.end(), 0);

  std::vector<KdFrame> stack;
  stack.push_back({0, rel.n_tuples(), 0, std::vector<double>(k, -kInf),
                   std::vector<double>(k, kInf)});
  std::vector<std::pair<double, int64_t>> scratch;

  while (!stack.empty()) {
    KdFrame f = std::move(stack.back());
    stack.pop_back();
    std::span<int64_t> ids(part.members.data() + f.offset, f.count);

    std::vector<double> mean(k, 0.0);
    double radius = 0.0;
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (int64_t id : ids) s += rel.value(id, j);
      mean[j] = s / static_cast<double>(f.count);
    }
    for (int j = 0; j < k; ++j)
      for (int64_t id : ids)
        radius = std::max(radius, std::abs(rel.value(id, j) - mean[j]));

    bool split_done = false;
    if (f.count > cfg.size_threshold || radius > cfg.radius_limit) {
      // Try the round-robin attribute first, then cycle.
      for (int probe = 0; probe < k && !split_done; ++probe) {
        const int j = (f.depth + probe) % k;
        const double mu = mean[j];
        scratch.clear();
        scratch.reserve(f.count);
        for (int64_t id : ids) scratch.emplace_back(rel.value(id, j), id);
        std::sort(scratch.begin(), scratch.end());
        int64_t mid = 0;
        while (mid < f.count && scratch[mid].first < mu) ++mid;
        if (mid == 0 || mid == f.count) continue;
        for (int64_t i = 0; i < f.count; ++i) part.members[f.offset + i] = scratch[i].second;
        KdFrame left{f.offset, mid, f.depth + 1, f.lo, f.hi};
        KdFrame right{f.offset + mid, f.count - mid, f.depth + 1, f.lo, f.hi};
        left.hi[j] = mu;
        right.lo[j] = mu;
        // Right frame first so the left is processed next (depth-first,
        // ascending member order in the output).
        stack.push_back(std::move(right));
        stack.push_back(std::move(left));
        split_done = true;
      }
    }
    if (split_done) continue;

    Group g;
    g.lo = std::move(f.lo);
    g.hi = std::move(f.hi);
    g.offset = f.offset;
    g.count = f.count;
    g.rep.resize(k);
    g.var.resize(k);
    for (int j = 0; j < k; ++j) {
      std::vector<double> col;
      col.reserve(f.count);
      for (int64_t id : ids) col.push_back(rel.value(id, j));
      g.rep[j] = population_mean(col);
      g.var[j] = population_variance(col);
    }
    part.groups.push_back(std::move(g));
  }
  return part;
}

}  // namespace pqe
