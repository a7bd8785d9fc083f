#include "pqe/dlv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_set>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace pqe {

namespace {

struct RunningVar {
  int64_t cnt = 0;
  double sum = 0.0, sumsq = 0.0;

  void add(double v, int64_t k) {
    cnt += k;
    sum += static_cast<double>(k) * v;
    sumsq += static_cast<double>(k) * v * v;
  }
  double with(double v, int64_t k) const {
    const double c = static_cast<double>(cnt + k);
    const double s = sum + static_cast<double>(k) * v;
    const double ss = sumsq + static_cast<double>(k) * v * v;
    const double mu = s / c;
    return ss / c - mu * mu;
  }
  void reset() { cnt = 0; sum = sumsq = 0.0; }
};

}  // namespace

std::vector<int64_t> dlv_boundaries(std::span<const double> sorted_values, double beta) {
  if (beta <= 0.0) throw std::invalid_argument("bounding variance must be positive");
  std::vector<int64_t> starts;
  const int64_t n = static_cast<int64_t>(sorted_values.size());
  if (n == 0) return starts;
  starts.push_back(0);
  RunningVar acc;
  int64_t run_start = 0;  // first position of the current equal-value run
  for (int64_t i = 0; i < n; ++i) {
    const double v = sorted_values[i];
    if (i > 0 && v != sorted_values[i - 1]) run_start = i;
    if (acc.cnt > 0 && acc.with(v, 1) > beta) {
      // Delimit at this value. Equal values share a subset, so copies of v
      // already accepted move into the new subset with it.
      const int64_t boundary = run_start;
      if (boundary > starts.back()) {
        starts.push_back(boundary);
        acc.reset();
        for (int64_t k = boundary; k < i; ++k) acc.add(sorted_values[k], 1);
      }
    }
    acc.add(v, 1);
  }
  return starts;
}

OneDPartition one_d_dlv(std::vector<double> values, double beta) {
  OneDPartition part;
  part.sorted = std::move(values);
  std::sort(part.sorted.begin(), part.sorted.end());
  part.starts = dlv_boundaries(part.sorted, beta);
  for (size_t s = 1; s < part.starts.size(); ++s)
    part.delimiters.push_back(part.sorted[part.starts[s]]);
  return part;
}

RatioScore ratio_score(const OneDPartition& part) {
  const double total = population_variance(part.sorted);
  if (total <= 0.0) return {0.0, false};
  double sum = 0.0;
  for (int64_t i = 0; i < part.p(); ++i) sum += part.subset_variance(i);
  return {sum / total, true};
}

RatioScore ratio_score(const std::vector<std::vector<double>>& subsets) {
  std::vector<double> all;
  double sum = 0.0;
  for (const auto& s : subsets) {
    all.insert(all.end(), s.begin(), s.end());
    sum += population_variance(s);
  }
  const double total = population_variance(all);
  if (total <= 0.0) return {0.0, false};
  return {sum / total, true};
}

std::vector<double> get_scale_factors(const Relation& rel, double df,
                                      const PartitionConfig& cfg,
                                      std::vector<std::string>* warnings) {
  const int k = rel.n_attrs();
  const int64_t n = rel.n_tuples();
  const int64_t sample_n = std::min<int64_t>(cfg.sample_size, n);
  std::vector<int64_t> ids;
  if (sample_n == n) {
    ids.resize(n);
    std::iota(ids.begin(), ids.end(), 0);
  } else {
    std::mt19937_64 rng(cfg.seed ^ 0x5bf0a8b1ULL);
    std::unordered_set<int64_t> seen;
    seen.reserve(sample_n * 2);
    // Floyd's sampling without replacement.
    for (int64_t i = n - sample_n; i < n; ++i) {
      std::uniform_int_distribution<int64_t> pick(0, i);
      int64_t v = pick(rng);
      if (!seen.insert(v).second) seen.insert(i), v = i;
      ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
  }

  std::vector<double> factors(k, cfg.default_scale);
  for (int j = 0; j < k; ++j) {
    std::vector<double> sample;
    sample.reserve(ids.size());
    for (int64_t id : ids) sample.push_back(rel.value(id, j));
    std::sort(sample.begin(), sample.end());
    const double range = sample.back() - sample.front();
    const double var = population_variance(sample);
    if (range <= 0.0 || var <= 0.0) {
      if (warnings)
        warnings->push_back("attribute " + rel.attr_name(j) +
                            " is constant in the sample; using default scale factor");
      continue;
    }
    double lo = 0.0, hi = range * range / 4.0;
    const double eps = 1e-6 * range * range;
    double beta = (lo + hi) / 2.0;
    while (hi - lo > eps) {
      beta = (lo + hi) / 2.0;
      const int64_t p =
          static_cast<int64_t>(dlv_boundaries(sample, beta).size());
      if (p == static_cast<int64_t>(df))
        break;
      else if (p < df)
        hi = beta;
      else
        lo = beta;
    }
    factors[j] = beta * df * df / var;
  }
  return factors;
}

namespace {

// Mutable group under construction inside a single dlv run.
struct WorkGroup {
  std::vector<double> lo, hi;
  std::vector<double> mean, var;
  int64_t offset = 0, count = 0;
  int64_t id = 0;  // creation order, used for deterministic tie-breaks
};

void compute_stats(const Relation& rel, std::span<const int64_t> ids, WorkGroup& g) {
  const int k = rel.n_attrs();
  g.mean.assign(k, 0.0);
  g.var.assign(k, 0.0);
  if (ids.empty()) return;
  for (int j = 0; j < k; ++j) {
    double mn = rel.value(ids[0], j), mx = mn;
    double s = 0.0;
    for (int64_t id : ids) {
      const double v = rel.value(id, j);
      s += v;
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
    const double mu = s / static_cast<double>(ids.size());
    g.mean[j] = mu;
    if (mn == mx) {
      g.var[j] = 0.0;
      continue;
    }
    double ss = 0.0;
    for (int64_t id : ids) {
      const double d = rel.value(id, j) - mu;
      ss += d * d;
    }
    g.var[j] = ss / static_cast<double>(ids.size());
  }
}

double priority_of(const WorkGroup& g) {
  double mx = 0.0;
  for (double v : g.var) mx = std::max(mx, v);
  return static_cast<double>(g.count) * mx;
}

// Runs the divisive splitting over members[offset..offset+count) of the
// member buffer, seeded with the given root box. Appends final groups.
void dlv_run(const Relation& rel, std::vector<int64_t>& members, int64_t offset,
             int64_t count, const std::vector<double>& root_lo,
             const std::vector<double>& root_hi, double df,
             const std::vector<double>& scale, std::vector<Group>& out,
             std::vector<std::string>& warnings) {
  const int k = rel.n_attrs();
  std::vector<WorkGroup> pool;
  WorkGroup root;
  root.lo = root_lo;
  root.hi = root_hi;
  root.offset = offset;
  root.count = count;
  root.id = 0;
  compute_stats(rel, {members.data() + offset, static_cast<size_t>(count)}, root);
  pool.push_back(std::move(root));

  // Max priority queue on (|P| * max_j var, smaller id first on ties).
  auto cmp = [&](int64_t a, int64_t b) {
    const double pa = priority_of(pool[a]), pb = priority_of(pool[b]);
    if (pa != pb) return pa < pb;
    return pool[a].id > pool[b].id;
  };
  std::priority_queue<int64_t, std::vector<int64_t>, decltype(cmp)> pq(cmp);
  pq.push(0);

  const double target = static_cast<double>(count) / df;
  int64_t leaves = 1;
  std::vector<char> dead(1, 0);  // split-away markers, indexed like pool
  std::vector<std::pair<double, int64_t>> scratch;

  while (static_cast<double>(leaves) < target) {
    if (pq.empty()) {
      warnings.push_back("splitting queue drained before reaching the group target");
      break;
    }
    const int64_t gi = pq.top();
    pq.pop();
    if (priority_of(pool[gi]) <= 0.0) {
      warnings.push_back("remaining groups have zero variance; stopping early");
      break;
    }
    // Highest-variance attribute, lower index on ties.
    int jstar = 0;
    for (int j = 1; j < k; ++j)
      if (pool[gi].var[j] > pool[gi].var[jstar]) jstar = j;
    // Aim each split at df subsets, capped by the number of groups still
    // missing so the final split does not blow past the stop rule.
    const double needed = target - static_cast<double>(leaves) + 1.0;
    const double per_split = std::clamp(needed, 2.0, df);
    const double beta = scale[jstar] * pool[gi].var[jstar] / (per_split * per_split);

    const int64_t goff = pool[gi].offset, gcnt = pool[gi].count;
    scratch.clear();
    scratch.reserve(gcnt);
    for (int64_t i = 0; i < gcnt; ++i) {
      const int64_t id = members[goff + i];
      scratch.emplace_back(rel.value(id, jstar), id);
    }
    std::sort(scratch.begin(), scratch.end());
    for (int64_t i = 0; i < gcnt; ++i) members[goff + i] = scratch[i].second;

    std::vector<double> vals(gcnt);
    for (int64_t i = 0; i < gcnt; ++i) vals[i] = scratch[i].first;
    const std::vector<int64_t> starts = dlv_boundaries(vals, beta);
    const int64_t parts = static_cast<int64_t>(starts.size());
    if (parts <= 1) continue;  // unsplittable at this beta; group stays a leaf

    for (int64_t s = 0; s < parts; ++s) {
      const int64_t lo_i = starts[s];
      const int64_t hi_i = (s + 1 < parts) ? starts[s + 1] : gcnt;
      WorkGroup child;
      child.lo = pool[gi].lo;
      child.hi = pool[gi].hi;
      if (s > 0) {
        double mid = vals[lo_i - 1] + (vals[lo_i] - vals[lo_i - 1]) / 2.0;
        if (mid <= vals[lo_i - 1]) mid = vals[lo_i];
        child.lo[jstar] = mid;
      }
      if (s + 1 < parts) {
        const int64_t nxt = starts[s + 1];
        double mid = vals[nxt - 1] + (vals[nxt] - vals[nxt - 1]) / 2.0;
        if (mid <= vals[nxt - 1]) mid = vals[nxt];
        child.hi[jstar] = mid;
      }
      child.offset = goff + lo_i;
      child.count = hi_i - lo_i;
      child.id = static_cast<int64_t>(pool.size());
      compute_stats(rel, {members.data() + child.offset, static_cast<size_t>(child.count)},
                    child);
      pool.push_back(std::move(child));
      dead.push_back(0);
      pq.push(static_cast<int64_t>(pool.size()) - 1);
    }
    dead[gi] = 1;
    leaves += parts - 1;
  }

  // Emit surviving leaves in member order.
  std::vector<int64_t> leaf_ids;
  for (int64_t i = 0; i < static_cast<int64_t>(pool.size()); ++i)
    if (!dead[i]) leaf_ids.push_back(i);
  std::sort(leaf_ids.begin(), leaf_ids.end(),
            [&](int64_t a, int64_t b) { return pool[a].offset < pool[b].offset; });
  for (int64_t i : leaf_ids) {
    Group g;
    g.lo = std::move(pool[i].lo);
    g.hi = std::move(pool[i].hi);
    g.rep = std::move(pool[i].mean);
    g.var = std::move(pool[i].var);
    g.offset = pool[i].offset;
    g.count = pool[i].count;
    out.push_back(std::move(g));
  }
}

std::vector<double> resolve_scale(const Relation& rel, const PartitionConfig& cfg,
                                  std::vector<std::string>* warnings) {
  if (!cfg.scale_factors.empty()) {
    if (static_cast<int>(cfg.scale_factors.size()) != rel.n_attrs())
      throw std::invalid_argument("scale factor count does not match attribute count");
    return cfg.scale_factors;
  }
  return get_scale_factors(rel, cfg.df, cfg, warnings);
}

}  // namespace

Partition dlv_partition(const Relation& rel, const PartitionConfig& cfg) {
  if (cfg.df < 2.0) throw std::invalid_argument("downscale factor must be >= 2");
  Partition part;
  part.source_size = rel.n_tuples();
  part.n_attrs = rel.n_attrs();
  part.members.resize(rel.n_tuples());
  std::iota(part.members.begin(), part.members.end(), 0);
  const std::vector<double> scale = resolve_scale(rel, cfg, &part.warnings);
  const std::vector<double> lo(rel.n_attrs(), -kInf), hi(rel.n_attrs(), kInf);
  dlv_run(rel, part.members, 0, rel.n_tuples(), lo, hi, cfg.df, scale, part.groups,
          part.warnings);
  return part;
}

Partition dlv_bucketed(const Relation& rel, const PartitionConfig& cfg) {
  if (cfg.df < 2.0) throw std::invalid_argument("downscale factor must be >= 2");
  if (cfg.bucket_capacity < static_cast<int64_t>(cfg.df))
    throw std::invalid_argument("bucket capacity must be at least the downscale factor");
  const int64_t n = rel.n_tuples();
  if (n <= cfg.bucket_capacity) return dlv_partition(rel, cfg);

  Partition part;
  part.source_size = n;
  part.n_attrs = rel.n_attrs();
  std::vector<std::string> scale_warnings;
  const std::vector<double> scale = resolve_scale(rel, cfg, &scale_warnings);

  // Bucket along the attribute with the highest variance.
  int jb = 0;
  for (int j = 1; j < rel.n_attrs(); ++j)
    if (rel.column_variance(j) > rel.column_variance(jb)) jb = j;
  const auto [mn, mx] = rel.column_range(jb);

  int64_t nbuckets = (n + cfg.bucket_capacity - 1) / cfg.bucket_capacity;
  std::vector<int64_t> bucket_count;
  auto bucket_of = [&](double v, int64_t nb) {
    if (mx <= mn) return int64_t{0};
    const double w = (mx - mn) / static_cast<double>(nb);
    int64_t b = static_cast<int64_t>((v - mn) / w);
    return std::clamp<int64_t>(b, 0, nb - 1);
  };
  const auto col = rel.column(jb);
  for (int round = 0; round < 62; ++round) {
    bucket_count.assign(nbuckets, 0);
    std::vector<double> bmin(nbuckets, kInf), bmax(nbuckets, -kInf);
    for (int64_t i = 0; i < n; ++i) {
      const int64_t b = bucket_of(col[i], nbuckets);
      ++bucket_count[b];
      bmin[b] = std::min(bmin[b], col[i]);
      bmax[b] = std::max(bmax[b], col[i]);
    }
    // A bucket holding a single distinct value cannot shrink further.
    bool oversized_multivalue = false;
    for (int64_t b = 0; b < nbuckets; ++b)
      if (bucket_count[b] > cfg.bucket_capacity && bmin[b] < bmax[b]) {
        oversized_multivalue = true;
        break;
      }
    if (!oversized_multivalue || mx <= mn) break;
    nbuckets *= 2;
  }

  // Stable counting sort of tuple ids into buckets.
  std::vector<int64_t> bucket_offset(nbuckets + 1, 0);
  bucket_count.assign(nbuckets, 0);
  for (int64_t i = 0; i < n; ++i) ++bucket_count[bucket_of(col[i], nbuckets)];
  for (int64_t b = 0; b < nbuckets; ++b) bucket_offset[b + 1] = bucket_offset[b] + bucket_count[b];
  part.members.resize(n);
  std::vector<int64_t> fill(bucket_offset.begin(), bucket_offset.end() - 1);
  for (int64_t i = 0; i < n; ++i) part.members[fill[bucket_of(col[i], nbuckets)]++] = i;

  const double width = (mx > mn) ? (mx - mn) / static_cast<double>(nbuckets) : 0.0;
  std::vector<std::vector<Group>> bucket_groups(nbuckets);
  std::vector<std::vector<std::string>> bucket_warnings(nbuckets);

#if defined(_OPENMP)
  omp_set_num_threads(std::max(1, cfg.threads));
#pragma omp parallel for schedule(dynamic)
#endif
  for (int64_t b = 0; b < nbuckets; ++b) {
    const int64_t off = bucket_offset[b], cnt = bucket_offset[b + 1] - bucket_offset[b];
    if (cnt == 0) continue;
    std::vector<double> lo(rel.n_attrs(), -kInf), hi(rel.n_attrs(), kInf);
    if (b > 0) lo[jb] = mn + width * static_cast<double>(b);
    if (b + 1 < nbuckets) hi[jb] = mn + width * static_cast<double>(b + 1);
    dlv_run(rel, part.members, off, cnt, lo, hi, cfg.df, scale, bucket_groups[b],
            bucket_warnings[b]);
  }

  part.warnings = std::move(scale_warnings);
  for (int64_t b = 0; b < nbuckets; ++b) {
    for (auto& g : bucket_groups[b]) part.groups.push_back(std::move(g));
    for (auto& w : bucket_warnings[b]) part.warnings.push_back(std::move(w));
  }
  return part;
}

}  // namespace pqe
