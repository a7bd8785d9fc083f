#include "pqe/bfrt.hpp"

#include <algorithm>
#include <queue>

#if defined(_OPENMP)
#include <omp.h>
#include <parallel/algorithm>
#endif

namespace pqe {

namespace {

using Key = std::pair<double, int32_t>;  // (score, original index)

bool key_less(const BfrtLocation& a, const BfrtLocation& b) {
  if (a.score != b.score) return a.score < b.score;
  return a.index < b.index;
}

// Left-to-right scan over locations already in ascending key order.
BfrtSelection scan_prefix(const std::vector<BfrtLocation>& ordered, double budget) {
  BfrtSelection out;
  double cum = 0.0;
  for (const BfrtLocation& loc : ordered) {
    if (cum + loc.cost <= budget) {
      cum += loc.cost;
      out.selected.push_back(loc.index);
    } else {
      out.breakpoint = loc.index;
      break;
    }
  }
  out.selected_cost = cum;
  return out;
}

}  // namespace

BfrtSelection bfrt_select_sequential(const BfrtInstance& inst) {
  std::vector<BfrtLocation> ordered = inst.locations;
  std::sort(ordered.begin(), ordered.end(), key_less);
  return scan_prefix(ordered, inst.budget);
}

BfrtSelection bfrt_large_budget(const BfrtInstance& inst, int threads) {
  std::vector<BfrtLocation> ordered = inst.locations;
#if defined(_OPENMP)
  if (threads > 1 && ordered.size() >= 4096) {
    omp_set_num_threads(threads);
    __gnu_parallel::sort(ordered.begin(), ordered.end(), key_less);
  } else {
    std::sort(ordered.begin(), ordered.end(), key_less);
  }
#else
  (void)threads;
  std::sort(ordered.begin(), ordered.end(), key_less);
#endif

  // Chunked prefix sums (fixed chunk size, independent of thread count) and a
  // binary search give the approximate cutoff; harmless beyond determinism,
  // the scan below re-derives the exact one.
  const int64_t n = static_cast<int64_t>(ordered.size());
  if (n > 0) {
    constexpr int64_t chunk = 8192;
    const int64_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> chunk_end(nchunks, 0.0);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
    for (int64_t c = 0; c < nchunks; ++c) {
      double s = 0.0;
      const int64_t hi = std::min(n, (c + 1) * chunk);
      for (int64_t i = c * chunk; i < hi; ++i) s += ordered[i].cost;
      chunk_end[c] = s;
    }
    for (int64_t c = 1; c < nchunks; ++c) chunk_end[c] += chunk_end[c - 1];
    (void)std::upper_bound(chunk_end.begin(), chunk_end.end(), inst.budget);
  }

  return scan_prefix(ordered, inst.budget);
}

BfrtSelection bfrt_small_budget(const BfrtInstance& inst, int threads) {
  const int64_t n = static_cast<int64_t>(inst.locations.size());
  if (threads < 1) threads = 1;
  const int64_t nchunks = std::min<int64_t>(std::max(threads, 1), std::max<int64_t>(n, 1));
  std::vector<std::vector<BfrtLocation>> kept_per_chunk(nchunks);

#if defined(_OPENMP)
  omp_set_num_threads(threads);
#pragma omp parallel for schedule(static)
#endif
  for (int64_t c = 0; c < nchunks; ++c) {
    const int64_t lo = c * n / nchunks;
    const int64_t hi = (c + 1) * n / nchunks;
    // Max-heap of kept locations; a location is dropped once the kept
    // locations below it alone already exceed the budget.
    auto cmp = [&](int64_t a, int64_t b) {
      return key_less(inst.locations[a], inst.locations[b]);
    };
    std::priority_queue<int64_t, std::vector<int64_t>, decltype(cmp)> heap(cmp);
    double kept_cost = 0.0;
    for (int64_t i = lo; i < hi; ++i) {
      heap.push(i);
      kept_cost += inst.locations[i].cost;
      while (!heap.empty() && kept_cost - inst.locations[heap.top()].cost > inst.budget) {
        kept_cost -= inst.locations[heap.top()].cost;
        heap.pop();
      }
    }
    std::vector<BfrtLocation>& kept = kept_per_chunk[c];
    kept.reserve(heap.size());
    while (!heap.empty()) {
      kept.push_back(inst.locations[heap.top()]);
      heap.pop();
    }
  }

  std::vector<BfrtLocation> survivors;
  for (auto& kept : kept_per_chunk)
    survivors.insert(survivors.end(), kept.begin(), kept.end());
  // Min-heap sweep over the survivors, realized as sort + scan; survivors
  // provably contain the whole selected prefix and the breakpoint.
  std::sort(survivors.begin(), survivors.end(), key_less);
  return scan_prefix(survivors, inst.budget);
}

BfrtVariant choose_bfrt_variant(int64_t iteration_index, std::optional<BfrtVariant> forced) {
  if (forced.has_value()) return *forced;
  return iteration_index == 0 ? BfrtVariant::large_budget : BfrtVariant::small_budget;
}

}  // namespace pqe
