#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace pqe {

// Budgeted ascending-score prefix selection: the ratio-test kernel of the
// long-step dual simplex. Locations are visited in ascending score order
// (ties by original index) while the cumulative cost stays within budget.
struct BfrtLocation {
  double score = 0.0;
  double cost = 0.0;
  int32_t index = 0;  // original identifier
};

struct BfrtInstance {
  std::vector<BfrtLocation> locations;
  double budget = 0.0;
};

struct BfrtSelection {
  // Original indices of the selected maximal prefix, in ascending
  // (score, index) order.
  std::vector<int32_t> selected;
  // First location that does not fit, if any.
  std::optional<int32_t> breakpoint;
  double selected_cost = 0.0;

  bool operator==(const BfrtSelection& o) const {
    return selected == o.selected && breakpoint == o.breakpoint;
  }
};

BfrtSelection bfrt_select_sequential(const BfrtInstance& inst);

// Parallel sort + chunked prefix sums + binary search; the breakpoint is then
// pinned with a left-to-right scan so the selection is bit-identical to the
// sequential variant regardless of thread count.
BfrtSelection bfrt_large_budget(const BfrtInstance& inst, int threads);

// Per-chunk bounded max-heaps keep every location that could still fit under
// the budget; a final ascending sweep over the merged survivors recovers the
// exact sequential selection.
BfrtSelection bfrt_small_budget(const BfrtInstance& inst, int threads);

enum class BfrtVariant { sequential, large_budget, small_budget };

// First dual iteration -> large budget; subsequent iterations -> small.
BfrtVariant choose_bfrt_variant(int64_t iteration_index,
                                std::optional<BfrtVariant> forced = std::nullopt);

}  // namespace pqe
