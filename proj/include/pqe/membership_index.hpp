#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pqe/dlv.hpp"

namespace pqe {

// Point-in-box lookup over the disjoint group boxes of a partition: a
// centered interval tree on the first attribute of `attr_order` (highest
// variance first), with candidate verification over the remaining attributes.
// Boxes are lower-inclusive, upper-exclusive.
class MembershipIndex {
public:
  MembershipIndex() = default;

  void build(const Partition& part, std::vector<int> attr_order);

  // Group id containing the point, or nullopt.
  std::optional<int32_t> get_group(std::span<const double> point) const;

  int64_t n_groups() const { return static_cast<int64_t>(n_groups_); }

private:
  struct Node {
    double center = 0.0;
    int32_t left = -1, right = -1;
    std::vector<int32_t> by_lo;  // intervals containing center, ascending lo
    std::vector<int32_t> by_hi;  // same intervals, descending hi
  };

  int32_t build_node(std::vector<int32_t>& ids);
  bool in_box(int32_t g, std::span<const double> point) const;

  int k_ = 0;
  int64_t n_groups_ = 0;
  int primary_ = 0;
  std::vector<int> rest_;            // attrs checked after the primary
  std::vector<double> lo_, hi_;      // group boxes, row-major p x k
  std::vector<Node> nodes_;
  int32_t root_ = -1;
};

}  // namespace pqe
