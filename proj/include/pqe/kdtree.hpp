#pragma once

#include <cstdint>
#include <vector>

#include "pqe/dlv.hpp"
#include "pqe/relation.hpp"

namespace pqe {

struct KdTreeConfig {
  int64_t size_threshold = 1;  // tau
  double radius_limit = 0.0;   // omega
};

// Recursive mean-splitting baseline. A cluster is split while its size
// exceeds tau or its radius max|x - mean| exceeds omega; clusters whose mean
// split would leave one side empty stay leaves.
OneDPartition kdtree_partition_1d(std::vector<double> values, const KdTreeConfig& cfg);

// Multi-attribute variant with round-robin split attributes and L-inf radius.
Partition kdtree_partition(const Relation& rel, const KdTreeConfig& cfg);

}  // namespace pqe
