#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqe/dlv.hpp"
#include "pqe/membership_index.hpp"
#include "pqe/relation.hpp"

namespace pqe {

struct HierarchyConfig {
  int64_t alpha = 100'000;
  PartitionConfig partition;
};

// L+1 layers: layer 0 is the source relation; layer l>0 holds the
// representative tuples of the partition of layer l-1. partitions[l-1]
// groups layer l-1, and its group g is tuple g of layer l.
struct Hierarchy {
  const Relation* base = nullptr;
  std::vector<Relation> reps;            // layers 1..L
  std::vector<Partition> partitions;     // size L
  std::vector<MembershipIndex> indexes;  // per partition
  std::vector<double> eps;               // eps[l] for layers 1..L (eps[0] unused)
  int64_t alpha = 0;
  double df = 0.0;

  int levels() const { return static_cast<int>(partitions.size()); }
  const Relation& layer(int l) const { return l == 0 ? *base : reps[l - 1]; }
};

// Number of layers needed: smallest L with alpha * df^L >= n.
int hierarchy_depth(int64_t n, int64_t alpha, double df);

// Smallest positive pairwise value gap over any attribute of a relation.
double smallest_positive_gap(const Relation& rel);

// Builds L layers of bucketed DLV partitions; throws std::runtime_error when
// a layer fails to shrink.
Hierarchy build_hierarchy(const Relation& rel, const HierarchyConfig& cfg);

// Binary persistence: per-layer value files (attribute-major 64-bit floats),
// group metadata records and member permutations, plus a JSON manifest.
// Layout is documented in the README; files are byte-stable across runs.
void save_hierarchy(const Hierarchy& h, const std::string& dir);
Hierarchy load_hierarchy(const Relation& base, const std::string& dir);

}  // namespace pqe
