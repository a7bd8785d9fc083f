#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqe/hardness.hpp"
#include "pqe/relation.hpp"

namespace pqe {

enum class ColumnFamily { normal, uniform, zero_inflated_lognormal };

struct ColumnSpec {
  std::string name;
  ColumnFamily family = ColumnFamily::normal;
  double mu = 0.0;
  double sigma = 1.0;
  // zero_inflated_lognormal: fraction of exact zeros; the lognormal component
  // is calibrated so the final column is nonnegative and still matches
  // mu/sigma.
  double zero_fraction = 0.0;
};

struct RelationSpec {
  std::vector<ColumnSpec> columns;
  int64_t n = 0;
  // Optional common correlation between distinct attributes (Gaussian copula
  // on the normal components); 0 keeps columns independent.
  double correlation = 0.0;
};

Relation generate_relation(const RelationSpec& spec, uint64_t seed);

// Synthetic relation matching a benchmark template's statistics.
RelationSpec bench_relation_spec(const BenchTemplate& tpl, int64_t n);

}  // namespace pqe
