#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace pqe {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Columnar numeric table. Tuples are addressed by a stable 0-based index;
// all columns are 64-bit floats of equal length, values finite, names unique.
class Relation {
public:
  Relation() = default;

  // Appends a column; throws std::invalid_argument on duplicate name,
  // length mismatch with existing columns, or non-finite values.
  void add_column(std::string name, std::vector<double> values);

  int64_t n_tuples() const { return n_; }
  int n_attrs() const { return static_cast<int>(cols_.size()); }

  std::span<const double> column(int j) const { return cols_[j]; }
  const std::string& attr_name(int j) const { return names_[j]; }
  const std::vector<std::string>& attr_names() const { return names_; }

  // -1 when absent.
  int attr_index(const std::string& name) const;

  double value(int64_t tuple, int attr) const { return cols_[attr][tuple]; }

  // Population mean / variance / [min,max] of one column.
  double column_mean(int j) const;
  double column_variance(int j) const;
  std::pair<double, double> column_range(int j) const;

  // Attribute indices ordered by descending column variance (ties by index).
  std::vector<int> attrs_by_variance() const;

private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> cols_;
  int64_t n_ = 0;
};

// Population variance helpers shared across the partitioning code.
// Two-pass; exact zero for constant input (min == max short-circuit).
double population_variance(std::span<const double> values);
double population_mean(std::span<const double> values);

}  // namespace pqe
