#include "pqe/relation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pqe {

void Relation::add_column(std::string name, std::vector<double> values) {
  if (attr_index(name) >= 0)
    throw std::invalid_argument("duplicate attribute name: " + name);
  if (!cols_.empty() && static_cast<int64_t>(values.size()) != n_)
    throw std::invalid_argument("column length mismatch for attribute: " + name);
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("non-finite value in attribute: " + name);
  if (cols_.empty()) n_ = static_cast<int64_t>(values.size());
  names_.push_back(std::move(name));
  cols_.push_back(std::move(values));
}

int Relation::attr_index(const std::string& name) const {
  for (size_t j = 0; j < names_.size(); ++j)
    if (names_[j] == name) return static_cast<int>(j);
  return -1;
}

double Relation::column_mean(int j) const { return population_mean(cols_[j]); }

double Relation::column_variance(int j) const { return population_variance(cols_[j]); }

std::pair<double, double> Relation::column_range(int j) const {
  const auto& c = cols_[j];
  if (c.empty()) return {0.0, 0.0};
  auto [lo, hi] = std::minmax_element(c.begin(), c.end());
  return {*lo, *hi};
}

std::vector<int> Relation::attrs_by_variance() const {
  std::vector<std::pair<double, int>> keyed;
  keyed.reserve(cols_.size());
  for (int j = 0; j < n_attrs(); ++j) keyed.emplace_back(-column_variance(j), j);
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> order;
  order.reserve(keyed.size());
  for (auto& [v, j] : keyed) order.push_back(j);
  return order;
}

double population_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) return 0.0;
  const double mu = population_mean(values);
  double s = 0.0;
  for (double v : values) {
    const double d = v - mu;
    s += d * d;
  }
  return s / static_cast<double>(values.size());
}

}  // namespace pqe
