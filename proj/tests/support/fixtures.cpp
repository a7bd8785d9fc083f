#include "support/fixtures.hpp"

#include <cmath>
#include <random>

namespace pqe::testsup {

Relation make_relation(std::vector<std::pair<std::string, std::vector<double>>> cols) {
  Relation rel;
  for (auto& [name, values] : cols) rel.add_column(name, std::move(values));
  return rel;
}

std::vector<double> adversarial_set(int64_t n, double omega) {
  std::vector<double> vals;
  vals.reserve(n + 2);
  vals.push_back(-omega);
  vals.push_back(omega);
  const double bulk = omega + 3.0 * omega / static_cast<double>(n);
  for (int64_t i = 0; i < n; ++i) vals.push_back(bulk);
  return vals;
}

double adversarial_variance(int64_t n, double omega) {
  const double nn = static_cast<double>(n);
  return 2.0 * omega * omega *
         (1.0 / (nn + 2.0) + (nn + 3.0) * (nn + 3.0) / (nn * (nn + 2.0) * (nn + 2.0)));
}

std::vector<double> normal_values(int64_t n, uint64_t seed, double mu, double sigma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mu, sigma);
  std::vector<double> vals(n);
  for (auto& v : vals) v = dist(rng);
  return vals;
}

std::vector<double> uniform_values(int64_t n, uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> vals(n);
  for (auto& v : vals) v = dist(rng);
  return vals;
}

std::vector<double> heavy_tail_values(int64_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> vals(n);
  for (auto& v : vals) {
    const double u = std::max(unit(rng), 1e-12);
    v = std::pow(u, -1.0 / 1.5);  // Pareto with x_min = 1, alpha = 1.5
  }
  return vals;
}

}  // namespace pqe::testsup
