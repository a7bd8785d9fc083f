#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pqe/relation.hpp"

namespace pqe::testsup {

Relation make_relation(std::vector<std::pair<std::string, std::vector<double>>> cols);

// The adversarial 1-D family: one -omega, one omega, n copies of
// omega + 3*omega/n.
std::vector<double> adversarial_set(int64_t n, double omega);
double adversarial_variance(int64_t n, double omega);

// Seeded draws from a few 1-D families.
std::vector<double> normal_values(int64_t n, uint64_t seed, double mu = 0.0,
                                  double sigma = 1.0);
std::vector<double> uniform_values(int64_t n, uint64_t seed, double lo = 0.0,
                                   double hi = 1.0);
std::vector<double> heavy_tail_values(int64_t n, uint64_t seed);  // Pareto(1.5)

}  // namespace pqe::testsup
