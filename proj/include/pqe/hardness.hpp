#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pqe/query.hpp"

namespace pqe {

// Standard normal CDF and its inverse (Wichura's AS241, |err| < 1e-10).
double normal_cdf(double x);
double normal_quantile(double p);

enum class BoundDirection { geq, leq, between_symmetric };

struct HardnessConstraint {
  BoundDirection direction = BoundDirection::geq;
  double mu = 0.0;     // attribute mean
  double sigma = 1.0;  // attribute standard deviation
};

struct HardnessSpec {
  double hardness = 1.0;      // h~ > 0
  double package_size = 30.0; // E, expected tuples in a solution
  std::vector<HardnessConstraint> constraints;
};

struct DerivedBound {
  double lower = -kInf;
  double upper = kInf;
};

// Per-constraint bounds such that a random E-tuple sample satisfies each
// constraint with probability 10^(-h/m); the satisfaction probabilities
// multiply to 10^(-h).
std::vector<DerivedBound> derive_bounds(const HardnessSpec& spec);

// Satisfaction probability of one derived constraint (CDF round trip).
double constraint_probability(const HardnessConstraint& c, const DerivedBound& b,
                              double package_size);

// Benchmark query templates: 15 <= COUNT <= 45, three sum constraints with
// hardness-derived bounds, REPEAT 0, and a sum objective.
struct BenchTemplate {
  std::string name;
  Sense sense = Sense::minimize;
  std::string objective_attr;
  double objective_mu = 0.0, objective_sigma = 1.0;
  double objective_zero_fraction = 0.0;  // zero-inflated objective column
  std::vector<std::string> attrs;        // constraint attributes, in order
  std::vector<HardnessConstraint> constraints;
};

BenchTemplate sdss_template();
BenchTemplate tpch_template();

PackageQuery make_bench_query(const BenchTemplate& tpl, double hardness,
                              double package_size = 30.0);

}  // namespace pqe
