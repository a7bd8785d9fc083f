#include "pqe/datagen.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace pqe {

namespace {

uint64_t mix(uint64_t a, uint64_t b) {
  uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  return x;
}

}  // namespace

Relation generate_relation(const RelationSpec& spec, uint64_t seed) {
  Relation rel;
  const int k = static_cast<int>(spec.columns.size());
  const double rho = spec.correlation;
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("correlation must lie in [0, 1)");

  // Common-factor Gaussian copula: z_j = sqrt(rho) * g + sqrt(1-rho) * e_j.
  std::vector<double> shared;
  if (rho > 0.0) {
    shared.resize(spec.n);
    std::mt19937_64 rng(mix(seed, 0xc0ffee));
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int64_t i = 0; i < spec.n; ++i) shared[i] = gauss(rng);
  }

  for (int j = 0; j < k; ++j) {
    const ColumnSpec& cs = spec.columns[j];
    std::mt19937_64 rng(mix(seed, static_cast<uint64_t>(j) + 1));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> col(spec.n);

    auto draw_z = [&](int64_t i) {
      const double e = gauss(rng);
      if (rho > 0.0) return std::sqrt(rho) * shared[i] + std::sqrt(1.0 - rho) * e;
      return e;
    };

    switch (cs.family) {
      case ColumnFamily::normal:
        for (int64_t i = 0; i < spec.n; ++i) col[i] = cs.mu + cs.sigma * draw_z(i);
        break;
      case ColumnFamily::uniform: {
        // Uniform with the requested mean and standard deviation.
        const double half = cs.sigma * std::sqrt(3.0);
        for (int64_t i = 0; i < spec.n; ++i)
          col[i] = cs.mu - half + 2.0 * half * unit(rng);
        break;
      }
      case ColumnFamily::zero_inflated_lognormal: {
        const double pi = cs.zero_fraction;
        if (pi < 0.0 || pi >= 1.0)
          throw std::invalid_argument("zero fraction must lie in [0, 1)");
        // Mixture calibration: the nonzero lognormal component is chosen so
        // the final column keeps mu and sigma while staying nonnegative.
        const double mean0 = cs.mu / (1.0 - pi);
        const double second0 = (cs.sigma * cs.sigma + cs.mu * cs.mu) / (1.0 - pi);
        if (mean0 <= 0.0 || second0 <= mean0 * mean0)
          throw std::invalid_argument("zero fraction incompatible with mu/sigma for " +
                                      cs.name);
        const double s2 = std::log(second0 / (mean0 * mean0));
        const double m0 = std::log(mean0) - s2 / 2.0;
        const double s0 = std::sqrt(s2);
        for (int64_t i = 0; i < spec.n; ++i)
          col[i] = unit(rng) < pi ? 0.0 : std::exp(m0 + s0 * draw_z(i));
        break;
      }
    }
    rel.add_column(cs.name, std::move(col));
  }
  return rel;
}

RelationSpec bench_relation_spec(const BenchTemplate& tpl, int64_t n) {
  RelationSpec spec;
  spec.n = n;
  ColumnSpec obj;
  obj.name = tpl.objective_attr;
  obj.mu = tpl.objective_mu;
  obj.sigma = tpl.objective_sigma;
  if (tpl.objective_zero_fraction > 0.0) {
    obj.family = ColumnFamily::zero_inflated_lognormal;
    obj.zero_fraction = tpl.objective_zero_fraction;
  }
  spec.columns.push_back(obj);
  for (size_t i = 0; i < tpl.attrs.size(); ++i) {
    ColumnSpec cs;
    cs.name = tpl.attrs[i];
    cs.mu = tpl.constraints[i].mu;
    cs.sigma = tpl.constraints[i].sigma;
    spec.columns.push_back(cs);
  }
  return spec;
}

}  // namespace pqe
