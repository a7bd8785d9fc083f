#include "pqe/hardness.hpp"

#include <cmath>
#include <stdexcept>

namespace pqe {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// AS241 PPND16.
double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs p in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

std::vector<DerivedBound> derive_bounds(const HardnessSpec& spec) {
  if (!(spec.hardness > 0.0)) throw std::invalid_argument("hardness must be positive");
  if (spec.package_size < 1.0) throw std::invalid_argument("package size must be >= 1");
  const double m = static_cast<double>(spec.constraints.size());
  const double p = std::pow(10.0, -spec.hardness / m);
  std::vector<DerivedBound> bounds;
  bounds.reserve(spec.constraints.size());
  for (const HardnessConstraint& c : spec.constraints) {
    if (!(c.sigma > 0.0)) throw std::invalid_argument("constraint sigma must be positive");
    const double center = spec.package_size * c.mu;
    const double scale = std::sqrt(spec.package_size) * c.sigma;
    DerivedBound b;
    switch (c.direction) {
      case BoundDirection::geq:
        b.lower = center + scale * normal_quantile(1.0 - p);
        break;
      case BoundDirection::leq:
        b.upper = center + scale * normal_quantile(p);
        break;
      case BoundDirection::between_symmetric: {
        const double z = normal_quantile((1.0 + p) / 2.0);
        b.lower = center - scale * z;
        b.upper = center + scale * z;
        break;
      }
    }
    bounds.push_back(b);
  }
  return bounds;
}

double constraint_probability(const HardnessConstraint& c, const DerivedBound& b,
                              double package_size) {
  const double center = package_size * c.mu;
  const double scale = std::sqrt(package_size) * c.sigma;
  const double zlo = b.lower > -kInf ? (b.lower - center) / scale : -kInf;
  const double zhi = b.upper < kInf ? (b.upper - center) / scale : kInf;
  const double plo = zlo > -kInf ? normal_cdf(zlo) : 0.0;
  const double phi = zhi < kInf ? normal_cdf(zhi) : 1.0;
  return phi - plo;
}

BenchTemplate sdss_template() {
  BenchTemplate t;
  t.name = "sdss";
  t.sense = Sense::minimize;
  t.objective_attr = "tmass_prox";
  t.objective_mu = 14.45;
  t.objective_sigma = 14.96;
  t.objective_zero_fraction = 0.3;
  t.attrs = {"j", "h", "k"};
  t.constraints = {{BoundDirection::geq, 14.82, 1.562},
                   {BoundDirection::leq, 14.05, 1.657},
                   {BoundDirection::between_symmetric, 13.73, 1.727}};
  return t;
}

BenchTemplate tpch_template() {
  BenchTemplate t;
  t.name = "tpch";
  t.sense = Sense::maximize;
  t.objective_attr = "price";
  t.objective_mu = 38240.0;
  t.objective_sigma = 23290.0;
  t.attrs = {"quantity", "discount", "tax"};
  t.constraints = {{BoundDirection::geq, 25.50, 14.43},
                   {BoundDirection::leq, 1912.0, 1833.0},
                   {BoundDirection::between_symmetric, 1530.0, 1485.0}};
  return t;
}

PackageQuery make_bench_query(const BenchTemplate& tpl, double hardness,
                              double package_size) {
  HardnessSpec spec;
  spec.hardness = hardness;
  spec.package_size = package_size;
  spec.constraints = tpl.constraints;
  const std::vector<DerivedBound> bounds = derive_bounds(spec);

  PackageQuery q;
  q.table = tpl.name;
  q.sense = tpl.sense;
  q.objective_attr = tpl.objective_attr;
  q.repeat = 0;
  q.constraints.push_back({AggKind::count, "", 15.0, 45.0});
  for (size_t i = 0; i < tpl.attrs.size(); ++i)
    q.constraints.push_back({AggKind::sum, tpl.attrs[i], bounds[i].lower, bounds[i].upper});
  return q;
}

}  // namespace pqe
