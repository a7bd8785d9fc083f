#include "pqe/query.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pqe {

namespace {
constexpr double kRowTol = 1e-6;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::feasible: return "feasible";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::timeout: return "timeout";
  }
  return "?";
}

int64_t PackageSolution::package_size() const {
  int64_t s = 0;
  for (auto& [id, mult] : multiplicities) s += mult;
  return s;
}

NormalizedQuery normalize_query(const PackageQuery& query, const Relation& relation) {
  NormalizedQuery nq;
  nq.original_sense = query.sense;
  nq.negated_cost = (query.sense == Sense::maximize);
  nq.objective_attr = relation.attr_index(query.objective_attr);
  if (nq.objective_attr < 0)
    throw std::invalid_argument("unknown objective attribute: " + query.objective_attr);

  double max_count_upper = -kInf;
  for (const GlobalConstraint& gc : query.constraints) {
    if (gc.lower == -kInf && gc.upper == kInf)
      throw std::invalid_argument("constraint with both bounds infinite");
    if (gc.lower > gc.upper)
      throw std::invalid_argument("constraint with lower > upper");
    ConstraintRow row;
    switch (gc.kind) {
      case AggKind::count:
        row.kind = RowKind::count;
        row.lower = gc.lower;
        row.upper = gc.upper;
        if (gc.upper < kInf) max_count_upper = std::max(max_count_upper, gc.upper);
        break;
      case AggKind::sum:
        row.kind = RowKind::sum;
        row.attr = relation.attr_index(gc.attr);
        if (row.attr < 0) throw std::invalid_argument("unknown attribute: " + gc.attr);
        row.lower = gc.lower;
        row.upper = gc.upper;
        break;
      case AggKind::avg: {
        // AVG(a) >= t  <=>  sum(a_i - t) >= 0, and symmetrically for <=.
        // A two-sided AVG with unequal thresholds has no single shift.
        row.kind = RowKind::avg_shifted;
        row.attr = relation.attr_index(gc.attr);
        if (row.attr < 0) throw std::invalid_argument("unknown attribute: " + gc.attr);
        const bool has_lo = gc.lower > -kInf;
        const bool has_hi = gc.upper < kInf;
        if (has_lo && has_hi && gc.lower != gc.upper)
          throw std::invalid_argument("AVG constraint with two distinct finite thresholds is unsupported");
        row.shift = has_lo ? gc.lower : gc.upper;
        row.lower = has_lo ? 0.0 : -kInf;
        row.upper = has_hi ? 0.0 : kInf;
        if (has_lo && has_hi) {  // AVG = t
          row.lower = 0.0;
          row.upper = 0.0;
        }
        break;
      }
    }
    nq.rows.push_back(row);
  }

  if (query.repeat.has_value()) {
    if (*query.repeat < 0) throw std::invalid_argument("REPEAT must be non-negative");
    nq.var_upper = static_cast<double>(*query.repeat + 1);
  } else {
    // Unbounded REPEAT: the count constraint (when present) already caps any
    // feasible multiplicity; otherwise fall back to the relation size.
    nq.var_upper = (max_count_upper > -kInf) ? std::ceil(max_count_upper)
                                             : static_cast<double>(relation.n_tuples());
  }
  return nq;
}

FeasibilityReport check_feasible(const PackageSolution& sol, const NormalizedQuery& nq,
                                 const Relation& relation) {
  FeasibilityReport rep;
  for (auto& [id, mult] : sol.multiplicities) {
    if (id < 0 || id >= relation.n_tuples())
      throw std::invalid_argument("multiplicity references invalid tuple id");
    if (mult <= 0)
      throw std::invalid_argument("multiplicities must be positive");
    if (static_cast<double>(mult) > nq.var_upper) {
      rep.feasible = false;
      rep.violations.push_back({-1, id, static_cast<double>(mult),
                                static_cast<double>(mult) - nq.var_upper});
    }
  }
  for (int i = 0; i < nq.m(); ++i) {
    const ConstraintRow& row = nq.rows[i];
    if (row.kind == RowKind::count) {
      int64_t count = 0;
      for (auto& [id, mult] : sol.multiplicities) count += mult;
      const double activity = static_cast<double>(count);
      if (row.lower > -kInf && activity < row.lower)
        rep.violations.push_back({i, -1, activity, row.lower - activity});
      else if (row.upper < kInf && activity > row.upper)
        rep.violations.push_back({i, -1, activity, activity - row.upper});
      continue;
    }
    double activity = 0.0;
    for (auto& [id, mult] : sol.multiplicities)
      activity += row.coeff(relation, id) * static_cast<double>(mult);
    if (row.lower > -kInf && activity < row.lower - kRowTol)
      rep.violations.push_back({i, -1, activity, row.lower - activity});
    else if (row.upper < kInf && activity > row.upper + kRowTol)
      rep.violations.push_back({i, -1, activity, activity - row.upper});
  }
  rep.feasible = rep.feasible && rep.violations.empty();
  return rep;
}

GapResult integrality_gap(double ilp_obj, double lp_obj, Sense sense) {
  constexpr double eps = 0.1;
  double num, den;
  if (sense == Sense::maximize) {
    num = lp_obj + eps;
    den = ilp_obj + eps;
  } else {
    num = ilp_obj + eps;
    den = lp_obj + eps;
  }
  if (den <= 0.0) return {std::numeric_limits<double>::quiet_NaN(), false};
  return {num / den, true};
}

DenseLp make_dense_lp(const NormalizedQuery& nq, const Relation& rel,
                      std::span<const int64_t> subset) {
  DenseLp lp;
  const int64_t n = static_cast<int64_t>(subset.size());
  const int m = nq.m();
  lp.rows.resize(m, n);
  lp.cost.resize(n);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, nq.var_upper);
  lp.row_lower.resize(m);
  lp.row_upper.resize(m);
  for (int i = 0; i < m; ++i) {
    lp.row_lower(i) = nq.rows[i].lower;
    lp.row_upper(i) = nq.rows[i].upper;
  }
  for (int64_t c = 0; c < n; ++c) {
    const int64_t id = subset[c];
    lp.cost(c) = nq.cost(rel, id);
    for (int i = 0; i < m; ++i) lp.rows(i, c) = nq.rows[i].coeff(rel, id);
  }
  return lp;
}

std::vector<int64_t> all_tuple_ids(const Relation& rel) {
  std::vector<int64_t> ids(rel.n_tuples());
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

}  // namespace pqe
