#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pqe/relation.hpp"

namespace pqe {

enum class Sense { minimize, maximize };
enum class AggKind { count, sum, avg };

// Per-tuple selection predicate. Parsed from the WHERE clause but rejected
// at execution time; kept so the rejection can name the offending predicate.
struct LocalPredicate {
  std::string attr;
  std::string op;
  std::string value_text;
  bool operator==(const LocalPredicate&) const = default;
};

// COUNT/SUM/AVG bound over the whole package. COUNT carries no attribute.
struct GlobalConstraint {
  AggKind kind = AggKind::count;
  std::string attr;
  double lower = -kInf;
  double upper = kInf;
  bool operator==(const GlobalConstraint&) const = default;
};

struct PackageQuery {
  std::string package_alias = "P";
  std::string table;
  Sense sense = Sense::minimize;
  std::string objective_attr;
  std::vector<GlobalConstraint> constraints;
  // REPEAT r allows r extra copies of a tuple (multiplicity <= r+1).
  // Absent means unbounded repetition.
  std::optional<int64_t> repeat;
  std::vector<LocalPredicate> where;
  bool operator==(const PackageQuery&) const = default;
};

enum class RowKind { count, sum, avg_shifted };

// One linear row of the normalized system. Coefficients are implicit:
//   count:       1 for every tuple
//   sum:         the attribute column
//   avg_shifted: attribute column minus `shift`
struct ConstraintRow {
  RowKind kind = RowKind::count;
  int attr = -1;
  double shift = 0.0;
  double lower = -kInf;
  double upper = kInf;

  double coeff(const Relation& rel, int64_t tuple) const {
    switch (kind) {
      case RowKind::count: return 1.0;
      case RowKind::sum: return rel.value(tuple, attr);
      case RowKind::avg_shifted: return rel.value(tuple, attr) - shift;
    }
    return 0.0;
  }
};

// Minimization-oriented linear form of a PackageQuery. Row and cost
// coefficients are generated from relation columns on demand; any layer
// relation with the same schema can be plugged in.
struct NormalizedQuery {
  Sense original_sense = Sense::minimize;
  int objective_attr = -1;
  bool negated_cost = false;  // true when the original query maximizes
  std::vector<ConstraintRow> rows;
  double var_upper = 1.0;  // uniform multiplicity cap u_i

  int m() const { return static_cast<int>(rows.size()); }

  double cost(const Relation& rel, int64_t tuple) const {
    const double v = rel.value(tuple, objective_attr);
    return negated_cost ? -v : v;
  }

  // Internal (minimization) objective -> value in the query's original sense.
  double report_objective(double internal) const { return negated_cost ? -internal : internal; }
};

// Dense materialization of a normalized query over a tuple subset,
// ready for standard-form conversion.
struct DenseLp {
  Eigen::MatrixXd rows;  // m x n
  Eigen::VectorXd cost;
  Eigen::VectorXd lower, upper;
  Eigen::VectorXd row_lower, row_upper;
  int64_t n() const { return cost.size(); }
  int m() const { return static_cast<int>(rows.rows()); }
};

enum class SolveStatus { optimal, feasible, infeasible, timeout };

const char* to_string(SolveStatus s);

struct PackageSolution {
  std::map<int64_t, int64_t> multiplicities;  // tuple id -> positive count
  double objective = 0.0;                     // in the query's original sense
  SolveStatus status = SolveStatus::infeasible;
  // Diagnostics
  double lp_bound = std::numeric_limits<double>::quiet_NaN();  // original sense
  int fallback_iterations = 0;
  int64_t package_size() const;
};

struct RowViolation {
  int row = -1;       // -1 marks a variable-cap violation
  int64_t tuple = -1; // set for variable-cap violations
  double activity = 0.0;
  double slack = 0.0; // distance to the violated bound
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<RowViolation> violations;
};

// normalize_query: validates attribute references, folds AVG thresholds into
// shifted rows, negates a maximize objective, and derives the multiplicity cap.
// Throws std::invalid_argument on unknown attributes or unsupported AVG forms.
NormalizedQuery normalize_query(const PackageQuery& query, const Relation& relation);

// Exact integer arithmetic on multiplicities and counts; absolute tolerance
// 1e-6 on real-valued row bounds.
FeasibilityReport check_feasible(const PackageSolution& sol, const NormalizedQuery& nq,
                                 const Relation& relation);

struct GapResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
};

// Epsilon-shifted ILP/LP objective ratio, oriented so a valid bound gives
// a value >= 1 for both senses. Both objectives are in the original sense.
GapResult integrality_gap(double ilp_obj, double lp_obj, Sense sense);

// Materializes the dense LP over `subset` (tuple ids into `rel`).
DenseLp make_dense_lp(const NormalizedQuery& nq, const Relation& rel,
                      std::span<const int64_t> subset);

std::vector<int64_t> all_tuple_ids(const Relation& rel);

}  // namespace pqe
