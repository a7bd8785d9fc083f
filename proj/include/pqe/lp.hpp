#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "pqe/query.hpp"

namespace pqe {

// Equality standard form: minimize c'x subject to Ax = 0, l <= x <= u,
// where A = [-R | I] for the original row matrix R, x = [structural | slack]
// and the slack bounds carry the original row bounds. The identity block is
// implicit; only the structural block (-R) is stored.
struct StandardFormLP {
  int m = 0;        // rows (== slacks)
  int64_t n = 0;    // structural variables
  Eigen::MatrixXd structural;  // m x n block of A, equals -R
  Eigen::VectorXd cost;        // n + m, zeros on slack positions
  Eigen::VectorXd lower, upper;  // n + m
  bool bound_infeasible = false;  // some l_i > u_i

  int64_t total() const { return n + m; }
  bool is_slack(int64_t j) const { return j >= n; }

  // Column j of A applied to v: a_j . v
  double col_dot(int64_t j, const Eigen::VectorXd& v) const {
    if (j < n) return structural.col(j).dot(v);
    return v(j - n);
  }
  // y += a_j * s
  void col_axpy(int64_t j, double s, Eigen::VectorXd& y) const {
    if (j < n)
      y += s * structural.col(j);
    else
      y(j - n) += s;
  }
};

StandardFormLP to_standard_form(const DenseLp& lp);

// Plain-text dump (dimensions, then c/R/l/u/row bounds rows, 17 significant
// digits) for offline cross-checking.
void dump_lp(const DenseLp& lp, std::ostream& os);
std::string dump_lp(const DenseLp& lp);

}  // namespace pqe
