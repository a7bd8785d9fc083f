#include "pqe/lp.hpp"

#include <ostream>
#include <sstream>

namespace pqe {

StandardFormLP to_standard_form(const DenseLp& lp) {
  StandardFormLP sf;
  sf.m = lp.m();
  sf.n = lp.n();
  sf.structural = -lp.rows;
  sf.cost = Eigen::VectorXd::Zero(sf.n + sf.m);
  sf.cost.head(sf.n) = lp.cost;
  sf.lower.resize(sf.n + sf.m);
  sf.upper.resize(sf.n + sf.m);
  sf.lower.head(sf.n) = lp.lower;
  sf.upper.head(sf.n) = lp.upper;
  sf.lower.tail(sf.m) = lp.row_lower;
  sf.upper.tail(sf.m) = lp.row_upper;
  for (int64_t i = 0; i < sf.total(); ++i)
    if (sf.lower(i) > sf.upper(i)) sf.bound_infeasible = true;
  return sf;
}

void dump_lp(const DenseLp& lp, std::ostream& os) {
  os.precision(17);
  os << "lp " << lp.m() << " " << lp.n() << "\n";
  os << "c";
  for (int64_t j = 0; j < lp.n(); ++j) os << " " << lp.cost(j);
  os << "\n";
  for (int i = 0; i < lp.m(); ++i) {
    os << "r " << lp.row_lower(i) << " " << lp.row_upper(i);
    for (int64_t j = 0; j < lp.n(); ++j) os << " " << lp.rows(i, j);
    os << "\n";
  }
  os << "l";
  for (int64_t j = 0; j < lp.n(); ++j) os << " " << lp.lower(j);
  os << "\nu";
  for (int64_t j = 0; j < lp.n(); ++j) os << " " << lp.upper(j);
  os << "\n";
}

std::string dump_lp(const DenseLp& lp) {
  std::ostringstream os;
  dump_lp(lp, os);
  return os.str();
}

}  // namespace pqe
