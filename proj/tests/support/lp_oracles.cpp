#include "support/lp_oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace pqe::testsup {

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kAmbTol = 1e-9;

// Column j of A = [-R | I].
void fill_col(const StandardFormLP& sf, int64_t j, Eigen::VectorXd& out) {
  out.setZero();
  if (j < sf.n)
    out = sf.structural.col(j);
  else
    out(j - sf.n) = 1.0;
}

}  // namespace

OracleResult vertex_enumeration_oracle(const DenseLp& lp) {
  const StandardFormLP sf = to_standard_form(lp);
  const int m = sf.m;
  const int64_t total = sf.total();
  OracleResult best;
  best.objective = kInf;

  if (sf.bound_infeasible) return best;
  if (m == 0) {
    best.feasible = true;
    best.objective = 0.0;
    for (int64_t j = 0; j < sf.n; ++j)
      best.objective += sf.cost(j) * (sf.cost(j) >= 0.0 ? sf.lower(j) : sf.upper(j));
    return best;
  }

  std::vector<int64_t> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = i;

  Eigen::MatrixXd ab(m, m);
  Eigen::VectorXd col(m);

  auto evaluate = [&](const std::vector<int64_t>& b) {
    for (int i = 0; i < m; ++i) {
      fill_col(sf, b[i], col);
      ab.col(i) = col;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ab);
    if (!lu.isInvertible()) return;
    const Eigen::MatrixXd binv = lu.inverse();

    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = sf.cost(b[i]);
    const Eigen::VectorXd y = binv.transpose() * cb;

    std::vector<char> is_basic(total, 0);
    for (int64_t j : b) is_basic[j] = 1;

    std::vector<int64_t> nonbasic, ambiguous;
    std::vector<double> d(total, 0.0);
    for (int64_t j = 0; j < total; ++j) {
      if (is_basic[j]) continue;
      fill_col(sf, j, col);
      d[j] = sf.cost(j) - col.dot(y);
      nonbasic.push_back(j);
      if (std::abs(d[j]) <= kAmbTol) ambiguous.push_back(j);
    }
    if (ambiguous.size() > 12) ambiguous.resize(12);

    const int64_t combos = int64_t{1} << ambiguous.size();
    for (int64_t mask = 0; mask < combos; ++mask) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(total);
      bool ok = true;
      for (int64_t j : nonbasic) {
        bool at_lower = d[j] > kAmbTol;
        if (std::abs(d[j]) <= kAmbTol) {
          size_t idx = std::find(ambiguous.begin(), ambiguous.end(), j) - ambiguous.begin();
          at_lower = idx >= ambiguous.size() ? true : ((mask >> idx) & 1) == 0;
        } else if (d[j] < -kAmbTol) {
          at_lower = false;
        }
        const double v = at_lower ? sf.lower(j) : sf.upper(j);
        if (!std::isfinite(v)) {
          ok = false;
          break;
        }
        x(j) = v;
      }
      if (!ok) continue;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
      for (int64_t j : nonbasic) {
        if (x(j) == 0.0) continue;
        fill_col(sf, j, col);
        rhs += col * x(j);
      }
      const Eigen::VectorXd xb = -(binv * rhs);
      for (int i = 0; i < m; ++i) x(b[i]) = xb(i);
      bool feas = true;
      for (int64_t j = 0; j < total && feas; ++j)
        feas = x(j) >= sf.lower(j) - kFeasTol && x(j) <= sf.upper(j) + kFeasTol;
      if (!feas) continue;
      double obj = 0.0;
      for (int64_t j = 0; j < sf.n; ++j) obj += sf.cost(j) * x(j);
      best.feasible = true;
      best.objective = std::min(best.objective, obj);
    }
  };

  // Lexicographic enumeration of all bases.
  while (true) {
    evaluate(basis);
    int i = m - 1;
    while (i >= 0 && basis[i] == total - m + i) --i;
    if (i < 0) break;
    ++basis[i];
    for (int j = i + 1; j < m; ++j) basis[j] = basis[j - 1] + 1;
  }
  return best;
}

OracleResult tableau_simplex_oracle(const DenseLp& lp) {
  OracleResult res;
  const int64_t n = lp.n();
  const int m = lp.m();

  for (int64_t j = 0; j < n; ++j)
    if (lp.lower(j) > lp.upper(j)) return res;
  for (int i = 0; i < m; ++i)
    if (lp.row_lower(i) > lp.row_upper(i)) return res;

  // Shift to x' = x - l >= 0 and collect <= rows.
  std::vector<std::vector<double>> g;
  std::vector<double> h;
  const Eigen::VectorXd base_act = lp.rows * lp.lower;
  for (int i = 0; i < m; ++i) {
    if (lp.row_upper(i) < kInf) {
      std::vector<double> row(n);
      for (int64_t j = 0; j < n; ++j) row[j] = lp.rows(i, j);
      g.push_back(std::move(row));
      h.push_back(lp.row_upper(i) - base_act(i));
    }
    if (lp.row_lower(i) > -kInf) {
      std::vector<double> row(n);
      for (int64_t j = 0; j < n; ++j) row[j] = -lp.rows(i, j);
      g.push_back(std::move(row));
      h.push_back(-(lp.row_lower(i) - base_act(i)));
    }
  }
  for (int64_t j = 0; j < n; ++j) {
    std::vector<double> row(n, 0.0);
    row[j] = 1.0;
    g.push_back(std::move(row));
    h.push_back(lp.upper(j) - lp.lower(j));
  }

  const int rows = static_cast<int>(g.size());
  // Tableau columns: n structural + rows slacks + up to `rows` artificials + rhs.
  int art = 0;
  for (int i = 0; i < rows; ++i)
    if (h[i] < 0.0) ++art;
  const int cols = static_cast<int>(n) + rows + art + 1;
  std::vector<std::vector<double>> tab(rows + 2, std::vector<double>(cols, 0.0));
  std::vector<int> basis(rows);

  int next_art = static_cast<int>(n) + rows;
  for (int i = 0; i < rows; ++i) {
    const double sign = h[i] < 0.0 ? -1.0 : 1.0;
    for (int64_t j = 0; j < n; ++j) tab[i][j] = sign * g[i][j];
    tab[i][n + i] = sign;  // slack
    tab[i][cols - 1] = sign * h[i];
    if (h[i] < 0.0) {
      tab[i][next_art] = 1.0;
      basis[i] = next_art++;
    } else {
      basis[i] = static_cast<int>(n) + i;
    }
  }
  // Row rows: phase-2 objective; row rows+1: phase-1 objective (min sum of
  // artificials), canonicalized against the artificial basics.
  for (int64_t j = 0; j < n; ++j) tab[rows][j] = lp.cost(j);
  for (int c = static_cast<int>(n) + rows; c < cols - 1; ++c) tab[rows + 1][c] = 1.0;
  for (int i = 0; i < rows; ++i)
    if (basis[i] >= static_cast<int>(n) + rows)
      for (int c = 0; c < cols; ++c) tab[rows + 1][c] -= tab[i][c];

  const int phase1_row = rows + 1, phase2_row = rows;
  auto pivot = [&](int pr, int pc) {
    const double pv = tab[pr][pc];
    for (int c = 0; c < cols; ++c) tab[pr][c] /= pv;
    for (int r = 0; r < rows + 2; ++r) {
      if (r == pr) continue;
      const double f = tab[r][pc];
      if (f == 0.0) continue;
      for (int c = 0; c < cols; ++c) tab[r][c] -= f * tab[pr][c];
    }
    basis[pr] = pc;
  };

  auto run_phase = [&](int obj_row, int allowed_cols, int64_t max_iters) {
    int64_t stall = 0;
    double last = kInf;
    for (int64_t it = 0; it < max_iters; ++it) {
      // Dantzig rule; Bland's rule after a stall.
      int pc = -1;
      const bool bland = stall > 2 * (rows + allowed_cols);
      double most = -1e-9;
      for (int c = 0; c < allowed_cols; ++c) {
        const double red = tab[obj_row][c];
        if (red < -1e-9) {
          if (bland) {
            pc = c;
            break;
          }
          if (red < most) {
            most = red;
            pc = c;
          }
        }
      }
      if (pc < 0) return true;  // optimal for this phase
      int pr = -1;
      double best_ratio = kInf;
      for (int r = 0; r < rows; ++r) {
        if (tab[r][pc] > 1e-9) {
          const double ratio = tab[r][cols - 1] / tab[r][pc];
          if (ratio < best_ratio - 1e-12 ||
              (std::abs(ratio - best_ratio) <= 1e-12 && (pr < 0 || basis[r] < basis[pr]))) {
            best_ratio = ratio;
            pr = r;
          }
        }
      }
      if (pr < 0) return false;  // unbounded phase objective
      pivot(pr, pc);
      const double cur = tab[obj_row][cols - 1];
      if (cur < last - 1e-12)
        stall = 0;
      else
        ++stall;
      last = cur;
    }
    return true;  // iteration cap: treat current point as the answer
  };

  // Phase 1 over every non-artificial and artificial column.
  if (art > 0) {
    run_phase(phase1_row, cols - 1, 200000);
    if (tab[phase1_row][cols - 1] < -1e-6) return res;  // infeasible
    // Drive any artificial still in the basis out when possible.
    for (int r = 0; r < rows; ++r) {
      if (basis[r] < static_cast<int>(n) + rows) continue;
      for (int c = 0; c < static_cast<int>(n) + rows; ++c)
        if (std::abs(tab[r][c]) > 1e-9) {
          pivot(r, c);
          break;
        }
    }
  }

  if (!run_phase(phase2_row, static_cast<int>(n) + rows, 200000))
    return res;  // unbounded: cannot happen with finite boxes

  res.feasible = true;
  // Objective of the shifted problem plus the constant part c'l.
  res.objective = -tab[phase2_row][cols - 1] + lp.cost.dot(lp.lower);
  return res;
}

DenseLp random_lp(uint64_t seed, const RandomLpParams& params) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> n_pick(params.min_n, params.max_n);
  std::uniform_int_distribution<int> m_pick(params.min_m, params.max_m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  DenseLp lp;
  const int64_t n = n_pick(rng);
  int m = m_pick(rng);
  if (params.sometimes_box_only && unit(rng) < 0.05) m = 0;

  lp.cost.resize(n);
  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper.resize(n);
  for (int64_t j = 0; j < n; ++j) {
    lp.cost(j) = gauss(rng);
    lp.upper(j) = 1.0 + 2.0 * unit(rng);
  }
  lp.rows.resize(m, n);
  lp.row_lower.resize(m);
  lp.row_upper.resize(m);
  for (int i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) lp.rows(i, j) = gauss(rng);

  const double mode = unit(rng);
  Eigen::VectorXd x0(n);
  for (int64_t j = 0; j < n; ++j) x0(j) = unit(rng) * lp.upper(j);
  for (int i = 0; i < m; ++i) {
    const double act = lp.rows.row(i).dot(x0);
    double lo, hi;
    if (mode < 0.5) {  // anchored around a feasible interior point
      lo = act - (0.1 + unit(rng)) * std::sqrt(static_cast<double>(n));
      hi = act + (0.1 + unit(rng)) * std::sqrt(static_cast<double>(n));
    } else if (mode < 0.8) {  // free draw, feasibility undetermined
      const double a = act + gauss(rng) * std::sqrt(static_cast<double>(n));
      const double b = act + gauss(rng) * std::sqrt(static_cast<double>(n));
      lo = std::min(a, b);
      hi = std::max(a, b);
    } else {  // push one row past its achievable range
      double reach = 0.0;
      for (int64_t j = 0; j < n; ++j) reach += std::max(lp.rows(i, j) * lp.upper(j), 0.0);
      if (i == 0) {
        lo = reach + 0.5 + unit(rng);
        hi = kInf;
        lp.row_lower(i) = lo;
        lp.row_upper(i) = hi;
        continue;
      }
      const double a = act + gauss(rng) * std::sqrt(static_cast<double>(n));
      const double b = act + gauss(rng) * std::sqrt(static_cast<double>(n));
      lo = std::min(a, b);
      hi = std::max(a, b);
    }
    if (unit(rng) < 0.25) lo = -kInf;
    if (unit(rng) < 0.25) hi = kInf;
    if (lo == -kInf && hi == kInf) hi = act;  // keep at least one side
    lp.row_lower(i) = lo;
    lp.row_upper(i) = hi;
  }
  return lp;
}

}  // namespace pqe::testsup
