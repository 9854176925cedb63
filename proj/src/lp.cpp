#include "relu2/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace relu2::lp {

namespace {

constexpr double kCostEps = 1e-10;
constexpr double kPivotEps = 1e-11;
constexpr double kFeasEps = 1e-8;

// Dense simplex tableau over standard form  min c.x, A x = b, x >= 0.
struct Tableau {
  Mat t;                  // (m+1) x (ncols+1); last row = reduced costs, last col = rhs
  std::vector<int> basis; // basic variable per row
  int m, ncols;

  double& at(int i, int j) { return t(i, j); }
  double rhs(int i) const { return t(i, ncols); }

  void pivot(int row, int col) {
    t.row(row) /= t(row, col);
    for (int i = 0; i <= m; ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    basis[row] = col;
  }

  // Returns Optimal/Unbounded/IterationLimit for the current cost row.
  // `allowed` masks columns that may enter the basis.
  Status run(const std::vector<char>& allowed) {
    const int max_iters = 200 * (m + ncols + 1);
    for (int iter = 0; iter < max_iters; ++iter) {
      const bool bland = iter > 4 * (m + ncols);
      int enter = -1;
      double best = -kCostEps;
      for (int j = 0; j < ncols; ++j) {
        if (!allowed[j]) continue;
        const double r = t(m, j);
        if (r < best) {
          enter = j;
          if (bland) break;  // first eligible column
          best = r;
        }
      }
      if (enter < 0) return Status::Optimal;

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = t(i, enter);
        if (a > kPivotEps) {
          const double ratio = rhs(i) / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0) return Status::Unbounded;
      pivot(leave, enter);
    }
    return Status::IterationLimit;
  }
};

}  // namespace

Result solve_max(const Vec& c, const Mat& G, const Vec& h) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(G.rows());
  Result res;
  if (m == 0) {
    // No constraints: optimum is 0 only if c == 0, otherwise unbounded.
    res.x = Vec::Zero(n);
    if (c.lpNorm<Eigen::Infinity>() > 0.0) {
      res.status = Status::Unbounded;
    } else {
      res.status = Status::Optimal;
      res.value = 0.0;
    }
    return res;
  }

  // Standard form: x = u - v, slack s:  [G -G I](u,v,s) = h, all parts >= 0.
  const int n_struct = 2 * n + m;
  const int ncols = n_struct + m;  // + artificials
  Tableau tb;
  tb.m = m;
  tb.ncols = ncols;
  tb.t = Mat::Zero(m + 1, ncols + 1);
  tb.basis.assign(m, 0);

  for (int i = 0; i < m; ++i) {
    const double sgn = h[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tb.t(i, j) = sgn * G(i, j);
      tb.t(i, n + j) = -sgn * G(i, j);
    }
    tb.t(i, 2 * n + i) = sgn;            // slack
    tb.t(i, n_struct + i) = 1.0;         // artificial
    tb.t(i, ncols) = sgn * h[i];
    tb.basis[i] = n_struct + i;
  }

  // Phase 1: minimize the artificial sum. Reduced costs start as the negated
  // column sums since every artificial is basic with cost 1.
  for (int j = 0; j <= ncols; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += tb.t(i, j);
    tb.t(m, j) = (j >= n_struct && j < ncols) ? 0.0 : -s;
  }

  std::vector<char> allowed(ncols, 1);
  Status st = tb.run(allowed);
  if (st != Status::Optimal) {
    res.status = st;
    return res;
  }
  const double infeas = -tb.t(m, ncols);
  if (infeas > kFeasEps) {
    res.status = Status::Infeasible;
    res.value = infeas;
    return res;
  }

  // Drive leftover basic artificials out; redundant rows keep them at zero.
  for (int i = 0; i < m; ++i) {
    if (tb.basis[i] < n_struct) continue;
    int col = -1;
    for (int j = 0; j < n_struct; ++j) {
      if (std::abs(tb.t(i, j)) > 1e-9) {
        col = j;
        break;
      }
    }
    if (col >= 0) tb.pivot(i, col);
  }

  // Phase 2 cost row: minimize -c.(u - v).
  Vec cost = Vec::Zero(ncols);
  for (int j = 0; j < n; ++j) {
    cost[j] = -c[j];
    cost[n + j] = c[j];
  }
  for (int j = 0; j <= ncols; ++j) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const int b = tb.basis[i];
      if (b < ncols && cost[b] != 0.0) s += cost[b] * tb.t(i, j);
    }
    tb.t(m, j) = (j < ncols ? cost[j] : 0.0) - s;
  }
  for (int j = n_struct; j < ncols; ++j) allowed[j] = 0;
  // Rows whose artificial stayed basic are redundant; freeze them by leaving
  // the artificial unpriced (it never re-enters, and degenerate ratio ties
  // keep it at level zero).

  st = tb.run(allowed);
  if (st != Status::Optimal) {
    res.status = st;
    return res;
  }

  res.x = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    const int b = tb.basis[i];
    if (b < n) res.x[b] += tb.rhs(i);
    else if (b < 2 * n) res.x[b - n] -= tb.rhs(i);
  }
  res.value = c.dot(res.x);
  res.status = Status::Optimal;
  return res;
}

}  // namespace relu2::lp
