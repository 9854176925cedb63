// Small dense linear programming: two-phase primal simplex.
// Problems here are tiny (tens of rows/columns); robustness and determinism
// matter more than asymptotics.
#pragma once

#include "relu2/core.hpp"

namespace relu2::lp {

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Result {
  Status status = Status::IterationLimit;
  Vec x;           // primal solution (free variables)
  double value = 0.0;
};

// max c.x  subject to  G x <= h, x free.
Result solve_max(const Vec& c, const Mat& G, const Vec& h);

}  // namespace relu2::lp
