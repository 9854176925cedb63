// Linearly constrained convex least squares:
//   minimize ||R z - t||^2 + offset   subject to   G z <= h.
// Solved with a primal active-set method; equality-constrained subproblems
// use rank-revealing orthogonal decompositions so singular Hessians are fine.
#pragma once

#include "relu2/core.hpp"

namespace relu2::qp {

struct QuadraticProgram {
  Mat R;            // residual rows: objective sum_i (R.row(i).z - t_i)^2
  Vec t;
  Mat G;            // inequality rows: G z <= h
  Vec h;
  double offset = 0.0;  // constant added to the reported objective
  int n = 0;            // variable count

  void validate() const;
};

enum class QpStatus { Optimal, Infeasible };

struct QpSolution {
  Vec z;
  double objective = 0.0;
  double kkt_residual = 0.0;
  QpStatus status = QpStatus::Optimal;
  double infeasibility = 0.0;  // certificate residual when status == Infeasible
};

inline constexpr double kKktTol = 1e-8;
inline constexpr double kFeasTol = 1e-9;

QpSolution solve_qp(const QuadraticProgram& qp);

}  // namespace relu2::qp
