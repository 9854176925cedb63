// Globally optimal training of the two-node ReLU network at small fixed
// dimension: enumerate hyperplane-realizable activation patterns, solve one
// convex least-squares subprogram per pattern, keep the best.
#pragma once

#include "relu2/core.hpp"
#include "relu2/geometry.hpp"
#include "relu2/qp.hpp"

#include <cstdint>
#include <limits>
#include <optional>

namespace relu2::exact {

using Mask = uint64_t;  // bitmask over data indices; the trainer caps N at 64

struct BudgetExceeded : std::runtime_error {
  unsigned long long planned;  // would-be subproblem count (0 for cap refusals)
  BudgetExceeded(const std::string& msg, unsigned long long planned_count)
      : std::runtime_error(msg), planned(planned_count) {}
};

// Which side of each hyperplane every point sits on, which side of the
// second-layer argument each point of T1/T2/T3 sits on, and the sign choices.
struct ActivationPattern {
  Mask q1_plus = 0, q2_plus = 0;   // a1(x) >= 0 / a2(x) >= 0
  Mask t11 = 0, t21 = 0, t31 = 0;  // subsets of T1/T2/T3 with nonnegative argument
  int theta = 1, w1 = 1, w2 = 1;   // in {-1,+1}
  bool w0_nonneg = true;
  int n = 0;

  Mask all() const { return n >= 64 ? ~Mask(0) : ((Mask(1) << n) - 1); }
  Mask t1() const { return q1_plus & q2_plus & all(); }
  Mask t2() const { return ~q1_plus & q2_plus & all(); }
  Mask t3() const { return q1_plus & ~q2_plus & all(); }
  Mask t4() const { return ~(q1_plus | q2_plus) & all(); }
};

struct TrainConfig {
  double tol = 1e-8;
  // Binary labels only: pin the second-layer splits from the labels. Sound
  // for the zero-loss decision; the reported loss is then an upper bound
  // whenever it exceeds tol.
  bool decision_mode = false;
  bool early_exit = false;  // stop at the first subproblem with loss <= tol
  unsigned long long budget = 10'000'000;
  int max_dim = 3;
  int threads = 1;
  uint64_t order_seed = 0;  // nonzero: process pairs in a seeded shuffled order
  bool refine_theta = false;
};

struct TrainResult {
  TwoReluNet net;
  double loss = std::numeric_limits<double>::infinity();
  ActivationPattern pattern;
  // Subproblems enumerated, including ones discharged by lower bounds.
  // Deterministic for fixed inputs regardless of thread count.
  unsigned long long subproblems = 0;
  bool certificate = false;  // full enumeration completed (no early exit)
  double max_kkt_residual = 0.0;
  int max_constraints = 0;
  int variables = 0;
  // Post-hoc scalar rescale of theta (reported alongside, net unchanged).
  double refined_theta = 0.0;
  double refined_loss = std::numeric_limits<double>::infinity();
};

// The convex subprogram of one activation pattern: 2d+3 variables
// (a1, a2, w0), at most 3N+1 constraints.
qp::QuadraticProgram build_subprogram(const Dataset& ds, const ActivationPattern& p);

// Variable layout of the subprogram solution -> network weights.
TwoReluNet net_from_solution(int d, const ActivationPattern& p, const Vec& z);

TrainResult train_exact(const Dataset& ds, const TrainConfig& cfg = {});

struct Decision {
  bool trainable = false;
  std::optional<TwoReluNet> net;
  TrainResult detail;
};

// Definition-style zero-loss decision at tolerance tol.
Decision decide_trainability(const Dataset& ds, double tol, TrainConfig cfg = {});

}  // namespace relu2::exact
