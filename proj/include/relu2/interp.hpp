// Constructive exact interpolation of binary-labeled data by a one-hidden-
// layer ReLU network with at most one node per point: sweep the data along a
// random projection and emit a node at each label change.
#pragma once

#include "relu2/core.hpp"

#include <cstdint>
#include <stdexcept>

namespace relu2::interp {

// Uniform direction on the unit sphere; deterministic given the seed.
Vec sample_direction(int d, uint64_t seed);

struct TieError : std::runtime_error {
  int i = -1, j = -1;  // dataset indices whose projections kept colliding
  TieError(const std::string& msg, int a, int b) : std::runtime_error(msg), i(a), j(b) {}
};

struct FitOptions {
  int max_retries = 8;
  // Re-check the sweep invariants after every step (test builds).
  bool check_invariants = false;
};

struct FitResult {
  KReluNet net;
  Vec direction;
  int attempts = 1;
};

// Labels must lie in {0,1}. The returned network has at most N hidden nodes
// and reproduces every label to within 1e-9.
FitResult fit_overparam(const Dataset& ds, uint64_t seed, const FitOptions& opt = {});

// max_i |F(x^i) - y_i| <= tol and the node count does not exceed N.
bool verify_interpolation(const KReluNet& net, const Dataset& ds, double tol);

}  // namespace relu2::interp
