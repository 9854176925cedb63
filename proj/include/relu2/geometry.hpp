// Hyperplane dichotomies of finite point sets, plus strict linear separation.
//
// A dichotomy is a +/- labeling of the points realizable by some affine
// function with strictly nonzero values on every point; the realizing
// function is kept as a witness.
#pragma once

#include "relu2/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace relu2::geometry {

inline constexpr double kGeomTol = 1e-9;

struct Dichotomy {
  std::vector<int8_t> signs;  // +1 / -1 per point index
  AffineFunction witness;
};

// All sign vectors realizable by affine hyperplanes, each with a witness.
// Duplicate points are detected by exact coordinate equality and share a
// sign. Output is sorted lexicographically by sign vector, so it is
// independent of any internal processing order.
std::vector<Dichotomy> enumerate_dichotomies(const std::vector<Vec>& points, int d);

// Maximum-margin strict separation of A from B (positive side = A) under the
// normalization |alpha|_inf <= 1 on rescaled coordinates. Returns nothing if
// the best margin does not exceed kGeomTol.
std::optional<AffineFunction> strict_separation_lp(const std::vector<Vec>& A,
                                                   const std::vector<Vec>& B);

// Number of affine dichotomies of N points in general position in R^d:
// 2 * sum_{k<=d} C(N-1, k).
unsigned long long cover_count(int n_points, int d);

}  // namespace relu2::geometry
