#include <doctest.h>

#include "relu2/geometry.hpp"
#include "relu2/rng.hpp"

#include <algorithm>
#include <set>

using namespace relu2;
using geometry::Dichotomy;

namespace {

std::vector<Vec> random_points(Rng& rng, int n, int d) {
  std::vector<Vec> pts;
  for (int i = 0; i < n; ++i) pts.push_back(rng.gaussian_vec(d));
  return pts;
}

// Sign vectors hit by random hyperplanes; every one of them is realizable.
std::set<std::vector<int8_t>> sampling_oracle(const std::vector<Vec>& pts, int d, int samples,
                                              uint64_t seed) {
  Rng rng(seed);
  std::set<std::vector<int8_t>> found;
  for (int s = 0; s < samples; ++s) {
    const Vec alpha = rng.gaussian_vec(d);
    const double beta = rng.gaussian();
    std::vector<int8_t> signs(pts.size());
    bool on_plane = false;
    for (size_t i = 0; i < pts.size(); ++i) {
      const double v = alpha.dot(pts[i]) + beta;
      if (v == 0.0) on_plane = true;
      signs[i] = v > 0 ? 1 : -1;
    }
    if (!on_plane) found.insert(std::move(signs));
  }
  return found;
}

std::set<std::vector<int8_t>> sign_set(const std::vector<Dichotomy>& ds) {
  std::set<std::vector<int8_t>> out;
  for (const auto& d : ds) out.insert(d.signs);
  return out;
}

}  // namespace

TEST_CASE("single point has both sides") {
  std::vector<Vec> pts = {Vec::Constant(1, 0.7)};
  auto ds = geometry::enumerate_dichotomies(pts, 1);
  CHECK(ds.size() == 2);
}

TEST_CASE("three collinear points on a line") {
  // Brute-force oracle: thresholds between points, both orientations.
  std::vector<Vec> pts = {Vec::Constant(1, 0.0), Vec::Constant(1, 1.0), Vec::Constant(1, 2.0)};
  std::set<std::vector<int8_t>> oracle;
  for (double t : {-0.5, 0.5, 1.5, 2.5})
    for (int s : {+1, -1}) {
      std::vector<int8_t> signs(3);
      for (int i = 0; i < 3; ++i) signs[i] = (s * (pts[i][0] - t) > 0) ? 1 : -1;
      oracle.insert(signs);
    }
  CHECK(oracle.size() == 6);
  auto ds = geometry::enumerate_dichotomies(pts, 1);
  CHECK(ds.size() == 6);
  CHECK(sign_set(ds) == oracle);
}

TEST_CASE("three generic points in the plane realize all sign vectors") {
  Rng rng(9);
  auto pts = random_points(rng, 3, 2);
  auto ds = geometry::enumerate_dichotomies(pts, 2);
  CHECK(ds.size() == 8);
  CHECK(ds.size() == geometry::cover_count(3, 2));
}

TEST_CASE("count law and oracle containment in general position") {
  int cfg = 0;
  for (int d : {1, 2, 3})
    for (int n : {4, 6, 8}) {
      Rng rng(100 + cfg++);
      auto pts = random_points(rng, n, d);
      auto ds = geometry::enumerate_dichotomies(pts, d);
      CHECK(ds.size() == geometry::cover_count(n, d));
      auto enumerated = sign_set(ds);
      for (const auto& s : sampling_oracle(pts, d, 20000, 999 + cfg)) {
        CHECK(enumerated.count(s) == 1);
      }
    }
}

TEST_CASE("witnesses reproduce their sign vectors") {
  Rng rng(42);
  auto pts = random_points(rng, 7, 2);
  for (const auto& dich : geometry::enumerate_dichotomies(pts, 2)) {
    for (size_t i = 0; i < pts.size(); ++i) {
      const double v = dich.witness(pts[i]);
      if (dich.signs[i] > 0) CHECK(v >= -geometry::kGeomTol);
      else CHECK(v <= geometry::kGeomTol);
    }
  }
}

TEST_CASE("negating the points preserves the dichotomy set") {
  Rng rng(17);
  auto pts = random_points(rng, 6, 2);
  auto neg = pts;
  for (auto& p : neg) p = -p;
  CHECK(sign_set(geometry::enumerate_dichotomies(pts, 2)) ==
        sign_set(geometry::enumerate_dichotomies(neg, 2)));
}

TEST_CASE("duplicate points share their sign") {
  Rng rng(23);
  auto pts = random_points(rng, 5, 2);
  pts.push_back(pts[1]);  // exact duplicate
  auto ds = geometry::enumerate_dichotomies(pts, 2);
  for (const auto& d : ds) CHECK(d.signs[1] == d.signs[5]);
  auto base = geometry::enumerate_dichotomies({pts.begin(), pts.begin() + 5}, 2);
  CHECK(ds.size() == base.size());
}

TEST_CASE("strict separation of two points") {
  std::vector<Vec> A = {Vec::Constant(1, 0.0)};
  std::vector<Vec> B = {Vec::Constant(1, 1.0)};
  auto w = geometry::strict_separation_lp(A, B);
  REQUIRE(w.has_value());
  CHECK((*w)(A[0]) > 0.0);
  CHECK((*w)(B[0]) < 0.0);
}

TEST_CASE("no strict separation of a point from itself") {
  std::vector<Vec> A = {Vec::Constant(2, 0.5)};
  CHECK_FALSE(geometry::strict_separation_lp(A, A).has_value());
  CHECK_THROWS(geometry::strict_separation_lp({}, A));
}

TEST_CASE("separation margin is scale-consistent") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> A = random_points(rng, 4, 2);
    std::vector<Vec> B = random_points(rng, 4, 2);
    for (auto& a : A) a[0] += 4.0;  // push the classes apart
    auto w = geometry::strict_separation_lp(A, B);
    REQUIRE(w.has_value());
    for (const auto& a : A) CHECK((*w)(a) > 0.0);
    for (const auto& b : B) CHECK((*w)(b) < 0.0);
  }
}
