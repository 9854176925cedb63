#include <doctest.h>

#include "relu2/lp.hpp"
#include "relu2/qp.hpp"
#include "relu2/rng.hpp"

#include <cmath>
#include <cstring>

using namespace relu2;

TEST_CASE("simplex on small programs") {
  {  // max x s.t. x <= 3
    Vec c(1), h(1);
    Mat G(1, 1);
    c << 1;
    G << 1;
    h << 3;
    auto r = lp::solve_max(c, G, h);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.value == doctest::Approx(3.0));
  }
  {  // max x + y s.t. x <= 1, y <= 2
    Vec c(2), h(2);
    Mat G(2, 2);
    c << 1, 1;
    G << 1, 0, 0, 1;
    h << 1, 2;
    auto r = lp::solve_max(c, G, h);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.value == doctest::Approx(3.0));
  }
  {  // infeasible: x <= 0 and x >= 1
    Vec c(1), h(2);
    Mat G(2, 1);
    c << 1;
    G << 1, -1;
    h << 0, -1;
    auto r = lp::solve_max(c, G, h);
    CHECK(r.status == lp::Status::Infeasible);
  }
  {  // unbounded: max x s.t. x >= 0
    Vec c(1), h(1);
    Mat G(1, 1);
    c << 1;
    G << -1;
    h << 0;
    auto r = lp::solve_max(c, G, h);
    CHECK(r.status == lp::Status::Unbounded);
  }
}

TEST_CASE("lp against random vertex enumeration in 2d") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 6;
    Mat G(m + 4, 2);
    Vec h(m + 4);
    for (int i = 0; i < m; ++i) {
      Vec a = rng.unit_vector(2);
      G.row(i) = a.transpose();
      h[i] = rng.uniform(0.2, 1.5);
    }
    // Bounding box keeps it bounded.
    G.row(m) << 1, 0;
    G.row(m + 1) << -1, 0;
    G.row(m + 2) << 0, 1;
    G.row(m + 3) << 0, -1;
    h.segment(m, 4).setConstant(5.0);
    Vec c = rng.gaussian_vec(2);
    auto r = lp::solve_max(c, G, h);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(((G * r.x - h).maxCoeff()) <= 1e-8);
    // Brute force: intersect all constraint pairs, keep feasible vertices.
    double best = -1e100;
    for (int i = 0; i < m + 4; ++i)
      for (int j = i + 1; j < m + 4; ++j) {
        Mat A(2, 2);
        A.row(0) = G.row(i);
        A.row(1) = G.row(j);
        if (std::abs(A.determinant()) < 1e-9) continue;
        Vec b(2);
        b << h[i], h[j];
        Vec v = A.partialPivLu().solve(b);
        if ((G * v - h).maxCoeff() <= 1e-7) best = std::max(best, c.dot(v));
      }
    CHECK(r.value == doctest::Approx(best).epsilon(1e-6));
  }
}

TEST_CASE("qp solves the worked examples") {
  {  // min (z-3)^2
    qp::QuadraticProgram p;
    p.n = 1;
    p.R = Mat::Ones(1, 1);
    p.t = Vec::Constant(1, 3.0);
    p.G = Mat(0, 1);
    p.h = Vec(0);
    auto s = qp::solve_qp(p);
    REQUIRE(s.status == qp::QpStatus::Optimal);
    CHECK(s.z[0] == doctest::Approx(3.0));
    CHECK(s.objective == doctest::Approx(0.0));
    CHECK(s.kkt_residual <= qp::kKktTol);
  }
  {  // min (z-3)^2 s.t. z <= 1
    qp::QuadraticProgram p;
    p.n = 1;
    p.R = Mat::Ones(1, 1);
    p.t = Vec::Constant(1, 3.0);
    p.G = Mat::Ones(1, 1);
    p.h = Vec::Constant(1, 1.0);
    auto s = qp::solve_qp(p);
    REQUIRE(s.status == qp::QpStatus::Optimal);
    CHECK(s.z[0] == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(4.0));
    CHECK(s.kkt_residual <= qp::kKktTol);
  }
}

TEST_CASE("qp constrained minimum against a dense grid") {
  // min (z1-1)^2 + (z2-1)^2 s.t. z1 + z2 <= 1
  qp::QuadraticProgram p;
  p.n = 2;
  p.R = Mat::Identity(2, 2);
  p.t = Vec::Ones(2);
  p.G = Mat::Ones(1, 2);
  p.h = Vec::Constant(1, 1.0);
  auto s = qp::solve_qp(p);
  REQUIRE(s.status == qp::QpStatus::Optimal);

  double grid_best = 1e100;
  Vec grid_arg(2);
  for (int i = 0; i <= 1000; ++i)
    for (int j = 0; j <= 1000; ++j) {
      const double z1 = i * 1e-3, z2 = j * 1e-3;
      if (z1 + z2 > 1.0) continue;
      const double f = (z1 - 1) * (z1 - 1) + (z2 - 1) * (z2 - 1);
      if (f < grid_best) {
        grid_best = f;
        grid_arg << z1, z2;
      }
    }
  CHECK(s.z[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.z[1] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.objective == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(s.objective <= grid_best + 1e-12);
}

TEST_CASE("qp infeasibility carries a certificate residual") {
  qp::QuadraticProgram p;
  p.n = 1;
  p.R = Mat::Ones(1, 1);
  p.t = Vec::Zero(1);
  p.G = Mat(2, 1);
  p.G << 1, -1;
  p.h = Vec(2);
  p.h << -1, -1;  // z <= -1 and z >= 1
  auto s = qp::solve_qp(p);
  CHECK(s.status == qp::QpStatus::Infeasible);
  CHECK(s.infeasibility > 0.5);
}

TEST_CASE("qp random problems: feasible, sampled-optimal, deterministic") {
  Rng rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3, k = 4, m = 6;
    qp::QuadraticProgram p;
    p.n = n;
    p.R = Mat(k, n);
    p.t = Vec(k);
    for (int i = 0; i < k; ++i) {
      p.R.row(i) = rng.gaussian_vec(n).transpose();
      p.t[i] = rng.gaussian();
    }
    p.G = Mat(m, n);
    p.h = Vec(m);
    for (int i = 0; i < m; ++i) {
      p.G.row(i) = rng.gaussian_vec(n).transpose();
      p.h[i] = rng.uniform(0.1, 1.0);  // z = 0 stays feasible
    }
    auto s = qp::solve_qp(p);
    REQUIRE(s.status == qp::QpStatus::Optimal);
    CHECK((p.G * s.z - p.h).maxCoeff() <= qp::kFeasTol);
    CHECK(s.kkt_residual <= qp::kKktTol);

    // Sampling oracle: no random feasible point does meaningfully better.
    Rng sampler(1000 + trial);
    for (int probe = 0; probe < 10000; ++probe) {
      const Vec z = 2.0 * sampler.gaussian_vec(n);
      if ((p.G * z - p.h).maxCoeff() > 0.0) continue;
      const double obj = (p.R * z - p.t).squaredNorm();
      CHECK(s.objective <= obj + 1e-6);
    }

    auto s2 = qp::solve_qp(p);
    CHECK(std::memcmp(s.z.data(), s2.z.data(), sizeof(double) * n) == 0);
    CHECK(s.objective == s2.objective);
  }
}

TEST_CASE("qp with a singular objective picks a feasible minimizer") {
  // Objective only touches z1; z2 is free but constrained.
  qp::QuadraticProgram p;
  p.n = 2;
  p.R = Mat::Zero(1, 2);
  p.R(0, 0) = 1.0;
  p.t = Vec::Constant(1, 2.0);
  p.G = Mat(1, 2);
  p.G << 0, 1;
  p.h = Vec::Constant(1, 0.5);
  auto s = qp::solve_qp(p);
  REQUIRE(s.status == qp::QpStatus::Optimal);
  CHECK(s.z[0] == doctest::Approx(2.0));
  CHECK(s.z[1] <= 0.5 + qp::kFeasTol);
  CHECK(s.objective == doctest::Approx(0.0));
}
