#include <doctest.h>

#include "relu2/exact.hpp"
#include "relu2/harness.hpp"
#include "relu2/reduce.hpp"
#include "relu2/rng.hpp"

#include <cmath>

using namespace relu2;
using exact::ActivationPattern;
using exact::Mask;

namespace {

Dataset dataset_from(const std::vector<std::pair<std::vector<double>, double>>& rows) {
  Dataset ds;
  ds.dim = static_cast<int>(rows.front().first.size());
  for (const auto& [x, y] : rows) {
    LabeledPoint p;
    p.x = Eigen::Map<const Vec>(x.data(), ds.dim);
    p.y = y;
    ds.points.push_back(std::move(p));
  }
  return ds;
}

// Pattern induced by an actual network (ties go to the nonnegative side).
ActivationPattern pattern_of(const TwoReluNet& net, const Dataset& ds) {
  ActivationPattern p;
  p.n = ds.size();
  p.theta = net.theta >= 0 ? 1 : -1;
  p.w1 = net.w1;
  p.w2 = net.w2;
  p.w0_nonneg = net.w0 >= 0;
  for (int i = 0; i < ds.size(); ++i) {
    const Vec& x = ds.points[i].x;
    if (net.a1(x) >= 0) p.q1_plus |= Mask(1) << i;
    if (net.a2(x) >= 0) p.q2_plus |= Mask(1) << i;
  }
  for (int i = 0; i < ds.size(); ++i) {
    const Vec& x = ds.points[i].x;
    const double pre = net.w0 + net.w1 * relu(net.a1(x)) + net.w2 * relu(net.a2(x));
    const Mask b = Mask(1) << i;
    if (pre >= 0) {
      if (p.t1() & b) p.t11 |= b;
      if (p.t2() & b) p.t21 |= b;
      if (p.t3() & b) p.t31 |= b;
    }
  }
  return p;
}

// A planted network with its magnitudes pushed into normalized form.
TwoReluNet random_normalized_net(Rng& rng, int d) {
  TwoReluNet net;
  net.a1 = {rng.gaussian_vec(d), rng.gaussian()};
  net.a2 = {rng.gaussian_vec(d), rng.gaussian()};
  net.w1 = rng.uniform() < 0.5 ? -1 : 1;
  net.w2 = rng.uniform() < 0.5 ? -1 : 1;
  net.w0 = rng.uniform(-0.5, 1.0);
  net.theta = rng.uniform(0.25, 2.0) * (rng.uniform() < 0.5 ? -1 : 1);
  return net;
}

}  // namespace

TEST_CASE("subprogram shape: single point with everything inactive") {
  auto ds = dataset_from({{{0.5}, 2.0}});
  ActivationPattern p;
  p.n = 1;  // point on the negative side of both planes, w0 <= 0
  p.w0_nonneg = false;
  auto qp = exact::build_subprogram(ds, p);
  CHECK(qp.n == 5);  // 2d+3 with d = 1
  CHECK(qp.R.rows() == 0);
  CHECK(qp.G.rows() == 3);  // both plane sides + the w0 sign
  CHECK(qp.offset == doctest::Approx(4.0));
  auto sol = qp::solve_qp(qp);
  CHECK(sol.objective == doctest::Approx(4.0));
}

TEST_CASE("subprogram constraints never exceed 3N+1") {
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng.uniform_int(1, 12), d = rng.uniform_int(1, 3);
    Dataset ds;
    ds.dim = d;
    for (int i = 0; i < n; ++i) ds.points.push_back({rng.gaussian_vec(d), rng.uniform()});
    ActivationPattern p;
    p.n = n;
    const Mask all = (Mask(1) << n) - 1;
    p.q1_plus = rng.next_u64() & all;
    p.q2_plus = rng.next_u64() & all;
    p.t11 = rng.next_u64() & p.t1();
    p.t21 = rng.next_u64() & p.t2();
    p.t31 = rng.next_u64() & p.t3();
    p.theta = rng.uniform() < 0.5 ? -1 : 1;
    p.w1 = rng.uniform() < 0.5 ? -1 : 1;
    p.w2 = rng.uniform() < 0.5 ? -1 : 1;
    p.w0_nonneg = rng.uniform() < 0.5;
    auto qp = exact::build_subprogram(ds, p);
    CHECK(qp.G.rows() <= 3 * n + 1);
    CHECK(qp.n == 2 * d + 3);
  }
}

TEST_CASE("a planted pattern's subprogram reaches zero") {
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2, n = 7;
    TwoReluNet net = random_normalized_net(rng, d);
    Dataset ds;
    ds.dim = d;
    for (int i = 0; i < n; ++i) {
      LabeledPoint pt;
      pt.x = rng.gaussian_vec(d);
      pt.y = net.eval(pt.x);
      ds.points.push_back(std::move(pt));
    }
    const auto pat = pattern_of(net, ds);
    auto qp = exact::build_subprogram(ds, pat);
    auto sol = qp::solve_qp(qp);
    REQUIRE(sol.status == qp::QpStatus::Optimal);
    CHECK(sol.objective <= 1e-10);
    const auto rebuilt = exact::net_from_solution(d, pat, sol.z);
    CHECK(squared_loss(rebuilt, ds) <= 1e-8);
  }
}

TEST_CASE("single point trains to zero loss") {
  for (double y : {1.0, 0.0, -2.5, 3.25}) {
    auto ds = dataset_from({{{0.3}, y}});
    exact::TrainConfig cfg;
    cfg.max_dim = 1;
    auto res = exact::train_exact(ds, cfg);
    CHECK(res.loss <= 1e-12);
    CHECK(res.certificate);
    CHECK(std::abs(squared_loss(res.net, ds) - res.loss) <= 1e-10);
  }
}

TEST_CASE("plant and recover in two dimensions") {
  Rng rng(4242);
  const int d = 2, n = 8;
  TwoReluNet planted = random_normalized_net(rng, d);
  Dataset ds;
  ds.dim = d;
  for (int i = 0; i < n; ++i) {
    LabeledPoint pt;
    pt.x = rng.gaussian_vec(d);
    pt.y = planted.eval(pt.x);
    ds.points.push_back(std::move(pt));
  }
  exact::TrainConfig cfg;
  cfg.max_dim = 2;
  cfg.threads = 4;
  auto res = exact::train_exact(ds, cfg);
  CHECK(res.loss <= 1e-8);
  CHECK(res.certificate);
  CHECK(res.max_kkt_residual <= qp::kKktTol);
  CHECK(res.max_constraints <= 3 * n + 1);

  // The winning pattern matches what the returned network actually does.
  const auto induced = pattern_of(res.net, ds);
  for (int i = 0; i < n; ++i) {
    const Vec& x = ds.points[i].x;
    const Mask b = Mask(1) << i;
    if (std::abs(res.net.a1(x)) > 1e-9)
      CHECK(((induced.q1_plus & b) != 0) == ((res.pattern.q1_plus & b) != 0));
    if (std::abs(res.net.a2(x)) > 1e-9)
      CHECK(((induced.q2_plus & b) != 0) == ((res.pattern.q2_plus & b) != 0));
  }
}

TEST_CASE("sign enumeration suffices for arbitrary planted magnitudes") {
  Rng rng(1717);
  for (int trial = 0; trial < 3; ++trial) {
    const int d = 1, n = 6;
    Dataset ds;
    ds.dim = d;
    // Arbitrary second-layer magnitudes, not just +-1.
    const AffineFunction a1{rng.gaussian_vec(d), rng.gaussian()};
    const AffineFunction a2{rng.gaussian_vec(d), rng.gaussian()};
    const double W1 = 3.7 * rng.gaussian(), W2 = 0.4 * rng.gaussian();
    const double w0 = rng.gaussian(), theta = rng.uniform(0.5, 1.5);
    for (int i = 0; i < n; ++i) {
      LabeledPoint pt;
      pt.x = rng.gaussian_vec(d);
      pt.y = theta * relu(w0 + W1 * relu(a1(pt.x)) + W2 * relu(a2(pt.x)));
      ds.points.push_back(std::move(pt));
    }
    exact::TrainConfig cfg;
    cfg.max_dim = 1;
    auto res = exact::train_exact(ds, cfg);
    CHECK(res.loss <= 1e-8);
  }
}

TEST_CASE("optimal loss is monotone under taking subsets") {
  Rng rng(88);
  const int d = 1;
  Dataset full;
  full.dim = d;
  for (int i = 0; i < 5; ++i)
    full.points.push_back({rng.gaussian_vec(d), rng.gaussian()});
  exact::TrainConfig cfg;
  cfg.max_dim = 1;
  double prev = -1.0;
  for (int n = 2; n <= 5; ++n) {
    Dataset sub;
    sub.dim = d;
    sub.points.assign(full.points.begin(), full.points.begin() + n);
    const double loss = exact::train_exact(sub, cfg).loss;
    CHECK(loss >= prev - 1e-9);
    prev = loss;
  }
}

TEST_CASE("random-search oracle never beats the trainer in 1d") {
  Rng rng(909);
  for (int trial = 0; trial < 3; ++trial) {
    const int d = 1, n = 6;
    Dataset ds;
    ds.dim = d;
    for (int i = 0; i < n; ++i)
      ds.points.push_back({rng.gaussian_vec(d), rng.gaussian()});
    exact::TrainConfig cfg;
    cfg.max_dim = 1;
    const double loss = exact::train_exact(ds, cfg).loss;
    Rng search(5000 + trial);
    double best = 1e100;
    for (int probe = 0; probe < 20000; ++probe) {
      TwoReluNet net = random_normalized_net(search, d);
      best = std::min(best, squared_loss(net, ds));
    }
    CHECK(loss <= best + 1e-9);
  }
}

TEST_CASE("decision wrapper") {
  auto one = dataset_from({{{0.1, 0.2}, 1.0}});
  exact::TrainConfig cfg;
  cfg.max_dim = 2;
  auto dec = exact::decide_trainability(one, 1e-8, cfg);
  CHECK(dec.trainable);
  REQUIRE(dec.net.has_value());
  CHECK(max_abs_error(*dec.net, one) <= 1e-8);

  auto zeros = dataset_from({{{0.1}, 0.0}, {{0.4}, 0.0}});
  cfg.max_dim = 1;
  auto dec0 = exact::decide_trainability(zeros, 1e-8, cfg);
  CHECK(dec0.trainable);
}

TEST_CASE("refusals are explicit") {
  Rng rng(3);
  Dataset wide;
  wide.dim = 4;
  wide.points.push_back({rng.gaussian_vec(4), 1.0});
  CHECK_THROWS_AS(exact::train_exact(wide, {}), exact::BudgetExceeded);

  Dataset ds;
  ds.dim = 2;
  for (int i = 0; i < 8; ++i) ds.points.push_back({rng.gaussian_vec(2), rng.uniform()});
  exact::TrainConfig tiny;
  tiny.max_dim = 2;
  tiny.budget = 100;
  try {
    exact::train_exact(ds, tiny);
    FAIL("expected a budget refusal");
  } catch (const exact::BudgetExceeded& e) {
    CHECK(e.planned > 100);
  }
}

TEST_CASE("the 13-point fixture is trainable and rigid") {
  const Dataset ds = reduce::gadget_only_dataset();
  exact::TrainConfig cfg;
  cfg.tol = 1e-8;
  cfg.budget = 500'000'000ULL;
  cfg.threads = 4;
  auto dec = exact::decide_trainability(ds, 1e-8, cfg);
  CHECK(dec.trainable);
  REQUIRE(dec.net.has_value());
  CHECK(dec.net->w1 == dec.net->w2);
  // Both functions stay nonpositive on the label-1 points.
  for (const auto& p : ds.points) {
    if (p.y == 1.0) {
      CHECK(dec.net->a1(p.x) <= 1e-6);
      CHECK(dec.net->a2(p.x) <= 1e-6);
    }
  }
}
