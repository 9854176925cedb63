#include "relu2/exact.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

namespace relu2::exact {

namespace {

int popcount(Mask m) { return std::popcount(m); }
bool bit(Mask m, int i) { return (m >> i) & 1; }

double mask_sum(Mask m, const std::vector<double>& v) {
  double s = 0.0;
  while (m) {
    s += v[std::countr_zero(m)];
    m &= m - 1;
  }
  return s;
}

// min over c of sum_{i in m} (c - y_i)^2; lower-bounds any subproblem whose
// points in m all receive the same network output.
double shared_value_bound(Mask m, const std::vector<double>& y, const std::vector<double>& y2) {
  const int k = popcount(m);
  if (k == 0) return 0.0;
  const double sy = mask_sum(m, y);
  const double syy = mask_sum(m, y2);
  return std::max(0.0, syy - sy * sy / k);
}

struct SignCase {
  int theta, w1, w2;
  bool w0_nonneg;
};

// Fixed enumeration order of the sign choices.
std::vector<SignCase> full_cases() {
  std::vector<SignCase> cs;
  for (int theta : {+1, -1})
    for (int w1 : {+1, -1})
      for (int w2 : {+1, -1})
        for (bool w0n : {true, false}) cs.push_back({theta, w1, w2, w0n});
  return cs;
}

std::vector<SignCase> decision_cases(bool diagonal_pair) {
  std::vector<SignCase> cs;
  for (int w1 : {+1, -1})
    for (int w2 : {+1, -1}) {
      if (diagonal_pair && w1 == -1 && w2 == +1) continue;  // swap-symmetric
      for (bool w0n : {true, false}) cs.push_back({+1, w1, w2, w0n});
    }
  return cs;
}

struct Best {
  double loss = std::numeric_limits<double>::infinity();
  unsigned long long enum_idx = ~0ULL;
  unsigned long long order_pos = ~0ULL;  // position in processing order
  bool hit = false;                      // loss <= tol
  TwoReluNet net;
  ActivationPattern pattern;
  bool valid = false;
};

struct Shared {
  const Dataset* ds;
  const TrainConfig* cfg;
  std::vector<Mask> plus;  // per dichotomy
  std::vector<double> y, y2;
  Mask l1 = 0;  // y == 1 exactly (binary-label datasets)
  std::atomic<double> best_loss{std::numeric_limits<double>::infinity()};
  std::atomic<bool> stop{false};
  std::atomic<unsigned long long> solves{0};
  std::atomic<double> max_kkt{0.0};
  std::atomic<int> max_constraints{0};

  double prune_threshold() const {
    const double b = best_loss.load(std::memory_order_relaxed);
    return cfg->early_exit ? std::max(b, cfg->tol) : b;
  }
  void update_max(std::atomic<double>& target, double v) {
    double cur = target.load(std::memory_order_relaxed);
    while (v > cur && !target.compare_exchange_weak(cur, v)) {
    }
  }
};

void merge_best(Best& into, const Best& from, bool early_exit) {
  if (!from.valid) return;
  if (!into.valid) {
    into = from;
    return;
  }
  if (early_exit && (from.hit || into.hit)) {
    // First hit in processing order wins; hits dominate non-hits.
    if (from.hit && (!into.hit || from.order_pos < into.order_pos)) into = from;
    return;
  }
  if (from.loss < into.loss ||
      (from.loss == into.loss && from.enum_idx < into.enum_idx))
    into = from;
}

}  // namespace

qp::QuadraticProgram build_subprogram(const Dataset& ds, const ActivationPattern& p) {
  const int n_pts = ds.size();
  const int d = ds.dim;
  const int nv = 2 * d + 3;
  if (p.n != n_pts) throw DimensionMismatch("pattern size does not match dataset");

  const Mask t1 = p.t1(), t2 = p.t2(), t3 = p.t3(), t4 = p.t4();
  if ((p.t11 & ~t1) || (p.t21 & ~t2) || (p.t31 & ~t3))
    throw std::invalid_argument("second-layer split is not a subset of its T set");

  const int a1_beta = d, a2_off = d + 1, a2_beta = 2 * d + 1, w0_idx = 2 * d + 2;

  int n_rows = popcount(p.t11) + popcount(p.t21) + popcount(p.t31);
  if (p.w0_nonneg) n_rows += popcount(t4);
  const int n_cons = 2 * n_pts + popcount(t1) + popcount(t2) + popcount(t3) + 1;

  qp::QuadraticProgram qp;
  qp.n = nv;
  qp.R = Mat::Zero(n_rows, nv);
  qp.t = Vec::Zero(n_rows);
  qp.G = Mat::Zero(n_cons, nv);
  qp.h = Vec::Zero(n_cons);

  auto put_a1 = [&](auto&& row, double coef, const Vec& x) {
    row.segment(0, d) += coef * x.transpose();
    row[a1_beta] += coef;
  };
  auto put_a2 = [&](auto&& row, double coef, const Vec& x) {
    row.segment(a2_off, d) += coef * x.transpose();
    row[a2_beta] += coef;
  };

  int r = 0;
  for (int i = 0; i < n_pts; ++i) {
    const Vec& x = ds.points[i].x;
    const double y = ds.points[i].y;
    if (bit(p.t11, i)) {
      put_a1(qp.R.row(r), p.theta * p.w1, x);
      put_a2(qp.R.row(r), p.theta * p.w2, x);
      qp.R(r, w0_idx) = p.theta;
      qp.t[r++] = y;
    } else if (bit(p.t21, i)) {
      put_a2(qp.R.row(r), p.theta * p.w2, x);
      qp.R(r, w0_idx) = p.theta;
      qp.t[r++] = y;
    } else if (bit(p.t31, i)) {
      put_a1(qp.R.row(r), p.theta * p.w1, x);
      qp.R(r, w0_idx) = p.theta;
      qp.t[r++] = y;
    } else if (bit(t4, i) && p.w0_nonneg) {
      qp.R(r, w0_idx) = p.theta;
      qp.t[r++] = y;
    } else {
      // The network output is pinned to zero on this point.
      qp.offset += y * y;
    }
  }

  int c = 0;
  for (int i = 0; i < n_pts; ++i) {  // hyperplane side of a1
    const double s = bit(p.q1_plus, i) ? 1.0 : -1.0;
    put_a1(qp.G.row(c), -s, ds.points[i].x);
    ++c;
  }
  for (int i = 0; i < n_pts; ++i) {  // hyperplane side of a2
    const double s = bit(p.q2_plus, i) ? 1.0 : -1.0;
    put_a2(qp.G.row(c), -s, ds.points[i].x);
    ++c;
  }
  for (int i = 0; i < n_pts; ++i) {  // second-layer argument side
    const Vec& x = ds.points[i].x;
    if (bit(t1, i)) {
      const double s = bit(p.t11, i) ? 1.0 : -1.0;
      put_a1(qp.G.row(c), -s * p.w1, x);
      put_a2(qp.G.row(c), -s * p.w2, x);
      qp.G(c, w0_idx) = -s;
      ++c;
    } else if (bit(t2, i)) {
      const double s = bit(p.t21, i) ? 1.0 : -1.0;
      put_a2(qp.G.row(c), -s * p.w2, x);
      qp.G(c, w0_idx) = -s;
      ++c;
    } else if (bit(t3, i)) {
      const double s = bit(p.t31, i) ? 1.0 : -1.0;
      put_a1(qp.G.row(c), -s * p.w1, x);
      qp.G(c, w0_idx) = -s;
      ++c;
    }
  }
  qp.G(c, w0_idx) = p.w0_nonneg ? -1.0 : 1.0;
  ++c;

  if (c != n_cons || c > 3 * n_pts + 1)
    throw std::logic_error("subprogram constraint count out of contract");
  return qp;
}

TwoReluNet net_from_solution(int d, const ActivationPattern& p, const Vec& z) {
  TwoReluNet net;
  net.a1 = {z.segment(0, d), z[d]};
  net.a2 = {z.segment(d + 1, d), z[2 * d + 1]};
  net.w0 = z[2 * d + 2];
  net.w1 = p.w1;
  net.w2 = p.w2;
  net.theta = p.theta;
  return net;
}

namespace {

// Work on one (q1, q2) dichotomy pair; returns subproblems handled.
unsigned long long process_pair(Shared& sh, int qi, int qj, bool decision,
                                unsigned long long enum_base,
                                unsigned long long order_base, Best& local) {
  const Dataset& ds = *sh.ds;
  const int n_pts = ds.size();
  const Mask all = n_pts >= 64 ? ~Mask(0) : ((Mask(1) << n_pts) - 1);
  const Mask pi = sh.plus[qi], pj = sh.plus[qj];
  const Mask t1 = pi & pj, t2 = ~pi & pj & all, t3 = pi & ~pj & all;
  const Mask t4 = ~(pi | pj) & all;

  const double bound0 = shared_value_bound(t4, sh.y, sh.y2);

  ActivationPattern base;
  base.q1_plus = pi;
  base.q2_plus = pj;
  base.n = n_pts;

  unsigned long long handled = 0;
  auto consider = [&](const ActivationPattern& pat, double dead_bound,
                      unsigned long long enum_idx, unsigned long long order_pos) {
    if (sh.stop.load(std::memory_order_relaxed) && local.hit) return;
    if (dead_bound > sh.prune_threshold()) return;
    auto qp = build_subprogram(ds, pat);
    const auto solr = qp::solve_qp(qp);
    sh.solves.fetch_add(1, std::memory_order_relaxed);
    sh.update_max(sh.max_kkt, solr.kkt_residual);
    int cur_cons = static_cast<int>(qp.G.rows());
    int prev = sh.max_constraints.load(std::memory_order_relaxed);
    while (cur_cons > prev && !sh.max_constraints.compare_exchange_weak(prev, cur_cons)) {
    }
    if (solr.status != qp::QpStatus::Optimal) return;
    TwoReluNet net = net_from_solution(ds.dim, pat, solr.z);
    const double loss = squared_loss(net, ds);

    Best cand;
    cand.valid = true;
    cand.loss = loss;
    cand.enum_idx = enum_idx;
    cand.order_pos = order_pos;
    cand.hit = loss <= sh.cfg->tol;
    cand.net = net;
    cand.pattern = pat;
    merge_best(local, cand, sh.cfg->early_exit);

    double cur = sh.best_loss.load(std::memory_order_relaxed);
    while (loss < cur && !sh.best_loss.compare_exchange_weak(cur, loss)) {
    }
    if (cand.hit && sh.cfg->early_exit) sh.stop.store(true, std::memory_order_relaxed);
  };

  if (decision) {
    const Mask l1 = sh.l1;
    base.t11 = t1 & l1;
    base.t21 = t2 & l1;
    base.t31 = t3 & l1;
    const auto cases = decision_cases(qi == qj);
    for (size_t k = 0; k < cases.size(); ++k) {
      const auto& sc = cases[k];
      const unsigned long long idx = enum_base + handled;
      const unsigned long long pos = order_base + handled;
      ++handled;
      if (bound0 > sh.prune_threshold()) continue;
      if (!sc.w0_nonneg) {
        // With w0 <= 0 a label-1 point needs a positively weighted active
        // node; otherwise its output is pinned below 1.
        Mask bad = t4;
        if (sc.w2 < 0) bad |= t2;
        if (sc.w1 < 0) bad |= t3;
        if (sc.w1 < 0 && sc.w2 < 0) bad |= t1;
        if (bad & l1) continue;
      }
      ActivationPattern pat = base;
      pat.theta = sc.theta;
      pat.w1 = sc.w1;
      pat.w2 = sc.w2;
      pat.w0_nonneg = sc.w0_nonneg;
      consider(pat, bound0, idx, pos);
      if (sh.stop.load(std::memory_order_relaxed) && local.hit) break;
    }
    return handled;
  }

  // Full mode: enumerate every hyperplane-realizable split of T1, T2, T3.
  auto splits_of = [&](Mask t) {
    std::vector<Mask> s;
    s.reserve(t == 0 ? 1 : sh.plus.size());
    for (const Mask p : sh.plus) s.push_back(p & t);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  };
  const auto s1 = splits_of(t1), s2 = splits_of(t2), s3 = splits_of(t3);
  const auto cases = full_cases();
  const double t4_pinned = mask_sum(t4, sh.y2);

  for (const Mask m1 : s1)
    for (const Mask m2 : s2)
      for (const Mask m3 : s3) {
        const double dead =
            mask_sum(t1 & ~m1, sh.y2) + mask_sum(t2 & ~m2, sh.y2) + mask_sum(t3 & ~m3, sh.y2);
        for (const auto& sc : cases) {
          const unsigned long long idx = enum_base + handled;
          const unsigned long long pos = order_base + handled;
          ++handled;
          const double bound = dead + (sc.w0_nonneg ? bound0 : t4_pinned);
          if (bound > sh.prune_threshold()) continue;
          ActivationPattern pat = base;
          pat.t11 = m1;
          pat.t21 = m2;
          pat.t31 = m3;
          pat.theta = sc.theta;
          pat.w1 = sc.w1;
          pat.w2 = sc.w2;
          pat.w0_nonneg = sc.w0_nonneg;
          consider(pat, bound, idx, pos);
          if (sh.stop.load(std::memory_order_relaxed) && local.hit) return handled;
        }
      }
  return handled;
}

}  // namespace

TrainResult train_exact(const Dataset& ds, const TrainConfig& cfg) {
  ds.validate();
  const int n_pts = ds.size();
  const int d = ds.dim;
  if (d > cfg.max_dim)
    throw BudgetExceeded("refusing dimension " + std::to_string(d) +
                             " > configured cap " + std::to_string(cfg.max_dim),
                         0);
  if (n_pts > 64)
    throw BudgetExceeded("trainer supports at most 64 points, got " + std::to_string(n_pts), 0);

  const bool decision = cfg.decision_mode;
  if (decision && !ds.labels_binary())
    throw std::invalid_argument("decision mode requires labels in {0,1}");

  TrainResult res;
  res.variables = 2 * d + 3;

  if (decision) {
    bool any_one = false;
    for (const auto& p : ds.points) any_one |= (p.y == 1.0);
    if (!any_one) {
      // All-zero labels: the zero network fits exactly.
      res.net = TwoReluNet{AffineFunction::zero(d), AffineFunction::zero(d), 0.0, 1, 1, 1.0};
      res.loss = 0.0;
      res.pattern.n = n_pts;
      res.certificate = true;
      res.subproblems = 0;
      return res;
    }
  }

  std::vector<Vec> pts(n_pts);
  for (int i = 0; i < n_pts; ++i) pts[i] = ds.points[i].x;
  const auto dichotomies = geometry::enumerate_dichotomies(pts, d);
  const size_t nd = dichotomies.size();

  Shared sh;
  sh.ds = &ds;
  sh.cfg = &cfg;
  sh.plus.resize(nd);
  for (size_t k = 0; k < nd; ++k) {
    Mask m = 0;
    for (int i = 0; i < n_pts; ++i)
      if (dichotomies[k].signs[i] > 0) m |= Mask(1) << i;
    sh.plus[k] = m;
  }
  sh.y.resize(n_pts);
  sh.y2.resize(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    sh.y[i] = ds.points[i].y;
    sh.y2[i] = sh.y[i] * sh.y[i];
    if (sh.y[i] == 1.0) sh.l1 |= Mask(1) << i;
  }

  // Pair list and per-pair subproblem counts (enumeration order is pair-major).
  struct Pair {
    int i, j;
    unsigned long long count;
    unsigned long long enum_base;
  };
  std::vector<Pair> pairs;
  unsigned long long planned = 0;

  if (decision) {
    pairs.reserve(nd * (nd + 1) / 2);
    for (size_t i = 0; i < nd; ++i)
      for (size_t j = i; j < nd; ++j) {
        const unsigned long long cnt = (i == j) ? 6 : 8;
        pairs.push_back({static_cast<int>(i), static_cast<int>(j), cnt, planned});
        planned += cnt;
        if (planned > cfg.budget)
          throw BudgetExceeded("decision enumeration needs more than the budget of " +
                                   std::to_string(cfg.budget) + " subproblems",
                               planned);
      }
  } else {
    const unsigned long long floor_count = 16ULL * nd * nd;
    if (floor_count > cfg.budget)
      throw BudgetExceeded("enumeration needs at least " + std::to_string(floor_count) +
                               " subproblems, over the budget of " + std::to_string(cfg.budget),
                           floor_count);
    const Mask all = n_pts >= 64 ? ~Mask(0) : ((Mask(1) << n_pts) - 1);
    auto split_count = [&](Mask t) -> unsigned long long {
      if (t == 0) return 1;
      std::vector<Mask> s;
      s.reserve(nd);
      for (const Mask p : sh.plus) s.push_back(p & t);
      std::sort(s.begin(), s.end());
      return std::unique(s.begin(), s.end()) - s.begin();
    };
    pairs.reserve(nd * nd);
    for (size_t i = 0; i < nd; ++i)
      for (size_t j = 0; j < nd; ++j) {
        const Mask pi = sh.plus[i], pj = sh.plus[j];
        const unsigned long long cnt = 16ULL * split_count(pi & pj) *
                                       split_count(~pi & pj & all) *
                                       split_count(pi & ~pj & all);
        pairs.push_back({static_cast<int>(i), static_cast<int>(j), cnt, planned});
        planned += cnt;
        if (planned > cfg.budget)
          throw BudgetExceeded("enumeration needs more than the budget of " +
                                   std::to_string(cfg.budget) + " subproblems",
                               planned);
      }
  }
  res.subproblems = planned;

  // Processing order: seeded shuffle, or a heuristic that fronts pairs whose
  // T4 block can take a shared output value with no residual.
  std::vector<size_t> order(pairs.size());
  for (size_t k = 0; k < pairs.size(); ++k) order[k] = k;
  if (cfg.order_seed != 0) {
    std::mt19937_64 eng(cfg.order_seed);
    for (size_t k = pairs.size(); k > 1; --k) {
      const size_t r = static_cast<size_t>(eng() % k);
      std::swap(order[k - 1], order[r]);
    }
  } else {
    const Mask all = n_pts >= 64 ? ~Mask(0) : ((Mask(1) << n_pts) - 1);
    std::vector<std::pair<double, int>> key(pairs.size());
    for (size_t k = 0; k < pairs.size(); ++k) {
      const Mask pi = sh.plus[pairs[k].i], pj = sh.plus[pairs[k].j];
      const Mask t4 = ~(pi | pj) & all;
      key[k] = {shared_value_bound(t4, sh.y, sh.y2),
                popcount(sh.l1 & (pi | pj))};
    }
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (key[a].first != key[b].first) return key[a].first < key[b].first;
      if (key[a].second != key[b].second) return key[a].second < key[b].second;
      return a < b;
    });
  }
  std::vector<unsigned long long> order_base(pairs.size() + 1, 0);
  for (size_t k = 0; k < pairs.size(); ++k)
    order_base[k + 1] = order_base[k] + pairs[order[k]].count;

  const int n_threads = std::max(1, cfg.threads);
  std::atomic<size_t> next_chunk{0};
  const size_t chunk = 64;
  const size_t n_chunks = (pairs.size() + chunk - 1) / chunk;
  std::vector<Best> bests(n_threads);

  auto worker = [&](int tid) {
    Best& local = bests[tid];
    while (true) {
      if (sh.stop.load(std::memory_order_relaxed) && local.hit) break;
      const size_t c = next_chunk.fetch_add(1);
      if (c >= n_chunks) break;
      if (sh.stop.load(std::memory_order_relaxed) && !local.hit && c > 0) {
        // Another thread found a hit; still finish chunks that were already
        // claimed in order, but do not start past the stop point.
        // (Chunks are claimed strictly in order, so simply continue.)
      }
      const size_t lo = c * chunk, hi = std::min(pairs.size(), lo + chunk);
      for (size_t k = lo; k < hi; ++k) {
        const Pair& pr = pairs[order[k]];
        process_pair(sh, pr.i, pr.j, decision, pr.enum_base, order_base[k], local);
        if (sh.stop.load(std::memory_order_relaxed) && local.hit) break;
      }
      if (sh.stop.load(std::memory_order_relaxed)) break;
    }
  };

  if (n_threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) threads.emplace_back(worker, t);
    for (auto& t : threads) t.join();
  }

  Best final;
  for (const auto& b : bests) merge_best(final, b, cfg.early_exit);

  res.certificate = !sh.stop.load();
  res.max_kkt_residual = sh.max_kkt.load();
  res.max_constraints = sh.max_constraints.load();

  if (final.valid) {
    res.net = final.net;
    res.loss = final.loss;
    res.pattern = final.pattern;
  } else {
    // Everything was discharged by bounds/filters above tol; report the zero
    // network honestly (its loss is not claimed optimal).
    res.net = TwoReluNet{AffineFunction::zero(d), AffineFunction::zero(d), 0.0, 1, 1, 1.0};
    res.loss = squared_loss(res.net, ds);
  }

  if (cfg.refine_theta && final.valid) {
    double su2 = 0.0, suy = 0.0;
    for (const auto& p : ds.points) {
      const double u =
          relu(res.net.w0 + res.net.w1 * relu(res.net.a1(p.x)) + res.net.w2 * relu(res.net.a2(p.x)));
      su2 += u * u;
      suy += u * p.y;
    }
    const double th = su2 > 0.0 ? suy / su2 : res.net.theta;
    res.refined_theta = th;
    double rl = 0.0;
    for (const auto& p : ds.points) {
      const double u =
          relu(res.net.w0 + res.net.w1 * relu(res.net.a1(p.x)) + res.net.w2 * relu(res.net.a2(p.x)));
      const double r = th * u - p.y;
      rl += r * r;
    }
    res.refined_loss = rl;
  }
  return res;
}

Decision decide_trainability(const Dataset& ds, double tol, TrainConfig cfg) {
  cfg.tol = tol;
  cfg.early_exit = true;
  cfg.decision_mode = ds.labels_binary();
  Decision dec;
  dec.detail = train_exact(ds, cfg);
  dec.trainable = dec.detail.loss <= tol;
  if (dec.trainable) dec.net = dec.detail.net;
  return dec;
}

}  // namespace relu2::exact
