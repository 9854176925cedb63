#include "relu2/reduce.hpp"

#include "relu2/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relu2::reduce {

namespace {

// Coordinates and labels of the 12 fixed points in the appended plane.
struct TailPoint {
  double l, m, y;
};

const TailPoint kTail[12] = {
    {1, 1, 1}, {2, 1, 1}, {1, 2, 1}, {2, 2, 1},   // labeled 1
    {1, -1, 0}, {2, -1, 0}, {3, -1, 0},           // below the l-axis
    {-1, 1, 0}, {-1, 2, 0}, {-1, 3, 0},           // left of the m-axis
    {-1, 0, 0}, {0, -1, 0},
};

AffineFunction sup_normalized(const AffineFunction& p) {
  const double n = p.alpha.size() ? p.alpha.lpNorm<Eigen::Infinity>() : 0.0;
  if (n <= 0.0) return p;
  return {p.alpha / n, p.beta / n};
}

}  // namespace

void SeparabilityInstance::validate() const {
  if (dim < 1) throw DimensionMismatch("instance dimension must be positive");
  const int n = size();
  std::vector<char> seen(n, 0);
  for (int i : s1) {
    if (i < 0 || i >= n || seen[i]) throw std::invalid_argument("bad S1 index set");
    seen[i] = 1;
  }
  for (int i : s0) {
    if (i < 0 || i >= n || seen[i]) throw std::invalid_argument("S0 overlaps S1 or is out of range");
    seen[i] = 1;
  }
  for (char c : seen)
    if (!c) throw std::invalid_argument("S1 and S0 must cover every point");
  if (s1.empty()) throw std::invalid_argument("S1 must be nonempty");
  for (const auto& p : points)
    if (p.size() != dim) throw DimensionMismatch("instance point dimension mismatch");
  if (shift && shift->size() != dim)
    throw DimensionMismatch("instance shift dimension mismatch");
}

bool SeparabilityInstance::is_normalized(double tol) const {
  for (int i : s1)
    if (points[i].lpNorm<Eigen::Infinity>() <= tol) return true;
  return false;
}

SeparabilityInstance normalize_instance(const SeparabilityInstance& inst) {
  inst.validate();
  const int anchor = *std::min_element(inst.s1.begin(), inst.s1.end());
  SeparabilityInstance out = inst;
  const Vec t = inst.points[anchor];
  for (auto& p : out.points) p -= t;
  out.shift = inst.shift ? Vec(*inst.shift + t) : t;
  return out;
}

bool check_separability(const SeparabilityInstance& inst, const TwoPlaneWitness& w,
                        double tol) {
  inst.validate();
  const AffineFunction p1 = sup_normalized(w.plane1);
  const AffineFunction p2 = sup_normalized(w.plane2);
  for (int i : inst.s1)
    if (p1(inst.points[i]) < tol || p2(inst.points[i]) < tol) return false;
  for (int i : inst.s0)
    if (std::min(p1(inst.points[i]), p2(inst.points[i])) > -tol) return false;
  return true;
}

bool separable_exhaustive(const SeparabilityInstance& inst) {
  inst.validate();
  const auto dichotomies = geometry::enumerate_dichotomies(inst.points, inst.dim);
  const int n = inst.size();
  std::vector<uint64_t> plus(dichotomies.size(), 0);
  for (size_t k = 0; k < dichotomies.size(); ++k)
    for (int i = 0; i < n; ++i)
      if (dichotomies[k].signs[i] > 0) plus[k] |= uint64_t(1) << i;
  uint64_t m1 = 0, m0 = 0;
  for (int i : inst.s1) m1 |= uint64_t(1) << i;
  for (int i : inst.s0) m0 |= uint64_t(1) << i;
  for (size_t a = 0; a < plus.size(); ++a)
    for (size_t b = a; b < plus.size(); ++b) {
      const uint64_t quad = plus[a] & plus[b];
      if ((m1 & ~quad) == 0 && (m0 & quad) == 0) return true;
    }
  return false;
}

Dataset build_gadget(const SeparabilityInstance& inst) {
  inst.validate();
  if (!inst.is_normalized())
    throw std::invalid_argument("instance must be normalized (an S1 point at the origin)");
  const int d = inst.dim;
  Dataset ds;
  ds.dim = d + 2;
  ds.points.reserve(inst.size() + 12);
  std::vector<char> is_one(inst.size(), 0);
  for (int i : inst.s1) is_one[i] = 1;
  for (int i = 0; i < inst.size(); ++i) {
    Vec x = Vec::Zero(d + 2);
    x.head(d) = inst.points[i];
    ds.points.push_back({std::move(x), is_one[i] ? 1.0 : 0.0});
  }
  for (const auto& t : kTail) {
    Vec x = Vec::Zero(d + 2);
    x[d] = t.l;
    x[d + 1] = t.m;
    ds.points.push_back({std::move(x), t.y});
  }
  return ds;
}

Dataset gadget_only_dataset() {
  Dataset ds;
  ds.dim = 2;
  ds.points.push_back({Vec::Zero(2), 1.0});
  for (const auto& t : kTail) {
    Vec x(2);
    x << t.l, t.m;
    ds.points.push_back({std::move(x), t.y});
  }
  return ds;
}

ForwardConstruction forward_construct(const SeparabilityInstance& inst,
                                      const TwoPlaneWitness& w) {
  inst.validate();
  if (!inst.is_normalized())
    throw std::invalid_argument("instance must be normalized before construction");
  if (!check_separability(inst, w))
    throw InvalidWitness("witness does not separate the instance");

  // Scale each plane so its offset is exactly 1/2 (valid: the origin lies in
  // S1, so both offsets are strictly positive).
  const double b1 = w.plane1(Vec::Zero(inst.dim));
  const double b2 = w.plane2(Vec::Zero(inst.dim));
  if (b1 <= 0.0 || b2 <= 0.0)
    throw InvalidWitness("witness offsets must be positive on a normalized instance");
  Vec a1 = w.plane1.alpha * (0.5 / b1);
  Vec a2 = w.plane2.alpha * (0.5 / b2);

  double eps = std::numeric_limits<double>::infinity();
  for (int i : inst.s0) {
    const Vec& x = inst.points[i];
    eps = std::min(eps, relu(-a1.dot(x) - 0.5) + relu(-a2.dot(x) - 0.5));
  }
  if (!(eps > 0.0)) throw InvalidWitness("witness margin vanished on S0");
  const double eta = std::min(0.5 * eps, 0.25);

  const int d = inst.dim;
  ForwardConstruction out;
  out.epsilon = eps;
  out.eta = eta;
  TwoReluNet& net = out.net;
  net.a1.alpha = Vec::Zero(d + 2);
  net.a1.alpha.head(d) = -a1;
  net.a1.alpha[d] = -1.0;
  net.a1.beta = -0.5;
  net.a2.alpha = Vec::Zero(d + 2);
  net.a2.alpha.head(d) = -a2;
  net.a2.alpha[d + 1] = -1.0;
  net.a2.beta = -0.5;
  net.w1 = net.w2 = -1;
  net.w0 = eta;
  net.theta = 1.0 / eta;
  return out;
}

namespace {

double hard_sort_value(const HardSortWitness& w, const Vec& x) {
  return w.w1 * relu(w.l1(x)) + w.w2 * relu(w.l2(x));
}

}  // namespace

bool check_hard_sort(const std::vector<Vec>& points, const std::vector<int>& pi1,
                     const HardSortWitness& w, double tol) {
  if (w.w1 * w.w1 != 1 || w.w2 * w.w2 != 1)
    throw std::invalid_argument("hard-sort weights must be +1 or -1");
  std::vector<char> in1(points.size(), 0);
  for (int i : pi1) {
    if (i < 0 || i >= static_cast<int>(points.size()))
      throw std::invalid_argument("pi1 index out of range");
    in1[i] = 1;
  }
  for (size_t i = 0; i < points.size(); ++i) {
    const double s = hard_sort_value(w, points[i]);
    if (in1[i]) {
      if (std::abs(s - w.c) > tol) return false;
    } else {
      const double gap = (w.side == HardSortSide::Above) ? s - w.c : w.c - s;
      if (gap < tol) return false;
    }
  }
  return true;
}

TwoReluNet net_from_hard_sort(const HardSortWitness& w, const std::vector<Vec>& points,
                              const std::vector<int>& pi1) {
  if (!check_hard_sort(points, pi1, w, kStrictTol))
    throw InvalidWitness("hard-sort witness fails its own check");
  std::vector<char> in1(points.size(), 0);
  for (int i : pi1) in1[i] = 1;
  double eps = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < points.size(); ++i) {
    if (in1[i]) continue;
    const double s = hard_sort_value(w, points[i]);
    eps = std::min(eps, (w.side == HardSortSide::Above) ? s - w.c : w.c - s);
  }
  if (!std::isfinite(eps)) eps = 1.0;  // no second class: any positive slack works

  TwoReluNet net;
  net.a1 = w.l1;
  net.a2 = w.l2;
  net.theta = 2.0 / eps;
  if (w.side == HardSortSide::Above) {
    net.w1 = -w.w1;
    net.w2 = -w.w2;
    net.w0 = w.c + 0.5 * eps;
  } else {
    net.w1 = w.w1;
    net.w2 = w.w2;
    net.w0 = -w.c + 0.5 * eps;
  }
  return net;
}

TwoPlaneWitness extract_separability_witness(const TwoReluNet& net,
                                             const SeparabilityInstance& inst,
                                             double tol) {
  inst.validate();
  const Dataset reduced = build_gadget(inst);
  const double err = max_abs_error(net, reduced);
  if (err > tol)
    throw std::invalid_argument("network does not reach zero loss on the reduced dataset");

  const int d = inst.dim;
  TwoPlaneWitness cand;
  cand.plane1 = {Vec(-net.a1.alpha.head(d)), -net.a1.beta};
  cand.plane2 = {Vec(-net.a2.alpha.head(d)), -net.a2.beta};

  // Strictness on S1 may be only weak (the network needs a_i <= 0 there, not
  // < 0); shifting both planes by half the S0 slack restores it.
  const AffineFunction n1 = sup_normalized(cand.plane1);
  const AffineFunction n2 = sup_normalized(cand.plane2);
  double margin1 = std::numeric_limits<double>::infinity();
  for (int i : inst.s1)
    margin1 = std::min(margin1, std::min(n1(inst.points[i]), n2(inst.points[i])));
  if (margin1 < kStrictTol) {
    double eps = std::numeric_limits<double>::infinity();
    for (int i : inst.s0) {
      const Vec& x = inst.points[i];
      eps = std::min(eps, std::max(-cand.plane1(x), -cand.plane2(x)));
    }
    if (!std::isfinite(eps)) eps = 1.0;
    if (eps <= 0.0)
      throw std::runtime_error("extracted planes have no slack over S0 to shift into");
    cand.plane1.beta += 0.5 * eps;
    cand.plane2.beta += 0.5 * eps;
  }

  if (!check_separability(inst, cand))
    throw std::runtime_error("extracted planes fail the separability check");

  if (inst.shift) {
    cand.plane1.beta -= cand.plane1.alpha.dot(*inst.shift);
    cand.plane2.beta -= cand.plane2.alpha.dot(*inst.shift);
  }
  return cand;
}

}  // namespace relu2::reduce
