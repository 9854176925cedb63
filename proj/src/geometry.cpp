#include "relu2/geometry.hpp"

#include "relu2/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace relu2::geometry {

namespace {

struct Prescale {
  Vec center;
  double scale = 1.0;
};

Prescale fit_prescale(const std::vector<Vec>& pts, int d) {
  Prescale ps;
  ps.center = Vec::Zero(d);
  if (pts.empty()) return ps;
  Vec lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  ps.center = 0.5 * (lo + hi);
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, (p - ps.center).lpNorm<Eigen::Infinity>());
  ps.scale = s > 0.0 ? s : 1.0;
  return ps;
}

// Witness in rescaled coordinates -> witness on the original points.
AffineFunction unscale(const Vec& w, int d, const Prescale& ps) {
  AffineFunction f;
  f.alpha = w.head(d) / ps.scale;
  f.beta = w[d] - f.alpha.dot(ps.center);
  return f;
}

struct Cell {
  std::vector<int8_t> signs;
  Vec w;          // lifted witness (alpha, beta), rescaled coordinates
  double margin;  // min_i signs[i] * (w . lifted[i])
};

// max delta s.t. sign_i * (rows_i . w) >= delta, |w_j| <= 1 for the normal
// coefficients. The bias (last lifted coordinate) gets a box wide enough to
// never bind at the optimum, so the margin is the one attained under
// |alpha|_inf <= 1 alone. Returns (delta, w).
std::pair<double, Vec> max_margin(const std::vector<Vec>& rows,
                                  const std::vector<int8_t>& signs, int lifted_dim) {
  const int m = static_cast<int>(rows.size());
  Vec c = Vec::Zero(lifted_dim + 1);
  c[lifted_dim] = 1.0;
  Mat G(m + 2 * lifted_dim, lifted_dim + 1);
  Vec h(m + 2 * lifted_dim);
  for (int i = 0; i < m; ++i) {
    G.row(i).head(lifted_dim) = -double(signs[i]) * rows[i].transpose();
    G(i, lifted_dim) = 1.0;
    h[i] = 0.0;
  }
  const double bias_box = 2.0 * lifted_dim + 4.0;
  for (int j = 0; j < lifted_dim; ++j) {
    const double box = (j == lifted_dim - 1) ? bias_box : 1.0;
    G.row(m + 2 * j).setZero();
    G(m + 2 * j, j) = 1.0;
    h[m + 2 * j] = box;
    G.row(m + 2 * j + 1).setZero();
    G(m + 2 * j + 1, j) = -1.0;
    h[m + 2 * j + 1] = box;
  }
  const auto res = lp::solve_max(c, G, h);
  if (res.status != lp::Status::Optimal) return {-1.0, Vec::Zero(lifted_dim)};
  return {res.value, res.x.head(lifted_dim)};
}

}  // namespace

unsigned long long cover_count(int n_points, int d) {
  unsigned long long total = 0;
  for (int k = 0; k <= std::min(d, n_points - 1); ++k) {
    unsigned long long c = 1;  // C(n_points - 1, k), built up exactly
    for (int j = 0; j < k; ++j) c = c * (n_points - 1 - j) / (j + 1);
    total += c;
  }
  return 2 * total;
}

std::vector<Dichotomy> enumerate_dichotomies(const std::vector<Vec>& points, int d) {
  std::vector<Dichotomy> out;
  const int n = static_cast<int>(points.size());
  if (n == 0) return out;
  for (const auto& p : points)
    if (p.size() != d) throw DimensionMismatch("point dimension mismatch in enumeration");

  // Collapse exact duplicates; they share a sign by construction.
  std::vector<int> rep_of(n);
  std::vector<int> uniq;
  {
    std::map<std::vector<double>, int> seen;
    for (int i = 0; i < n; ++i) {
      std::vector<double> key(points[i].data(), points[i].data() + d);
      auto [it, inserted] = seen.try_emplace(key, static_cast<int>(uniq.size()));
      if (inserted) uniq.push_back(i);
      rep_of[i] = it->second;
    }
  }
  const int m = static_cast<int>(uniq.size());

  std::vector<Vec> upts(m);
  for (int k = 0; k < m; ++k) upts[k] = points[uniq[k]];
  const Prescale ps = fit_prescale(upts, d);

  std::vector<Vec> lifted(m);
  for (int k = 0; k < m; ++k) {
    Vec l(d + 1);
    l.head(d) = (upts[k] - ps.center) / ps.scale;
    l[d] = 1.0;
    lifted[k] = l;
  }

  // Insert points one at a time; each cell either keeps its sign pattern on
  // one side of the new plane pencil or splits into two.
  std::vector<Cell> cells;
  for (int8_t s : {int8_t(+1), int8_t(-1)}) {
    auto [delta, w] = max_margin({lifted[0]}, {s}, d + 1);
    if (delta > kGeomTol) cells.push_back({{s}, w, delta});
  }
  std::vector<Vec> rows;
  std::vector<int8_t> sgns;
  for (int k = 1; k < m; ++k) {
    std::vector<Cell> next;
    next.reserve(cells.size() * 2);
    for (auto& cell : cells) {
      const double val = cell.w.dot(lifted[k]);
      for (int8_t side : {int8_t(+1), int8_t(-1)}) {
        const double sval = side * val;
        if (sval >= 1e-7) {
          Cell c = cell;
          c.signs.push_back(side);
          c.margin = std::min(c.margin, sval);
          next.push_back(std::move(c));
          continue;
        }
        rows.assign(lifted.begin(), lifted.begin() + k + 1);
        sgns = cell.signs;
        sgns.push_back(side);
        auto [delta, w] = max_margin(rows, sgns, d + 1);
        if (delta > kGeomTol) next.push_back({sgns, w, delta});
      }
    }
    cells = std::move(next);
  }

  out.reserve(cells.size());
  for (const auto& cell : cells) {
    Dichotomy dich;
    dich.signs.resize(n);
    for (int i = 0; i < n; ++i) dich.signs[i] = cell.signs[rep_of[i]];
    dich.witness = unscale(cell.w, d, ps);
    out.push_back(std::move(dich));
  }
  std::sort(out.begin(), out.end(),
            [](const Dichotomy& a, const Dichotomy& b) { return a.signs < b.signs; });
  return out;
}

std::optional<AffineFunction> strict_separation_lp(const std::vector<Vec>& A,
                                                   const std::vector<Vec>& B) {
  if (A.empty() || B.empty())
    throw std::invalid_argument("strict separation needs two nonempty point sets");
  const int d = static_cast<int>(A[0].size());
  std::vector<Vec> all;
  all.reserve(A.size() + B.size());
  std::vector<int8_t> signs;
  for (const auto& a : A) {
    if (a.size() != d) throw DimensionMismatch("separation input dimension mismatch");
    all.push_back(a);
    signs.push_back(+1);
  }
  for (const auto& b : B) {
    if (b.size() != d) throw DimensionMismatch("separation input dimension mismatch");
    all.push_back(b);
    signs.push_back(-1);
  }
  const Prescale ps = fit_prescale(all, d);
  std::vector<Vec> lifted(all.size());
  for (size_t i = 0; i < all.size(); ++i) {
    Vec l(d + 1);
    l.head(d) = (all[i] - ps.center) / ps.scale;
    l[d] = 1.0;
    lifted[i] = l;
  }
  auto [delta, w] = max_margin(lifted, signs, d + 1);
  if (delta <= kGeomTol) return std::nullopt;
  return unscale(w, d, ps);
}

}  // namespace relu2::geometry
