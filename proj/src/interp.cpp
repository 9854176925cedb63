#include "relu2/interp.hpp"

#include "relu2/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace relu2::interp {

Vec sample_direction(int d, uint64_t seed) {
  if (d < 1) throw std::invalid_argument("direction dimension must be positive");
  Rng rng(seed);
  return rng.unit_vector(d);
}

namespace {

// Affine function of the projection value: c * z + b.
struct Piece {
  double c = 0.0, b = 0.0;
  double operator()(double z) const { return c * z + b; }
};

struct ScalarNode {
  Piece a;
  int w = 1;
};

// Steep nodes emitted across near-coincident projections cancel in pairs;
// accumulate in extended precision so the small remainder survives.
double eval_nodes(const std::vector<ScalarNode>& nodes, double z) {
  long double s = 0.0L;
  for (const auto& nd : nodes) {
    const long double v = static_cast<long double>(nd.a.c) * z + nd.a.b;
    if (v > 0.0L) s += nd.w > 0 ? v : -v;
  }
  return static_cast<double>(s);
}

struct SweepChecker {
  const std::vector<double>& zs;
  const std::vector<double>& ys;
  bool enabled;

  void check(const std::vector<ScalarNode>& nodes, const Piece& g, int upto) const {
    if (!enabled) return;
    for (int m = 0; m <= upto; ++m) {
      const double f = eval_nodes(nodes, zs[m]);
      if (ys[m] == 1.0) {
        if (std::abs(f - 1.0) > 1e-9)
          throw std::logic_error("sweep invariant broken: label-1 point not at height 1");
      } else if (!(f < 1.0)) {
        throw std::logic_error("sweep invariant broken: label-0 point reached height 1");
      }
    }
    // The current piece must slope with the last processed label.
    if (ys[upto] == 0.0 && !(g.c < 0.0))
      throw std::logic_error("sweep invariant broken: piece not descending after label 0");
    if (ys[upto] == 1.0 && g.c < 0.0)
      throw std::logic_error("sweep invariant broken: piece descending after label 1");
  }

  void check_prefix(const ScalarNode& nd, int upto) const {
    if (!enabled) return;
    for (int m = 0; m <= upto; ++m)
      if (nd.a(zs[m]) > 1e-9)
        throw std::logic_error("sweep invariant broken: new node active on processed points");
  }
};

}  // namespace

FitResult fit_overparam(const Dataset& ds, uint64_t seed, const FitOptions& opt) {
  ds.validate();
  if (!ds.labels_binary())
    throw std::invalid_argument("interpolation fitter requires labels in {0,1}");
  const int n = ds.size();
  const int d = ds.dim;

  FitResult out;
  out.direction = Vec::Zero(d);

  bool any_one = false;
  for (const auto& p : ds.points) any_one |= (p.y == 1.0);
  if (!any_one) {
    out.net.w0 = 0.0;
    out.net.theta = 0.0;  // F == 0 everywhere
    return out;
  }

  Rng rng(seed);
  int tie_a = -1, tie_b = -1;
  for (int attempt = 1; attempt <= opt.max_retries; ++attempt) {
    out.attempts = attempt;
    const Vec v = rng.unit_vector(d);

    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> proj(n);
    double zmax = 0.0;
    for (int i = 0; i < n; ++i) {
      proj[i] = v.dot(ds.points[i].x);
      zmax = std::max(zmax, std::abs(proj[i]));
    }
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return proj[a] != proj[b] ? proj[a] < proj[b] : a < b;
    });

    bool tie = false;
    for (int k = 0; k + 1 < n; ++k) {
      if (std::abs(proj[idx[k + 1]] - proj[idx[k]]) <= 1e-12 * std::max(1.0, zmax)) {
        tie = true;
        tie_a = idx[k];
        tie_b = idx[k + 1];
        break;
      }
    }
    if (tie) continue;

    std::vector<double> zs(n), ys(n);
    for (int k = 0; k < n; ++k) {
      zs[k] = proj[idx[k]];
      ys[k] = ds.points[idx[k]].y;
    }

    int i1 = 0;
    while (ys[i1] != 1.0) ++i1;

    std::vector<ScalarNode> nodes;
    Piece g;
    SweepChecker checker{zs, ys, opt.check_invariants};

    if (i1 == 0 && n >= 2 && ys[1] == 1.0) {
      // Opening run of ones: a flat unit piece needs no later correction.
      nodes.push_back({{0.0, 1.0}, +1});
      g = {0.0, 1.0};
    } else {
      const double z_before = (i1 == 0) ? zs[0] - 1.0 : zs[i1 - 1];
      const double denom = zs[i1] - z_before;
      Piece a{1.0 / denom, -z_before / denom};
      nodes.push_back({a, +1});
      g = a;
    }
    checker.check(nodes, g, i1);

    for (int k = i1; k + 1 < n; ++k) {
      const double yprev = (k == 0) ? 0.0 : ys[k - 1];
      const double ycur = ys[k], ynext = ys[k + 1];
      if (ynext == ycur) {
        if (ycur != yprev && ycur == 1.0 && g.c != 0.0) {
          // Entering a run of ones on a rising piece: flatten at height 1.
          ScalarNode nd{{g.c, g.b - 1.0}, -1};
          checker.check_prefix(nd, k);
          nodes.push_back(nd);
          g = {0.0, 1.0};
        }
        // Runs of equal labels otherwise ride the current piece.
      } else if (ycur == 0.0) {
        // Rise so the next point lands exactly at height 1.
        const double gv = g(zs[k + 1]);
        const double coef = (1.0 - gv) / (zs[k + 1] - zs[k]);
        ScalarNode nd{{coef, -coef * zs[k]}, +1};
        checker.check_prefix(nd, k);
        nodes.push_back(nd);
        g = {g.c + coef, g.b - coef * zs[k]};
      } else {
        // Leave a run of ones descending with unit slope.
        ScalarNode nd{{g.c + 1.0, g.b - 1.0 - zs[k]}, -1};
        checker.check_prefix(nd, k);
        nodes.push_back(nd);
        g = {-1.0, 1.0 + zs[k]};
      }
      checker.check(nodes, g, k + 1);
    }

    double worst0 = 0.0;  // max of the pre-output function over label-0 points
    bool have0 = false;
    for (int k = 0; k < n; ++k) {
      if (ys[k] == 0.0) {
        const double f = eval_nodes(nodes, zs[k]);
        worst0 = have0 ? std::max(worst0, f) : f;
        have0 = true;
      }
    }
    const double w0 = have0 ? -worst0 : 0.0;

    out.net.nodes.clear();
    out.net.nodes.reserve(nodes.size());
    for (const auto& nd : nodes) {
      KReluNode kn;
      kn.a.alpha = nd.a.c * v;
      kn.a.beta = nd.a.b;
      kn.w = nd.w;
      out.net.nodes.push_back(std::move(kn));
    }
    out.net.w0 = w0;
    out.net.theta = 1.0 / (1.0 + w0);
    out.direction = v;
    return out;
  }

  throw TieError("projections kept colliding after " + std::to_string(opt.max_retries) +
                     " directions; points " + std::to_string(tie_a) + " and " +
                     std::to_string(tie_b) + " appear to coincide",
                 tie_a, tie_b);
}

bool verify_interpolation(const KReluNet& net, const Dataset& ds, double tol) {
  if (static_cast<int>(net.nodes.size()) > ds.size()) return false;
  return max_abs_error(net, ds) <= tol;
}

}  // namespace relu2::interp
