// Core domain types: labeled datasets, affine functions, and the small
// ReLU network shapes everything else in the library operates on.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace relu2 {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double relu(double t) { return t > 0.0 ? t : 0.0; }

// alpha . x + beta
struct AffineFunction {
  Vec alpha;
  double beta = 0.0;

  AffineFunction() = default;
  AffineFunction(Vec a, double b) : alpha(std::move(a)), beta(b) {}
  static AffineFunction zero(int d) { return {Vec::Zero(d), 0.0}; }

  int dim() const { return static_cast<int>(alpha.size()); }

  double operator()(const Vec& x) const {
    if (x.size() != alpha.size())
      throw DimensionMismatch("affine function applied to vector of wrong dimension");
    return alpha.dot(x) + beta;
  }

  // A degenerate function has no normal direction and cannot act as a
  // separating hyperplane.
  bool degenerate(double tol = 0.0) const {
    return alpha.size() == 0 || alpha.lpNorm<Eigen::Infinity>() <= tol;
  }
};

struct LabeledPoint {
  Vec x;
  double y = 0.0;
};

struct Dataset {
  std::vector<LabeledPoint> points;
  int dim = 0;

  int size() const { return static_cast<int>(points.size()); }

  void validate() const;

  bool labels_binary() const;
  // Indices with y == 1 / y == 0 (only meaningful for binary labels).
  std::vector<int> ones() const;
  std::vector<int> zeros() const;
};

// F(x) = theta * [w0 + w1*[a1(x)]+ + w2*[a2(x)]+]+   with w1, w2 in {-1,+1}.
struct TwoReluNet {
  AffineFunction a1, a2;
  double w0 = 0.0;
  int w1 = 1, w2 = 1;
  double theta = 1.0;

  int dim() const { return a1.dim(); }
  double eval(const Vec& x) const {
    return theta * relu(w0 + w1 * relu(a1(x)) + w2 * relu(a2(x)));
  }
};

struct KReluNode {
  AffineFunction a;
  int w = 1;  // in {-1,+1}
};

// theta * [w0 + sum_j w_j [a_j(x)]+]+
struct KReluNet {
  std::vector<KReluNode> nodes;
  double w0 = 0.0;
  double theta = 1.0;

  int dim() const { return nodes.empty() ? -1 : nodes.front().a.dim(); }
  double preactivation(const Vec& x) const;  // sum_j w_j [a_j(x)]+
  double eval(const Vec& x) const { return theta * relu(w0 + preactivation(x)); }

  static KReluNet from_two_relu(const TwoReluNet& net);
};

double squared_loss(const TwoReluNet& net, const Dataset& ds);
double squared_loss(const KReluNet& net, const Dataset& ds);
double max_abs_error(const TwoReluNet& net, const Dataset& ds);
double max_abs_error(const KReluNet& net, const Dataset& ds);

// True iff the network reproduces every label to within tol.
bool zero_loss_decision(const TwoReluNet& net, const Dataset& ds, double tol);
bool zero_loss_decision(const KReluNet& net, const Dataset& ds, double tol);

}  // namespace relu2
