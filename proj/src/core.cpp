#include "relu2/core.hpp"

#include <cmath>

namespace relu2 {

void Dataset::validate() const {
  if (dim < 1) throw DimensionMismatch("dataset dimension must be positive");
  if (points.empty()) throw std::invalid_argument("dataset must contain at least one point");
  for (const auto& p : points) {
    if (p.x.size() != dim)
      throw DimensionMismatch("dataset point dimension does not match declared dimension");
    if (!p.x.allFinite() || !std::isfinite(p.y))
      throw std::invalid_argument("dataset contains non-finite values");
  }
}

bool Dataset::labels_binary() const {
  for (const auto& p : points)
    if (p.y != 0.0 && p.y != 1.0) return false;
  return true;
}

std::vector<int> Dataset::ones() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (points[i].y == 1.0) out.push_back(i);
  return out;
}

std::vector<int> Dataset::zeros() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (points[i].y == 0.0) out.push_back(i);
  return out;
}

double KReluNet::preactivation(const Vec& x) const {
  // Nodes with steep, nearly cancelling slopes are common in constructed
  // interpolants; accumulate in extended precision.
  long double s = 0.0L;
  for (const auto& node : nodes) {
    if (x.size() != node.a.alpha.size())
      throw DimensionMismatch("network applied to vector of wrong dimension");
    long double v = node.a.beta;
    for (Eigen::Index l = 0; l < x.size(); ++l)
      v += static_cast<long double>(node.a.alpha[l]) * x[l];
    if (v > 0.0L) s += node.w > 0 ? v : -v;
  }
  return static_cast<double>(s);
}

KReluNet KReluNet::from_two_relu(const TwoReluNet& net) {
  KReluNet k;
  k.nodes = {{net.a1, net.w1}, {net.a2, net.w2}};
  k.w0 = net.w0;
  k.theta = net.theta;
  return k;
}

namespace {

template <typename Net>
double squared_loss_impl(const Net& net, const Dataset& ds) {
  double total = 0.0;
  for (const auto& p : ds.points) {
    const double r = net.eval(p.x) - p.y;
    total += r * r;
  }
  return total;
}

template <typename Net>
double max_abs_error_impl(const Net& net, const Dataset& ds) {
  double worst = 0.0;
  for (const auto& p : ds.points)
    worst = std::max(worst, std::abs(net.eval(p.x) - p.y));
  return worst;
}

}  // namespace

double squared_loss(const TwoReluNet& net, const Dataset& ds) { return squared_loss_impl(net, ds); }
double squared_loss(const KReluNet& net, const Dataset& ds) { return squared_loss_impl(net, ds); }
double max_abs_error(const TwoReluNet& net, const Dataset& ds) { return max_abs_error_impl(net, ds); }
double max_abs_error(const KReluNet& net, const Dataset& ds) { return max_abs_error_impl(net, ds); }

bool zero_loss_decision(const TwoReluNet& net, const Dataset& ds, double tol) {
  return max_abs_error(net, ds) <= tol;
}
bool zero_loss_decision(const KReluNet& net, const Dataset& ds, double tol) {
  return max_abs_error(net, ds) <= tol;
}

}  // namespace relu2
