#include "relu2/qp.hpp"

#include "relu2/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace relu2::qp {

namespace {

constexpr double kStepEps = 1e-12;
constexpr double kMultEps = 1e-9;
constexpr double kDirEps = 1e-12;

Mat rows_of(const Mat& G, const std::vector<int>& idx) {
  Mat out(idx.size(), G.cols());
  for (size_t k = 0; k < idx.size(); ++k) out.row(k) = G.row(idx[k]);
  return out;
}

}  // namespace

void QuadraticProgram::validate() const {
  if (n < 1) throw std::invalid_argument("quadratic program needs at least one variable");
  if (R.rows() != t.size() || (R.rows() > 0 && R.cols() != n))
    throw DimensionMismatch("objective rows inconsistent with variable count");
  if (G.rows() != h.size() || (G.rows() > 0 && G.cols() != n))
    throw DimensionMismatch("constraint rows inconsistent with variable count");
}

QpSolution solve_qp(const QuadraticProgram& qp) {
  qp.validate();
  const int n = qp.n;
  const int m = static_cast<int>(qp.G.rows());

  QpSolution sol;
  Vec z = Vec::Zero(n);

  // Starting point. z = 0 covers the homogeneous constraint systems the
  // trainer generates; anything else goes through a phase-1 LP.
  if (m > 0) {
    const double viol0 = (qp.G * z - qp.h).maxCoeff();
    if (viol0 > kFeasTol) {
      Vec c = Vec::Zero(n + 1);
      c[n] = -1.0;  // maximize -sigma
      Mat Gp(m + 1, n + 1);
      Vec hp(m + 1);
      Gp.topLeftCorner(m, n) = qp.G;
      Gp.col(n).head(m).setConstant(-1.0);
      Gp.row(m).setZero();
      Gp(m, n) = -1.0;  // sigma >= -1
      hp.head(m) = qp.h;
      hp[m] = 1.0;
      const auto lpres = lp::solve_max(c, Gp, hp);
      if (lpres.status != lp::Status::Optimal) {
        sol.status = QpStatus::Infeasible;
        sol.infeasibility = std::numeric_limits<double>::infinity();
        sol.z = z;
        sol.objective = std::numeric_limits<double>::infinity();
        return sol;
      }
      const double sigma = lpres.x[n];
      if (sigma > kFeasTol) {
        sol.status = QpStatus::Infeasible;
        sol.infeasibility = sigma;
        sol.z = lpres.x.head(n);
        sol.objective = std::numeric_limits<double>::infinity();
        return sol;
      }
      z = lpres.x.head(n);
    }
  }

  std::vector<int> active;
  std::vector<char> in_active(m, 0);
  Vec lambda;  // multipliers for the active rows

  const int max_iters = 100 * (m + n + 2);
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    // Step direction: minimizer of the objective over { p : G_A p = 0 },
    // reached from the current point.
    Vec p;
    Mat kernel;
    if (active.empty()) {
      kernel = Mat::Identity(n, n);
    } else {
      Eigen::FullPivLU<Mat> lu(rows_of(qp.G, active));
      kernel = lu.kernel();
      if (lu.dimensionOfKernel() == 0) kernel = Mat::Zero(n, 0);
    }
    if (kernel.cols() == 0) {
      p = Vec::Zero(n);
    } else {
      const Mat RZ = qp.R * kernel;
      const Vec rhs = qp.t - qp.R * z;
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(RZ);
      p = kernel * cod.solve(rhs);
    }

    if (p.lpNorm<Eigen::Infinity>() <= kStepEps * (1.0 + z.lpNorm<Eigen::Infinity>())) {
      // At the subspace minimum: check multipliers.
      if (active.empty()) break;
      const Vec grad = 2.0 * qp.R.transpose() * (qp.R * z - qp.t);
      const Mat GAt = rows_of(qp.G, active).transpose();
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(GAt);
      lambda = cod.solve(-grad);
      int drop = -1;
      for (size_t k = 0; k < active.size(); ++k) {
        if (lambda[k] < -kMultEps) {
          drop = static_cast<int>(k);
          break;  // lowest constraint index first (active is kept sorted)
        }
      }
      if (drop < 0) break;
      in_active[active[drop]] = 0;
      active.erase(active.begin() + drop);
      continue;
    }

    // Ratio test against inactive constraints.
    double alpha = 1.0;
    int blocker = -1;
    for (int i = 0; i < m; ++i) {
      if (in_active[i]) continue;
      const double gp = qp.G.row(i).dot(p);
      if (gp > kDirEps) {
        double ai = (qp.h[i] - qp.G.row(i).dot(z)) / gp;
        if (ai < 0.0) ai = 0.0;
        if (ai < alpha - 1e-15) {
          alpha = ai;
          blocker = i;
        }
      }
    }
    z += alpha * p;
    if (blocker >= 0) {
      auto pos = std::lower_bound(active.begin(), active.end(), blocker);
      active.insert(pos, blocker);
      in_active[blocker] = 1;
    }
  }

  // KKT residuals: primal feasibility, stationarity, dual feasibility and
  // complementarity. Large values flag a problem the caller should see.
  const Vec grad = 2.0 * qp.R.transpose() * (qp.R * z - qp.t);
  Vec stat = grad;
  double dual_viol = 0.0, compl_viol = 0.0;
  if (!active.empty()) {
    const Mat GA = rows_of(qp.G, active);
    if (lambda.size() != static_cast<Eigen::Index>(active.size())) {
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(GA.transpose());
      lambda = cod.solve(-grad);
    }
    stat += GA.transpose() * lambda;
    for (size_t k = 0; k < active.size(); ++k) {
      dual_viol = std::max(dual_viol, -lambda[k]);
      const double slack = qp.h[active[k]] - qp.G.row(active[k]).dot(z);
      compl_viol = std::max(compl_viol, std::abs(lambda[k] * slack));
    }
  }
  double feas_viol = 0.0;
  if (m > 0) feas_viol = std::max(0.0, (qp.G * z - qp.h).maxCoeff());

  sol.z = z;
  sol.objective = (qp.R * z - qp.t).squaredNorm() + qp.offset;
  sol.kkt_residual = std::max({stat.lpNorm<Eigen::Infinity>(), feas_viol, dual_viol, compl_viol});
  sol.status = QpStatus::Optimal;
  return sol;
}

}  // namespace relu2::qp
