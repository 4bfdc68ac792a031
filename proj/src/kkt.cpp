#include "jointnorm/kkt.hpp"

#include "jointnorm/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace jointnorm {

namespace {

Vector weighted_row_mean(const RowMatrix& beta, const Vector& w) {
  Vector mean(beta.cols());
  for (Index k = 0; k < beta.cols(); ++k)
    mean[k] = kernels::weighted_mean(beta.col(k), w);
  return mean;
}

} // namespace

double penalized_objective(const CenteredExpression& yt, const RowMatrix& x,
                           const RowMatrix& beta, double alpha, Penalty penalty,
                           Index interest) {
  const Index m = yt.genes();
  const Index n = yt.samples();
  const Vector& w = yt.weights;
  const Vector bar = weighted_row_mean(beta, w);

  double total = 0.0;
  for (Index i = 0; i < m; ++i) {
    const Vector diff = beta.row(i).transpose() - bar;
    double ss = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double r = yt.values(i, j) - x.row(j).dot(diff);
      ss += r * r;
    }
    total += 0.5 * w[i] * ss;
    total += alpha * (penalty == Penalty::Type2 ? beta.row(i).norm()
                                                : std::abs(beta(i, interest)));
  }
  return total;
}

RowMatrix smooth_gradient(const CenteredExpression& yt, const RowMatrix& x,
                          const RowMatrix& beta) {
  const Index m = yt.genes();
  const Vector& w = yt.weights;
  const Vector bar = weighted_row_mean(beta, w);
  const Eigen::MatrixXd gram = x.transpose() * x;

  RowMatrix grad(m, beta.cols());
  for (Index i = 0; i < m; ++i) {
    const Vector xty = x.transpose() * yt.values.row(i).transpose();
    const Vector diff = beta.row(i).transpose() - bar;
    grad.row(i) = (w[i] * (gram * diff - xty)).transpose();
  }
  return grad;
}

double kkt_residual(const CenteredExpression& yt, const RowMatrix& x,
                    const RowMatrix& beta, double alpha, Penalty penalty,
                    Index interest) {
  const RowMatrix grad = smooth_gradient(yt, x, beta);
  double worst = 0.0;
  for (Index i = 0; i < grad.rows(); ++i) {
    if (penalty == Penalty::Type2) {
      const double norm = beta.row(i).norm();
      const double v = norm > 0.0
                           ? (grad.row(i) + alpha * beta.row(i) / norm).norm()
                           : std::max(0.0, grad.row(i).norm() - alpha);
      worst = std::max(worst, v);
      continue;
    }
    for (Index k = 0; k < grad.cols(); ++k) {
      double v = std::abs(grad(i, k));
      if (k == interest) {
        const double b = beta(i, k);
        v = b != 0.0 ? std::abs(grad(i, k) + alpha * (b > 0.0 ? 1.0 : -1.0))
                     : std::max(0.0, std::abs(grad(i, k)) - alpha);
      }
      worst = std::max(worst, v);
    }
  }
  return worst;
}

} // namespace jointnorm
