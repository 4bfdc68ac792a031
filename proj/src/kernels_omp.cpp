#include "jointnorm/kernels.hpp"

namespace jointnorm::kernels::omp {

void row_means(const RowMatrix& y, Vector& out) {
  const Index m = y.rows();
  const Index n = y.cols();
  out.resize(m);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) s += y(i, j);
    out[i] = s / static_cast<double>(n);
  }
}

// One thread per column; every column is still summed over genes in order.
void weighted_column_means(const RowMatrix& y, const Vector& weights,
                           Vector& out) {
  const Index m = y.rows();
  const Index n = y.cols();
  double total = 0.0;
  for (Index i = 0; i < m; ++i) total += weights[i];
  out.resize(n);
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Index i = 0; i < m; ++i) s += weights[i] * y(i, j);
    out[j] = s / total;
  }
}

void double_center(const RowMatrix& y, const Vector& row_means,
                   const Vector& col_means, double grand_mean, RowMatrix& out) {
  const Index m = y.rows();
  const Index n = y.cols();
  out.resize(m, n);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      out(i, j) = ((y(i, j) - row_means[i]) - col_means[j]) + grand_mean;
}

void project_rows(const RowMatrix& y, const RowMatrix& x, RowMatrix& out) {
  const Index m = y.rows();
  const Index n = y.cols();
  const Index p = x.cols();
  out.resize(m, p);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i)
    for (Index k = 0; k < p; ++k) {
      double s = 0.0;
      for (Index j = 0; j < n; ++j) s += x(j, k) * y(i, j);
      out(i, k) = s;
    }
}

void lasso_sweep(const LassoSweep& a, Vector& next) {
  const Vector& c = *a.projection;
  const Vector& w = *a.weights;
  const Vector& beta = *a.beta;
  const Index m = c.size();
  const double inv_w = 1.0 / a.weight_sum;
  next.resize(m);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < m; ++i) {
    const double others = (a.weighted_beta_sum - w[i] * beta[i]) * inv_w;
    const double target =
        (c[i] + a.delta0) - inv_w * (a.lambda + a.rho * (others - a.delta0));
    const double shrink = 1.0 + a.rho * w[i] * inv_w * inv_w;
    next[i] = soft_threshold(target, a.alpha / w[i]) / shrink;
  }
}

} // namespace jointnorm::kernels::omp
