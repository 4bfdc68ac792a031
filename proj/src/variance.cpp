#include "jointnorm/variance.hpp"

#include "jointnorm/centering.hpp"
#include "jointnorm/kernels.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>

namespace jointnorm {

VarianceEstimates VarianceEstimates::fixed(const Vector& sigma2) {
  VarianceEstimates v;
  v.raw = sigma2;
  v.shrunken = sigma2;
  v.mean_variance = sigma2.mean();
  v.converged = true;
  return v;
}

VarianceEstimates estimate_variances(const RowMatrix& y, const DesignMatrix& x,
                                     const VarianceOptions& options) {
  const Index m = y.rows();
  const Index n = y.cols();
  const Index p = x.covariates();
  if (x.samples() != n) throw DataError("design rows must match sample count");
  if (m < 2) throw DataError("variance estimation needs at least 2 genes");
  if (n <= p + 1) throw DataError("insufficient replication");
  if (!(options.floor > 0.0)) throw ConfigError("variance floor must be positive");

  const RowMatrix& xs = x.values;
  const Eigen::MatrixXd gram = xs.transpose() * xs;
  const Eigen::LDLT<Eigen::MatrixXd> gram_solver(gram);
  if (gram_solver.info() != Eigen::Success || !gram_solver.isPositive())
    throw DataError("degenerate design: covariates are collinear");

  VarianceEstimates est;
  est.raw = Vector::Ones(m);
  Vector beta_bar = Vector::Zero(p); // weighted mean of coefficient rows
  RowMatrix beta(m, p);
  RowMatrix projection;
  Vector next(m);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Vector weights = est.raw.cwiseInverse();
    const CenteredExpression yt = center_expression(y, weights);
    kernels::omp::project_rows(yt.values, xs, projection);

#pragma omp parallel for schedule(static)
    for (Index i = 0; i < m; ++i) {
      // beta_i - beta_bar is the unpenalized fit of y~_i on X.
      const Vector fit = gram_solver.solve(projection.row(i).transpose());
      beta.row(i) = (fit + beta_bar).transpose();
      double ss = 0.0;
      for (Index j = 0; j < n; ++j) {
        double r = yt.values(i, j);
        for (Index k = 0; k < p; ++k) r -= xs(j, k) * fit[k];
        ss += r * r;
      }
      next[i] = std::max(ss * inv_n, options.floor);
    }

    double change = 0.0;
    for (Index i = 0; i < m; ++i)
      change = std::max(change, std::abs(next[i] - est.raw[i]) / est.raw[i]);
    est.raw = next;

    const Vector new_weights = est.raw.cwiseInverse();
    for (Index k = 0; k < p; ++k)
      beta_bar[k] = kernels::weighted_mean(beta.col(k), new_weights);

    est.iterations = iter;
    if (change < options.tol) {
      est.converged = true;
      break;
    }
  }

  est.shrunken = est.raw;
  est.mean_variance = est.raw.mean();
  return est;
}

VarianceEstimates shrink_with_weight(const Vector& raw, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0))
    throw ConfigError("shrinkage weight must be in [0,1]");
  const Index m = raw.size();
  if (m < 1) throw DataError("no variances to shrink");
  VarianceEstimates est;
  est.raw = raw;
  double total = 0.0;
  for (Index i = 0; i < m; ++i) total += raw[i];
  est.mean_variance = total / static_cast<double>(m);
  est.weight = weight;
  est.shrunken.resize(m);
  for (Index i = 0; i < m; ++i)
    est.shrunken[i] = weight == 1.0 ? est.mean_variance
                                    : (1.0 - weight) * raw[i] + weight * est.mean_variance;
  return est;
}

VarianceEstimates shrink_variances(const Vector& raw, Index samples) {
  const Index m = raw.size();
  if (m < 2) throw DataError("shrinkage needs at least 2 genes");
  if (samples < 1) throw DataError("shrinkage needs a positive sample count");

  double total = 0.0;
  for (Index i = 0; i < m; ++i) total += raw[i];
  const double mean = total / static_cast<double>(m);
  double dispersion = 0.0;
  for (Index i = 0; i < m; ++i) dispersion += (raw[i] - mean) * (raw[i] - mean);

  double w = 1.0;
  if (dispersion > 0.0) {
    w = 2.0 * static_cast<double>(m - 1) / static_cast<double>(samples + 1) *
        (1.0 / static_cast<double>(m) + mean * mean / dispersion);
    w = std::clamp(w, 0.0, 1.0);
  }
  return shrink_with_weight(raw, w);
}

VarianceEstimates estimate_shrunken_variances(const RowMatrix& y,
                                              const DesignMatrix& x,
                                              const VarianceOptions& options) {
  const VarianceEstimates raw = estimate_variances(y, x, options);
  VarianceEstimates out = shrink_variances(raw.raw, y.cols());
  out.iterations = raw.iterations;
  out.converged = raw.converged;
  return out;
}

} // namespace jointnorm
