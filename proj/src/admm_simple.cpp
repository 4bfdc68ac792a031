#include "jointnorm/admm_simple.hpp"

#include <algorithm>
#include <cmath>

namespace jointnorm {

namespace detail {

Vector solver_weights(const VarianceEstimates& sigma2, Index genes) {
  if (sigma2.shrunken.size() != genes)
    throw DataError("one variance per gene required");
  Vector w(genes);
  for (Index i = 0; i < genes; ++i) {
    const double s = sigma2.shrunken[i];
    if (!(s > 0.0) || !std::isfinite(s)) throw DataError("non-positive variance");
    w[i] = 1.0 / s;
  }
  return w;
}

} // namespace detail

namespace {

Vector projection_onto(const CenteredExpression& yt, const DesignMatrix& x) {
  RowMatrix proj;
  kernels::omp::project_rows(yt.values, x.values, proj);
  return proj.col(0);
}

void require_single(const CenteredExpression& yt, const DesignMatrix& x) {
  if (x.covariates() != 1)
    throw ConfigError("simple model needs exactly one covariate");
  if (x.samples() != yt.samples())
    throw DataError("design rows must match sample count");
}

} // namespace

double alpha_max_simple(const CenteredExpression& yt, const DesignMatrix& x) {
  require_single(yt, x);
  const Vector c = projection_onto(yt, x);
  double best = 0.0;
  for (Index i = 0; i < c.size(); ++i)
    best = std::max(best, std::abs(yt.weights[i] * c[i]));
  return best;
}

FitResult fit_simple(const CenteredExpression& yt, const DesignMatrix& x,
                     const SolverConfig& cfg) {
  cfg.validate();
  require_single(yt, x);
  const Index m = yt.genes();
  const Vector& w = yt.weights;
  const Vector c = projection_onto(yt, x);
  const double total = kernels::weighted_sum(Vector::Ones(m), w);

  FitResult fit;
  fit.penalty = Penalty::Simple;
  fit.alpha_max = 0.0;
  for (Index i = 0; i < m; ++i)
    fit.alpha_max = std::max(fit.alpha_max, std::abs(w[i] * c[i]));
  fit.alpha_used = cfg.alpha_for(fit.alpha_max);

  Vector beta = Vector::Zero(m);
  Vector next(m);
  double delta0 = 0.0;
  double lambda = 0.0;

  kernels::LassoSweep sweep{&c, &w, &beta, total, 0.0, 0.0, 0.0, cfg.rho,
                            fit.alpha_used};
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    sweep.weighted_beta_sum = kernels::weighted_sum(beta, w);
    sweep.delta0 = delta0;
    sweep.lambda = lambda;
    kernels::omp::lasso_sweep(sweep, next);
    beta.swap(next);

    const double bar = kernels::weighted_sum(beta, w) / total;
    const double updated = bar + lambda / (total + cfg.rho);
    lambda += cfg.rho * (bar - updated);
    fit.primal_residual = std::abs(bar - updated);
    fit.dual_residual = cfg.rho * std::abs(updated - delta0);
    delta0 = updated;
    fit.iterations = iter;
    if (fit.primal_residual < cfg.primal_tol && fit.dual_residual < cfg.dual_tol) {
      fit.converged = true;
      break;
    }
  }

  fit.beta_std = beta;
  detail::finish_fit(fit, yt, x, cfg);
  return fit;
}

FitResult fit_simple(const RowMatrix& y, const DesignMatrix& x,
                     const VarianceEstimates& sigma2, const SolverConfig& cfg) {
  const CenteredExpression yt =
      center_expression(y, detail::solver_weights(sigma2, y.rows()));
  return fit_simple(yt, x, cfg);
}

} // namespace jointnorm
