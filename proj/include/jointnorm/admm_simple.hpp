#pragma once

#include "jointnorm/centering.hpp"
#include "jointnorm/design.hpp"
#include "jointnorm/fit.hpp"
#include "jointnorm/kernels.hpp"
#include "jointnorm/variance.hpp"

namespace jointnorm {

using kernels::soft_threshold;

/// Smallest alpha for which the single-covariate solution is identically
/// zero: max_i |x' y~_i| / sigma_i^2.
double alpha_max_simple(const CenteredExpression& yt, const DesignMatrix& x);

/// Single-covariate ADMM on an already centered matrix. The weights carried
/// by `yt` are the inverse variances.
FitResult fit_simple(const CenteredExpression& yt, const DesignMatrix& x,
                     const SolverConfig& cfg);

/// Centers `y` with weights 1 / shrunken variance, then runs the solver.
FitResult fit_simple(const RowMatrix& y, const DesignMatrix& x,
                     const VarianceEstimates& sigma2, const SolverConfig& cfg);

inline FitResult fit_simple(const ExpressionMatrix& y, const DesignMatrix& x,
                            const VarianceEstimates& sigma2,
                            const SolverConfig& cfg) {
  return fit_simple(y.values, x, sigma2, cfg);
}

namespace detail {
Vector solver_weights(const VarianceEstimates& sigma2, Index genes);
} // namespace detail

} // namespace jointnorm
