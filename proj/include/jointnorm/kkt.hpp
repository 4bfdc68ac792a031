#pragma once

#include "jointnorm/centering.hpp"
#include "jointnorm/fit.hpp"

namespace jointnorm {

/// Reduced objective after eliminating intercepts and sample offsets:
///
///   f(B) = sum_i w_i/2 || y~_i - X (beta_i - beta_bar) ||^2 + penalty(B)
///
/// with beta_bar the w-weighted mean of the rows of B. `interest` selects
/// the penalized column for Simple and Type1.
double penalized_objective(const CenteredExpression& yt, const RowMatrix& x,
                           const RowMatrix& beta, double alpha, Penalty penalty,
                           Index interest);

/// Gradient of the smooth part of `penalized_objective`. Row i equals
/// w_i (X'X (beta_i - beta_bar) - X' y~_i).
RowMatrix smooth_gradient(const CenteredExpression& yt, const RowMatrix& x,
                          const RowMatrix& beta);

/// Largest violation of the subgradient optimality conditions. Zero at an
/// exact minimizer.
double kkt_residual(const CenteredExpression& yt, const RowMatrix& x,
                    const RowMatrix& beta, double alpha, Penalty penalty,
                    Index interest);

} // namespace jointnorm
