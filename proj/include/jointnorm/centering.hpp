#pragma once

#include "jointnorm/io.hpp"

namespace jointnorm {

/// Expression with the gene means and the weighted sample means removed:
///
///   y~_ij = y_ij - ybar_i. - ybar_.j^(w) + ybar^(w)
///
/// where the sample means are weighted by w_i = 1 / sigma_i^2. The result
/// satisfies sum_i w_i y~_ij = 0 for every sample and sum_j y~_ij = 0 for
/// every gene. Per-sample offsets d_j and per-gene intercepts cancel out.
struct CenteredExpression {
  RowMatrix values;
  Vector row_means;          // ybar_i.
  Vector weighted_col_means; // ybar_.j^(w)
  double weighted_grand_mean = 0.0;
  Vector weights;

  Index genes() const { return values.rows(); }
  Index samples() const { return values.cols(); }
};

/// Throws DataError when a weight is not positive and finite.
CenteredExpression center_expression(const RowMatrix& y, const Vector& weights);

inline CenteredExpression center_expression(const ExpressionMatrix& y,
                                            const Vector& weights) {
  return center_expression(y.values, weights);
}

} // namespace jointnorm
