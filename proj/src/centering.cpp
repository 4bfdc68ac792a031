#include "jointnorm/centering.hpp"

#include "jointnorm/kernels.hpp"

#include <cmath>

namespace jointnorm {

CenteredExpression center_expression(const RowMatrix& y, const Vector& weights) {
  if (weights.size() != y.rows())
    throw DataError("one weight per gene required");
  for (Index i = 0; i < weights.size(); ++i)
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw DataError("non-positive weight");
  if (!y.allFinite()) throw DataError("non-finite expression value");

  CenteredExpression out;
  out.weights = weights;
  kernels::omp::row_means(y, out.row_means);
  kernels::omp::weighted_column_means(y, weights, out.weighted_col_means);
  out.weighted_grand_mean = kernels::weighted_mean(out.row_means, weights);
  kernels::omp::double_center(y, out.row_means, out.weighted_col_means,
                              out.weighted_grand_mean, out.values);
  return out;
}

} // namespace jointnorm
