#pragma once

#include "jointnorm/design.hpp"
#include "jointnorm/io.hpp"

namespace jointnorm {

struct VarianceOptions {
  double tol = 1e-6; // max relative change of any sigma_i^2
  int max_iter = 200;
  double floor = 1e-8;
};

/// Per-gene noise variances. `raw` are the alternating maximum-likelihood
/// estimates; `shrunken` are pulled toward their mean by the empirical-Bayes
/// weight `weight`. The solvers consume `shrunken`.
struct VarianceEstimates {
  Vector raw;
  Vector shrunken;
  double weight = 0.0;
  double mean_variance = 0.0;
  int iterations = 0;
  bool converged = false;

  /// Wraps known variances; raw and shrunken both equal `sigma2`.
  static VarianceEstimates fixed(const Vector& sigma2);
};

/// Alternates the per-gene unpenalized coefficient update, the 1/n
/// maximum-likelihood variance update and the weighted coefficient mean,
/// starting from unit variances, until every sigma_i^2 moves by less than
/// `tol` relative. Only `raw`, `iterations` and `converged` are meaningful
/// on return (`shrunken` is a copy of `raw`). Works for any number of
/// covariates; throws DataError("insufficient replication") if n <= p + 1.
VarianceEstimates estimate_variances(const RowMatrix& y, const DesignMatrix& x,
                                     const VarianceOptions& options = {});

inline VarianceEstimates estimate_variances(const ExpressionMatrix& y,
                                            const DesignMatrix& x,
                                            const VarianceOptions& options = {}) {
  return estimate_variances(y.values, x, options);
}

/// Empirical-Bayes shrinkage toward the mean variance:
///   w = 2(m-1)/(n+1) * (1/m + mean^2 / sum_i (raw_i - mean)^2)
///   shrunken_i = (1-w) raw_i + w mean
/// with w clamped to [0, 1]; identical raw values give w = 1.
VarianceEstimates shrink_variances(const Vector& raw, Index samples);

/// The convex combination above with a caller-chosen weight in [0, 1].
VarianceEstimates shrink_with_weight(const Vector& raw, double weight);

/// estimate_variances followed by shrink_variances.
VarianceEstimates estimate_shrunken_variances(const RowMatrix& y,
                                              const DesignMatrix& x,
                                              const VarianceOptions& options = {});

} // namespace jointnorm
