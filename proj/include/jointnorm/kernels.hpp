#pragma once

// Data-parallel inner loops. Each kernel exists twice: a plain serial
// version in `reference` and an OpenMP version in `omp`. Both perform the
// same floating-point operations in the same order, so their outputs are
// bitwise identical for any thread count. Reductions across genes are
// always evaluated left to right by a single thread; only loops whose
// iterations write disjoint outputs are split across threads.

#include "jointnorm/types.hpp"

namespace jointnorm::kernels {

/// Inputs of one Jacobi sweep of the single-covariate lasso ADMM.
struct LassoSweep {
  const Vector* projection; // c_i = x' y~_i
  const Vector* weights;    // w_i = 1 / sigma_i^2
  const Vector* beta;       // previous iterate
  double weight_sum;        // W = sum_i w_i
  double weighted_beta_sum; // sum_i w_i beta_i over the previous iterate
  double delta0;
  double lambda;
  double rho;
  double alpha;
};

/// sum_i w_i v_i / sum_i w_i, summed in index order.
double weighted_mean(const Vector& values, const Vector& weights);

/// sum_i w_i v_i, summed in index order.
double weighted_sum(const Vector& values, const Vector& weights);

namespace reference {

void row_means(const RowMatrix& y, Vector& out);
void weighted_column_means(const RowMatrix& y, const Vector& weights,
                           Vector& out);
void double_center(const RowMatrix& y, const Vector& row_means,
                   const Vector& col_means, double grand_mean, RowMatrix& out);
void project_rows(const RowMatrix& y, const RowMatrix& x, RowMatrix& out);
void lasso_sweep(const LassoSweep& args, Vector& next);

} // namespace reference

namespace omp {

void row_means(const RowMatrix& y, Vector& out);
void weighted_column_means(const RowMatrix& y, const Vector& weights,
                           Vector& out);
void double_center(const RowMatrix& y, const Vector& row_means,
                   const Vector& col_means, double grand_mean, RowMatrix& out);
void project_rows(const RowMatrix& y, const RowMatrix& x, RowMatrix& out);
void lasso_sweep(const LassoSweep& args, Vector& next);

} // namespace omp

/// Soft-thresholding, sign(v) * max(|v| - t, 0).
inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

} // namespace jointnorm::kernels
