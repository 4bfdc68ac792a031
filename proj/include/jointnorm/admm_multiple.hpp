#pragma once

#include "jointnorm/centering.hpp"
#include "jointnorm/design.hpp"
#include "jointnorm/fit.hpp"
#include "jointnorm/variance.hpp"

#include <vector>

namespace jointnorm {

/// Smallest alpha that zeroes the coefficient of column `interest` for all
/// genes under the Type I penalty:
///   max_i | y~_i' (I - X1 (X1'X1)^-1 X1') x_interest | / sigma_i^2
/// where X1 holds the remaining columns. Throws DataError when X1 is rank
/// deficient.
double alpha_max_type1(const CenteredExpression& yt, const DesignMatrix& x,
                       Index interest);

/// Smallest alpha that zeroes every coefficient vector under the group
/// penalty: max_i || X' y~_i ||_2 / sigma_i^2.
double alpha_max_type2(const CenteredExpression& yt, const DesignMatrix& x);

/// l1 penalty on column `interest` only; the other columns are
/// unpenalized confounders.
FitResult fit_type1(const CenteredExpression& yt, const DesignMatrix& x,
                    Index interest, const SolverConfig& cfg);
FitResult fit_type1(const RowMatrix& y, const DesignMatrix& x,
                    const VarianceEstimates& sigma2, Index interest,
                    const SolverConfig& cfg);

/// Group l2 penalty on each gene's full coefficient vector.
FitResult fit_type2(const CenteredExpression& yt, const DesignMatrix& x,
                    const SolverConfig& cfg);
FitResult fit_type2(const RowMatrix& y, const DesignMatrix& x,
                    const VarianceEstimates& sigma2, const SolverConfig& cfg);

namespace detail {

/// Per-gene group subproblem in least-squares form,
///   min 1/2 || Z beta - b ||^2 + alpha ||beta||,
/// solved by cyclic coordinate descent from `start` (which must be
/// nonzero). When `trace` is given, the objective after every scalar step
/// is appended to it.
Vector solve_group_subproblem(const Eigen::MatrixXd& z, const Vector& b,
                              double alpha, Vector start,
                              std::vector<double>* trace = nullptr);

inline constexpr int kGroupSweeps = 100;
inline constexpr double kGroupTol = 1e-8;

} // namespace detail
} // namespace jointnorm
