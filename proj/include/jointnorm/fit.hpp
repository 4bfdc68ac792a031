#pragma once

#include "jointnorm/centering.hpp"
#include "jointnorm/design.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace jointnorm {

enum class Penalty {
  Simple, // l1 on the single covariate
  Type1,  // l1 on one covariate of interest, others unpenalized
  Type2,  // group l2 on each gene's coefficient vector
};

Penalty parse_penalty(std::string_view name);
std::string_view penalty_name(Penalty penalty);

struct SolverConfig {
  double rho = 1.0;
  double alpha_ratio = 0.01; // alpha = alpha_ratio * alpha_max
  std::optional<double> alpha_override;
  int max_iter = 1000;
  double primal_tol = 1e-6;
  double dual_tol = 1e-6;
  double de_threshold = 1e-6; // on the standardized scale

  /// Throws ConfigError; alpha_ratio must lie strictly inside (0, 1).
  void validate() const;
  double alpha_for(double alpha_max) const {
    return alpha_override ? *alpha_override : alpha_ratio * alpha_max;
  }
};

/// Output of every solver. Coefficients are reported twice: `beta_std` on
/// the standardized covariate scale used internally and `beta` on the
/// caller's scale. `d[0]` is exactly zero.
struct FitResult {
  Penalty penalty = Penalty::Simple;
  Vector beta0;      // m
  RowMatrix beta;    // m x p
  RowMatrix beta_std;
  Vector d;          // n
  Vector sigma2;     // m, the variances used as weights
  std::vector<std::string> covariate_names;
  Index interest = 0; // column used for DE calls under Simple / Type1
  std::vector<bool> de_flags;

  double alpha_max = 0.0;
  double alpha_used = 0.0;
  int iterations = 0;
  bool converged = false;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double kkt_residual = 0.0;
  double objective = 0.0;

  Index genes() const { return beta.rows(); }
};

namespace detail {

/// Fills intercepts, sample offsets, original-scale coefficients, DE flags,
/// objective and KKT residual from standardized coefficients.
void finish_fit(FitResult& fit, const CenteredExpression& yt,
                const DesignMatrix& x, const SolverConfig& cfg);

} // namespace detail
} // namespace jointnorm
