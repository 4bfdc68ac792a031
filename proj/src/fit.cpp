#include "jointnorm/fit.hpp"

#include "jointnorm/kernels.hpp"
#include "jointnorm/kkt.hpp"

#include <cmath>
#include <string>

namespace jointnorm {

Penalty parse_penalty(std::string_view name) {
  if (name == "simple") return Penalty::Simple;
  if (name == "type1") return Penalty::Type1;
  if (name == "type2") return Penalty::Type2;
  throw ConfigError("unknown penalty '" + std::string(name) + "'");
}

std::string_view penalty_name(Penalty penalty) {
  switch (penalty) {
  case Penalty::Simple: return "simple";
  case Penalty::Type1: return "type1";
  case Penalty::Type2: return "type2";
  }
  return "simple";
}

void SolverConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be positive");
  if (!(alpha_ratio > 0.0 && alpha_ratio < 1.0))
    throw ConfigError("alpha ratio must be in (0,1)");
  if (alpha_override && !(*alpha_override >= 0.0))
    throw ConfigError("alpha must be non-negative");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (!(primal_tol > 0.0) || !(dual_tol > 0.0))
    throw ConfigError("tolerances must be positive");
  if (!(de_threshold >= 0.0)) throw ConfigError("DE threshold must be non-negative");
}

namespace detail {

void finish_fit(FitResult& fit, const CenteredExpression& yt,
                const DesignMatrix& x, const SolverConfig& cfg) {
  const Index m = yt.genes();
  const Index n = yt.samples();
  const Index p = x.covariates();
  const RowMatrix& xs = x.values;

  Vector bar(p);
  for (Index k = 0; k < p; ++k)
    bar[k] = kernels::weighted_mean(fit.beta_std.col(k), yt.weights);

  const double first_col = yt.weighted_col_means[0];
  const double shift0 = xs.row(0).dot(bar);
  fit.d.resize(n);
  fit.d[0] = 0.0;
  for (Index j = 1; j < n; ++j)
    fit.d[j] = (yt.weighted_col_means[j] - first_col) - (xs.row(j).dot(bar) - shift0);

  fit.beta0.resize(m);
  fit.beta.resize(m, p);
  for (Index i = 0; i < m; ++i) {
    double b0 = yt.row_means[i] + first_col - yt.weighted_grand_mean - shift0;
    for (Index k = 0; k < p; ++k) {
      fit.beta(i, k) = fit.beta_std(i, k) / x.scale[k];
      b0 -= fit.beta_std(i, k) * x.center[k] / x.scale[k];
    }
    fit.beta0[i] = b0;
  }

  fit.de_flags.assign(static_cast<std::size_t>(m), false);
  for (Index i = 0; i < m; ++i) {
    const double size = fit.penalty == Penalty::Type2
                            ? fit.beta_std.row(i).norm()
                            : std::abs(fit.beta_std(i, fit.interest));
    fit.de_flags[static_cast<std::size_t>(i)] = size > cfg.de_threshold;
  }

  fit.sigma2 = yt.weights.cwiseInverse();
  fit.covariate_names = x.covariate_names;
  fit.objective = penalized_objective(yt, xs, fit.beta_std, fit.alpha_used,
                                      fit.penalty, fit.interest);
  fit.kkt_residual = kkt_residual(yt, xs, fit.beta_std, fit.alpha_used,
                                  fit.penalty, fit.interest);
}

} // namespace detail
} // namespace jointnorm
