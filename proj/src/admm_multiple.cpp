#include "jointnorm/admm_multiple.hpp"

#include "jointnorm/admm_simple.hpp"
#include "jointnorm/kernels.hpp"
#include "jointnorm/scalar_search.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace jointnorm {

namespace {

using Matrix = Eigen::MatrixXd;

constexpr double kRankTol = 1e-10;

void require_shape(const CenteredExpression& yt, const DesignMatrix& x) {
  if (x.samples() != yt.samples())
    throw DataError("design rows must match sample count");
}

/// Moves column `interest` to the last position.
DesignMatrix move_last(const DesignMatrix& x, Index interest) {
  const Index p = x.covariates();
  if (interest < 0 || interest >= p)
    throw ConfigError("covariate of interest out of range");
  DesignMatrix out = x;
  Index dst = 0;
  for (Index k = 0; k < p; ++k) {
    if (k == interest) continue;
    out.values.col(dst) = x.values.col(k);
    out.center[dst] = x.center[k];
    out.scale[dst] = x.scale[k];
    out.covariate_names[static_cast<std::size_t>(dst)] =
        x.covariate_names[static_cast<std::size_t>(k)];
    ++dst;
  }
  out.values.col(p - 1) = x.values.col(interest);
  out.center[p - 1] = x.center[interest];
  out.scale[p - 1] = x.scale[interest];
  out.covariate_names.back() = x.covariate_names[static_cast<std::size_t>(interest)];
  return out;
}

Vector weighted_column_sums(const RowMatrix& beta, const Vector& w) {
  Vector s(beta.cols());
  for (Index k = 0; k < beta.cols(); ++k) {
    const Vector col = beta.col(k);
    s[k] = kernels::weighted_sum(col, w);
  }
  return s;
}

/// Shared consensus loop. `update(i, v_i, kappa_i, previous_row)` returns
/// the new coefficient row of gene i given the linear term of its
/// quadratic subproblem.
template <class Update>
void run_admm(const CenteredExpression& yt, const Matrix& gram,
              const RowMatrix& xty, const SolverConfig& cfg, FitResult& fit,
              RowMatrix& beta, Update&& update) {
  const Index m = yt.genes();
  const Index p = gram.rows();
  const Vector& w = yt.weights;
  const double total = kernels::weighted_sum(Vector::Ones(m), w);
  const double inv_total = 1.0 / total;
  const Eigen::LDLT<Matrix> consensus(total * gram +
                                      cfg.rho * Matrix::Identity(p, p));

  beta = RowMatrix::Zero(m, p);
  RowMatrix next(m, p);
  Vector delta0 = Vector::Zero(p);
  Vector lambda = Vector::Zero(p);

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    const Vector sums = weighted_column_sums(beta, w);
    const Vector gd = gram * delta0;

#pragma omp parallel for schedule(static)
    for (Index i = 0; i < m; ++i) {
      const Vector prev = beta.row(i).transpose();
      const Vector others = (sums - w[i] * prev) * inv_total;
      const Vector v = w[i] * (xty.row(i).transpose() + gd) -
                       (w[i] * inv_total) * (lambda + cfg.rho * (others - delta0));
      const double kappa = cfg.rho * w[i] * inv_total * inv_total;
      next.row(i) = update(i, v, kappa, prev).transpose();
    }
    beta.swap(next);

    const Vector bar = weighted_column_sums(beta, w) * inv_total;
    const Vector updated = bar + consensus.solve(lambda);
    lambda += cfg.rho * (bar - updated);
    fit.primal_residual = (bar - updated).lpNorm<Eigen::Infinity>();
    fit.dual_residual = cfg.rho * (updated - delta0).lpNorm<Eigen::Infinity>();
    delta0 = updated;
    fit.iterations = iter;
    if (fit.primal_residual < cfg.primal_tol && fit.dual_residual < cfg.dual_tol) {
      fit.converged = true;
      break;
    }
  }
}

double group_objective(const Matrix& z, const Vector& b, double alpha,
                       const Vector& beta) {
  return 0.5 * (z * beta - b).squaredNorm() + alpha * beta.norm();
}

} // namespace

double alpha_max_type1(const CenteredExpression& yt, const DesignMatrix& x,
                       Index interest) {
  require_shape(yt, x);
  const DesignMatrix xs = move_last(x, interest);
  const Index p = xs.covariates();
  const Index n = xs.samples();
  Vector residual = xs.values.col(p - 1);
  if (p > 1) {
    const Matrix x1 = xs.values.leftCols(p - 1);
    const Eigen::ColPivHouseholderQR<Matrix> qr(x1);
    if (qr.rank() < p - 1)
      throw DataError("degenerate design: confounders are collinear");
    residual -= x1 * qr.solve(residual);
  }
  RowMatrix direction(n, 1);
  direction.col(0) = residual;
  RowMatrix proj;
  kernels::omp::project_rows(yt.values, direction, proj);
  double best = 0.0;
  for (Index i = 0; i < yt.genes(); ++i)
    best = std::max(best, std::abs(yt.weights[i] * proj(i, 0)));
  return best;
}

double alpha_max_type2(const CenteredExpression& yt, const DesignMatrix& x) {
  require_shape(yt, x);
  RowMatrix proj;
  kernels::omp::project_rows(yt.values, x.values, proj);
  double best = 0.0;
  for (Index i = 0; i < yt.genes(); ++i)
    best = std::max(best, yt.weights[i] * proj.row(i).norm());
  return best;
}

FitResult fit_type1(const CenteredExpression& yt, const DesignMatrix& x,
                    Index interest, const SolverConfig& cfg) {
  cfg.validate();
  require_shape(yt, x);
  const DesignMatrix xs = move_last(x, interest);
  const Index p = xs.covariates();
  const Index q = p - 1; // unpenalized columns
  const Matrix gram = xs.values.transpose() * xs.values;

  // Eigendecomposition of the confounder block, shared by all genes.
  Matrix basis = Matrix::Zero(q, q);
  Vector eig = Vector::Zero(q);
  const Vector g = gram.col(p - 1).head(q);
  const double gpp = gram(p - 1, p - 1);
  if (q > 0) {
    const Eigen::SelfAdjointEigenSolver<Matrix> es(gram.topLeftCorner(q, q));
    basis = es.eigenvectors();
    eig = es.eigenvalues();
    if (!(eig.minCoeff() > kRankTol * std::max(1.0, eig.maxCoeff())))
      throw DataError("degenerate design: confounders are collinear");
    const Vector vg = basis.transpose() * g;
    const double schur = gpp - vg.dot(eig.cwiseInverse().asDiagonal() * vg);
    if (!(schur > kRankTol * gpp))
      throw DataError(
          "degenerate design: covariate of interest lies in the span of the others");
  }
  const Vector basis_g = basis.transpose() * g;

  FitResult fit;
  fit.penalty = Penalty::Type1;
  fit.interest = interest;
  fit.alpha_max = alpha_max_type1(yt, x, interest);
  fit.alpha_used = cfg.alpha_for(fit.alpha_max);
  const double alpha = fit.alpha_used;

  RowMatrix xty;
  kernels::omp::project_rows(yt.values, xs.values, xty);
  const Vector& w = yt.weights;

  RowMatrix beta;
  run_admm(yt, gram, xty, cfg, fit, beta,
           [&](Index i, const Vector& v, double kappa, const Vector&) {
             Vector out(p);
             const Vector inv = (eig.array() + kappa).inverse().matrix();
             // g' H v-, g' H g with H = (G~ + kappa I)^-1.
             const Vector basis_v = basis.transpose() * v.head(q);
             const double ghv = basis_g.dot(inv.asDiagonal() * basis_v);
             const double ghg = basis_g.dot(inv.asDiagonal() * basis_g);
             const double curvature = w[i] * (gpp + kappa - ghg);
             const double bp = kernels::soft_threshold(v[p - 1] - ghv, alpha) / curvature;
             out[p - 1] = bp;
             if (q > 0) {
               const Vector rhs = basis.transpose() * (v.head(q) - w[i] * g * bp);
               out.head(q) = basis * (inv.asDiagonal() * rhs) / w[i];
             }
             return out;
           });

  fit.beta_std.resize(yt.genes(), p);
  Index src = 0;
  for (Index k = 0; k < p; ++k) {
    if (k == interest) continue;
    fit.beta_std.col(k) = beta.col(src++);
  }
  fit.beta_std.col(interest) = beta.col(p - 1);
  detail::finish_fit(fit, yt, x, cfg);
  return fit;
}

FitResult fit_type1(const RowMatrix& y, const DesignMatrix& x,
                    const VarianceEstimates& sigma2, Index interest,
                    const SolverConfig& cfg) {
  const CenteredExpression yt =
      center_expression(y, detail::solver_weights(sigma2, y.rows()));
  return fit_type1(yt, x, interest, cfg);
}

namespace detail {

Vector solve_group_subproblem(const Eigen::MatrixXd& z, const Vector& b,
                              double alpha, Vector start,
                              std::vector<double>* trace) {
  const Index p = z.cols();
  Vector beta = std::move(start);
  double value = group_objective(z, b, alpha, beta);
  for (int sweep = 0; sweep < kGroupSweeps; ++sweep) {
    double change = 0.0;
    for (Index s = 0; s < p; ++s) {
      const Vector r = b - z * beta + z.col(s) * beta[s];
      const double other = std::max(0.0, beta.squaredNorm() - beta[s] * beta[s]);
      Vector candidate = beta;
      candidate[s] = minimize_scalar_group(z.col(s), r, alpha, other);
      const double candidate_value = group_objective(z, b, alpha, candidate);
      if (candidate_value <= value) {
        change = std::max(change, std::abs(candidate[s] - beta[s]));
        beta = std::move(candidate);
        value = candidate_value;
      }
      if (trace) trace->push_back(value);
    }
    if (change < kGroupTol) break;
  }
  return beta;
}

} // namespace detail

FitResult fit_type2(const CenteredExpression& yt, const DesignMatrix& x,
                    const SolverConfig& cfg) {
  cfg.validate();
  require_shape(yt, x);
  const Index p = x.covariates();
  const Matrix gram = x.values.transpose() * x.values;
  const Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
  const Matrix basis = es.eigenvectors();
  const Vector eig = es.eigenvalues().cwiseMax(0.0);

  FitResult fit;
  fit.penalty = Penalty::Type2;
  fit.alpha_max = alpha_max_type2(yt, x);
  fit.alpha_used = cfg.alpha_for(fit.alpha_max);
  const double alpha = fit.alpha_used;

  RowMatrix xty;
  kernels::omp::project_rows(yt.values, x.values, xty);
  const Vector& w = yt.weights;

  RowMatrix beta;
  run_admm(yt, gram, xty, cfg, fit, beta,
           [&](Index i, const Vector& v, double kappa, const Vector& prev) {
             const double vnorm = v.norm();
             if (vnorm <= alpha) return Vector(Vector::Zero(p));
             // Q = U diag(q) U', Z = diag(sqrt q) U', b = diag(1/sqrt q) U' v.
             const Vector qd = w[i] * (eig.array() + kappa).matrix();
             const Vector root = qd.cwiseSqrt();
             const Matrix z = root.asDiagonal() * basis.transpose();
             const Vector b = root.cwiseInverse().asDiagonal() * (basis.transpose() * v);
             Vector start = prev;
             if (start.squaredNorm() == 0.0) {
               const Vector dir = v / vnorm;
               const Vector rotated = basis.transpose() * dir;
               const double curv = rotated.dot(qd.asDiagonal() * rotated);
               start = dir * ((vnorm - alpha) / curv);
             }
             return detail::solve_group_subproblem(z, b, alpha, std::move(start));
           });

  fit.beta_std = beta;
  detail::finish_fit(fit, yt, x, cfg);
  return fit;
}

FitResult fit_type2(const RowMatrix& y, const DesignMatrix& x,
                    const VarianceEstimates& sigma2, const SolverConfig& cfg) {
  const CenteredExpression yt =
      center_expression(y, detail::solver_weights(sigma2, y.rows()));
  return fit_type2(yt, x, cfg);
}

} // namespace jointnorm
