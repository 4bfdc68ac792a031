#include "jointnorm/admm_multiple.hpp"
#include "jointnorm/admm_simple.hpp"
#include "jointnorm/kkt.hpp"

#include "oracle.hpp"

#include <Eigen/Cholesky>

#include <gtest/gtest.h>

#include <omp.h>

#include <cmath>
#include <random>

using namespace jointnorm;

namespace {

struct Problem {
  CenteredExpression yt;
  DesignMatrix x;
};

Problem make_problem(std::uint64_t seed, Index m, Index n, Index p) {
  const oracle::Instance inst = oracle::random_instance(seed, m, n, p);
  return {center_expression(inst.y, inst.weights), standardize_design(inst.x_raw)};
}

SolverConfig tight() {
  SolverConfig cfg;
  cfg.primal_tol = cfg.dual_tol = 1e-11;
  cfg.max_iter = 1'000'000;
  return cfg;
}

// Rows minus their weighted mean: the identified part of unpenalized columns.
RowMatrix centered_rows(const RowMatrix& b, const Vector& w) {
  const Eigen::RowVectorXd bar = (w.transpose() * b) / w.sum();
  return b.rowwise() - bar;
}

} // namespace

TEST(AlphaMaxType1, SingleColumnReducesToSimple) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = make_problem(seed, 7, 5, 1);
    EXPECT_NEAR(alpha_max_type1(p.yt, p.x, 0), alpha_max_simple(p.yt, p.x),
                1e-12 * alpha_max_simple(p.yt, p.x));
    EXPECT_NEAR(alpha_max_type2(p.yt, p.x), alpha_max_simple(p.yt, p.x),
                1e-12 * alpha_max_simple(p.yt, p.x));
  }
}

TEST(AlphaMaxType1, VanishesWhenInterestInSpanOfConfounders) {
  const Problem base = make_problem(3, 8, 6, 3);
  RowMatrix raw = base.x.values;
  raw.col(2) = 0.5 * raw.col(0) - 2.0 * raw.col(1);
  const DesignMatrix x = standardize_design(raw);
  EXPECT_LE(alpha_max_type1(base.yt, x, 2), 1e-10);
}

TEST(AlphaMaxType1, RejectsRankDeficientConfounders) {
  const Problem base = make_problem(4, 8, 6, 3);
  RowMatrix raw = base.x.values;
  raw.col(1) = -raw.col(0);
  const DesignMatrix x = standardize_design(raw);
  EXPECT_THROW(alpha_max_type1(base.yt, x, 2), DataError);
  EXPECT_THROW(fit_type1(base.yt, x, 2, SolverConfig{}), DataError);
  EXPECT_THROW(alpha_max_type1(base.yt, base.x, 3), ConfigError);
}

TEST(AlphaMaxType2, ZeroDataGivesZero) {
  const Problem base = make_problem(5, 6, 6, 2);
  const CenteredExpression zero = center_expression(RowMatrix::Zero(6, 6), base.yt.weights);
  EXPECT_EQ(alpha_max_type2(zero, base.x), 0.0);
}

TEST(AlphaMax, ThresholdsAreExactForBothPenalties) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const Problem p = make_problem(seed, 5, 6, 2 + seed % 2);
    const Index last = p.x.covariates() - 1;
    SolverConfig cfg = tight();

    cfg.alpha_override = alpha_max_type1(p.yt, p.x, last);
    const FitResult t1 = fit_type1(p.yt, p.x, last, cfg);
    EXPECT_LE(t1.beta_std.col(last).cwiseAbs().maxCoeff(), 1e-8) << seed;
    const auto o1 = oracle::prox_gradient(p.yt.values, p.x.values, p.yt.weights,
                                          *cfg.alpha_override, Penalty::Type1, last);
    EXPECT_LE(o1.beta.col(last).cwiseAbs().maxCoeff(), 1e-8) << seed;
    cfg.alpha_override = 0.9 * alpha_max_type1(p.yt, p.x, last);
    EXPECT_GT(fit_type1(p.yt, p.x, last, cfg).beta_std.col(last).cwiseAbs().maxCoeff(), 1e-6);

    cfg.alpha_override = alpha_max_type2(p.yt, p.x);
    const FitResult t2 = fit_type2(p.yt, p.x, cfg);
    EXPECT_LE(t2.beta_std.cwiseAbs().maxCoeff(), 1e-8) << seed;
    const auto o2 = oracle::prox_gradient(p.yt.values, p.x.values, p.yt.weights,
                                          *cfg.alpha_override, Penalty::Type2, 0);
    EXPECT_LE(o2.beta.cwiseAbs().maxCoeff(), 1e-8) << seed;
    cfg.alpha_override = 0.9 * alpha_max_type2(p.yt, p.x);
    EXPECT_GT(fit_type2(p.yt, p.x, cfg).beta_std.cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(FitType1, AboveThresholdConfoundersMatchLeastSquares) {
  const Problem p = make_problem(7, 6, 6, 3);
  SolverConfig cfg = tight();
  cfg.alpha_override = 1.5 * alpha_max_type1(p.yt, p.x, 2);
  const FitResult fit = fit_type1(p.yt, p.x, 2, cfg);
  EXPECT_EQ(fit.beta_std.col(2).cwiseAbs().maxCoeff(), 0.0);
  // Unpenalized columns are identified only up to a common shift.
  const Eigen::MatrixXd x1 = p.x.values.leftCols(2);
  const Eigen::MatrixXd ls =
      (x1.transpose() * x1).ldlt().solve(x1.transpose() * p.yt.values.transpose()).transpose();
  const RowMatrix got = centered_rows(fit.beta_std.leftCols(2), p.yt.weights);
  EXPECT_LE((got - RowMatrix(ls)).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(FitType1, InterestColumnCanBeAnyPosition) {
  const Problem p = make_problem(8, 7, 6, 3);
  SolverConfig cfg = tight();
  cfg.alpha_ratio = 0.3;
  const FitResult first = fit_type1(p.yt, p.x, 0, cfg);
  // Same problem with columns permuted so the interest column is last.
  RowMatrix permuted(p.x.samples(), 3);
  permuted.col(0) = p.x.values.col(1);
  permuted.col(1) = p.x.values.col(2);
  permuted.col(2) = p.x.values.col(0);
  const FitResult last = fit_type1(p.yt, standardize_design(permuted), 2, cfg);
  EXPECT_LE((first.beta_std.col(0) - last.beta_std.col(2)).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_EQ(first.interest, 0);
  for (Index i = 0; i < 7; ++i)
    EXPECT_EQ(first.de_flags[static_cast<std::size_t>(i)],
              std::abs(first.beta_std(i, 0)) > cfg.de_threshold);
}

TEST(FitMultiple, MatchesOracleObjectiveAndKkt) {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const Index m = 3 + seed % 8;
    const Index n = 4 + seed % 3;
    const Index pcols = 2 + seed % 2;
    const Problem p = make_problem(seed, m, n, pcols);
    SolverConfig cfg = tight();
    cfg.alpha_ratio = 0.25;
    for (Penalty pen : {Penalty::Type1, Penalty::Type2}) {
      const Index interest = pcols - 1;
      const FitResult fit = pen == Penalty::Type1 ? fit_type1(p.yt, p.x, interest, cfg)
                                                  : fit_type2(p.yt, p.x, cfg);
      ASSERT_TRUE(fit.converged);
      const auto ref = oracle::prox_gradient(p.yt.values, p.x.values, p.yt.weights,
                                             fit.alpha_used, pen, interest, 1e-12);
      const double mine = oracle::objective(p.yt.values, p.x.values, fit.beta_std,
                                            p.yt.weights, fit.alpha_used, pen, interest);
      EXPECT_LE(std::abs(mine - ref.objective) / std::max(1.0, std::abs(ref.objective)), 1e-4)
          << seed << " " << penalty_name(pen);
      EXPECT_LE(fit.kkt_residual, 1e-5) << seed << " " << penalty_name(pen);
    }
  }
}

TEST(FitType2, GroupSubgradientConditions) {
  const Problem p = make_problem(300, 12, 6, 3);
  SolverConfig cfg = tight();
  cfg.alpha_ratio = 0.4;
  const FitResult fit = fit_type2(p.yt, p.x, cfg);
  const RowMatrix g = smooth_gradient(p.yt, p.x.values, fit.beta_std);
  int zeros = 0;
  for (Index i = 0; i < 12; ++i) {
    const Vector b = fit.beta_std.row(i).transpose();
    const Vector gi = g.row(i).transpose();
    if (b.norm() > 0.0) {
      EXPECT_LE((gi + fit.alpha_used * b / b.norm()).norm(), 1e-5);
    } else {
      ++zeros;
      EXPECT_LE(gi.norm(), fit.alpha_used + 1e-5);
    }
    EXPECT_EQ(fit.de_flags[static_cast<std::size_t>(i)], b.norm() > cfg.de_threshold);
  }
  EXPECT_GT(zeros, 0);
}

TEST(FitMultiple, SingleColumnReducesToSimple) {
  for (std::uint64_t seed = 400; seed < 420; ++seed) {
    const Problem p = make_problem(seed, 4 + seed % 7, 4 + seed % 3, 1);
    SolverConfig cfg = tight();
    cfg.alpha_ratio = 0.2;
    const FitResult simple = fit_simple(p.yt, p.x, cfg);
    const FitResult t1 = fit_type1(p.yt, p.x, 0, cfg);
    const FitResult t2 = fit_type2(p.yt, p.x, cfg);
    EXPECT_LE((t1.beta_std - simple.beta_std).cwiseAbs().maxCoeff(), 1e-6) << seed;
    EXPECT_LE((t2.beta_std - simple.beta_std).cwiseAbs().maxCoeff(), 1e-6) << seed;
  }
}

TEST(FitType1, ConfoundersAloneRaiseNoFlags) {
  // Interest column orthogonal to the confounders; expression driven by the
  // confounders only.
  const Index n = 8, m = 40;
  RowMatrix raw(n, 3);
  raw << 1, 0, 1, -1, 0, 1, 0, 1, -1, 0, -1, -1, 1, 0, -1, -1, 0, -1, 0, 1, 1, 0, -1, 1;
  const DesignMatrix x = standardize_design(raw);
  ASSERT_LE(std::abs(x.values.col(2).dot(x.values.col(0))), 1e-12);
  ASSERT_LE(std::abs(x.values.col(2).dot(x.values.col(1))), 1e-12);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal(0.0, 1.0);
  RowMatrix y(m, n);
  Vector w(m);
  for (Index i = 0; i < m; ++i) {
    const double b0 = normal(rng), b1 = normal(rng), c = normal(rng);
    w[i] = 0.5 + std::abs(normal(rng));
    for (Index j = 0; j < n; ++j) y(i, j) = c + b0 * x.values(j, 0) + b1 * x.values(j, 1);
  }
  const CenteredExpression yt = center_expression(y, w);
  SolverConfig cfg = tight();
  cfg.alpha_ratio = 0.1;
  const FitResult fit = fit_type1(yt, x, 2, cfg);
  for (bool flag : fit.de_flags) EXPECT_FALSE(flag);
}

TEST(GroupSubproblem, CoordinateStepsNeverIncreaseObjective) {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> normal(0.0, 1.0);
  int settled = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index p = 2 + trial % 4;
    Eigen::MatrixXd z(p, p);
    Vector b(p), start(p);
    for (Index a = 0; a < p; ++a) {
      b[a] = 3.0 * normal(rng);
      start[a] = normal(rng);
      for (Index c = 0; c < p; ++c) z(a, c) = normal(rng);
    }
    z += 2.0 * Eigen::MatrixXd::Identity(p, p);
    const double alpha = 0.3 + std::abs(normal(rng));
    std::vector<double> trace;
    const Vector beta = detail::solve_group_subproblem(z, b, alpha, start, &trace);
    ASSERT_FALSE(trace.empty());
    const double f0 = 0.5 * (z * start - b).squaredNorm() + alpha * start.norm();
    EXPECT_LE(trace.front(), f0);
    for (std::size_t k = 1; k < trace.size(); ++k) EXPECT_LE(trace[k], trace[k - 1]) << trial;
    // Stationary whenever the sweeps stopped on the step tolerance rather
    // than the sweep cap.
    const auto cap = static_cast<std::size_t>(detail::kGroupSweeps * p);
    if (trace.size() < cap && beta.norm() > 0.0) {
      ++settled;
      const Vector grad = z.transpose() * (z * beta - b) + alpha * beta / beta.norm();
      EXPECT_LE(grad.norm(), 1e-5) << trial;
    }
  }
  EXPECT_GE(settled, 30);
}

TEST(FitMultiple, BitwiseIdenticalAcrossThreadCounts) {
  const Problem p = make_problem(500, 300, 10, 3);
  SolverConfig cfg;
  cfg.alpha_ratio = 0.2;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const FitResult a1 = fit_type1(p.yt, p.x, 1, cfg);
  const FitResult a2 = fit_type2(p.yt, p.x, cfg);
  omp_set_num_threads(8);
  const FitResult b1 = fit_type1(p.yt, p.x, 1, cfg);
  const FitResult b2 = fit_type2(p.yt, p.x, cfg);
  omp_set_num_threads(saved);
  EXPECT_EQ(a1.beta_std, b1.beta_std);
  EXPECT_EQ(a1.d, b1.d);
  EXPECT_EQ(a2.beta_std, b2.beta_std);
  EXPECT_EQ(a2.iterations, b2.iterations);
}
