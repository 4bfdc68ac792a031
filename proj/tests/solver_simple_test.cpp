#include "jointnorm/admm_simple.hpp"
#include "jointnorm/kkt.hpp"
#include "jointnorm/simulate.hpp"
#include "jointnorm/units.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <omp.h>

#include <cmath>

using namespace jointnorm;

namespace {

struct Problem {
  CenteredExpression yt;
  DesignMatrix x;
  RowMatrix y;
};

Problem make_problem(std::uint64_t seed, Index m, Index n) {
  const oracle::Instance inst = oracle::random_instance(seed, m, n, 1);
  Problem p{center_expression(inst.y, inst.weights), standardize_design(inst.x_raw), inst.y};
  return p;
}

SolverConfig tight() {
  SolverConfig cfg;
  cfg.primal_tol = cfg.dual_tol = 1e-11;
  cfg.max_iter = 1'000'000;
  return cfg;
}

double brute_alpha_max(const Problem& p) {
  const RowMatrix yt = oracle::center(p.y, p.yt.weights);
  double best = 0.0;
  for (Index i = 0; i < yt.rows(); ++i) {
    double c = 0.0;
    for (Index j = 0; j < yt.cols(); ++j) c += p.x.values(j, 0) * yt(i, j);
    best = std::max(best, std::abs(c) * p.yt.weights[i]);
  }
  return best;
}

} // namespace

TEST(SoftThreshold, Examples) {
  EXPECT_EQ(soft_threshold(2.5, 1.0), 1.5);
  EXPECT_EQ(soft_threshold(-0.3, 1.0), 0.0);
  EXPECT_EQ(soft_threshold(-4.25, 0.0), -4.25);
}

TEST(AlphaMaxSimple, ZeroDataAndSingleGene) {
  const DesignMatrix x = standardize_design((RowMatrix(4, 1) << 1, 2, 4, 3).finished());
  EXPECT_EQ(alpha_max_simple(center_expression(RowMatrix::Constant(3, 4, 1.5), Vector::Ones(3)), x),
            0.0);

  // One gene: centering removes everything but its own row mean, so the
  // projection survives only through the weighted sample means.
  RowMatrix y(1, 4);
  y << 0.2, -1.0, 3.0, 0.5;
  const CenteredExpression yt = center_expression(y, Vector::Constant(1, 2.0));
  double c = 0.0;
  for (Index j = 0; j < 4; ++j) c += x.values(j, 0) * yt.values(0, j);
  EXPECT_DOUBLE_EQ(alpha_max_simple(yt, x), std::abs(c) * 2.0);
}

TEST(AlphaMaxSimple, ThresholdSeparatesZeroFromNonzero) {
  const Problem p = make_problem(1, 5, 4);
  const double amax = alpha_max_simple(p.yt, p.x);
  EXPECT_NEAR(amax, brute_alpha_max(p), 1e-12 * amax);

  SolverConfig cfg = tight();
  cfg.alpha_override = amax;
  const FitResult at = fit_simple(p.yt, p.x, cfg);
  EXPECT_LE(at.beta_std.cwiseAbs().maxCoeff(), 1e-8);
  const auto zero_oracle = oracle::prox_gradient(p.yt.values, p.x.values, p.yt.weights, amax,
                                                 Penalty::Simple, 0);
  EXPECT_LE(zero_oracle.beta.cwiseAbs().maxCoeff(), 1e-8);

  cfg.alpha_override = 0.5 * amax;
  const FitResult half = fit_simple(p.yt, p.x, cfg);
  EXPECT_GT(half.beta_std.cwiseAbs().maxCoeff(), 1e-6);
  const auto half_oracle = oracle::prox_gradient(p.yt.values, p.x.values, p.yt.weights,
                                                 0.5 * amax, Penalty::Simple, 0);
  EXPECT_GT(half_oracle.beta.cwiseAbs().maxCoeff(), 1e-6);
}

TEST(FitSimple, AboveThresholdGivesInterceptsFromMeans) {
  const Problem p = make_problem(2, 8, 5);
  SolverConfig cfg;
  cfg.alpha_override = 1.01 * alpha_max_simple(p.yt, p.x);
  const FitResult fit = fit_simple(p.yt, p.x, cfg);
  EXPECT_TRUE(fit.converged);
  EXPECT_EQ(fit.beta_std.cwiseAbs().maxCoeff(), 0.0);
  for (Index i = 0; i < 8; ++i) {
    EXPECT_NEAR(fit.beta0[i],
                p.yt.row_means[i] + p.yt.weighted_col_means[0] - p.yt.weighted_grand_mean,
                1e-12);
    EXPECT_FALSE(fit.de_flags[static_cast<std::size_t>(i)]);
  }
  EXPECT_EQ(fit.d[0], 0.0);
}

TEST(FitSimple, MatchesOracleObjective) {
  for (std::uint64_t seed = 10; seed < 30; ++seed) {
    const Index m = 3 + seed % 8;
    const Index n = 3 + seed % 4;
    const Problem p = make_problem(seed, m, n);
    SolverConfig cfg = tight();
    cfg.alpha_ratio = 0.3;
    const FitResult fit = fit_simple(p.yt, p.x, cfg);
    ASSERT_TRUE(fit.converged);
    const auto ref = oracle::prox_gradient(p.yt.values, p.x.values, p.yt.weights,
                                           fit.alpha_used, Penalty::Simple, 0);
    const double mine = oracle::objective(p.yt.values, p.x.values, fit.beta_std, p.yt.weights,
                                          fit.alpha_used, Penalty::Simple, 0);
    EXPECT_LE(std::abs(mine - ref.objective) / std::max(1.0, std::abs(ref.objective)), 1e-4)
        << seed;
    EXPECT_NEAR(fit.objective, mine, 1e-9 * std::max(1.0, std::abs(mine)));
    EXPECT_LE(fit.kkt_residual, 1e-5) << seed;
  }
}

TEST(FitSimple, KktCertificatePerGene) {
  const Problem p = make_problem(40, 10, 6);
  SolverConfig cfg = tight();
  cfg.alpha_ratio = 0.2;
  const FitResult fit = fit_simple(p.yt, p.x, cfg);
  const RowMatrix g = smooth_gradient(p.yt, p.x.values, fit.beta_std);
  for (Index i = 0; i < 10; ++i) {
    const double b = fit.beta_std(i, 0);
    if (b != 0.0)
      EXPECT_LE(std::abs(g(i, 0) + fit.alpha_used * (b > 0 ? 1 : -1)), 1e-5);
    else
      EXPECT_LE(std::abs(g(i, 0)), fit.alpha_used + 1e-5);
  }
}

TEST(FitSimple, SmoothGradientMatchesFiniteDifferences) {
  const Problem p = make_problem(41, 6, 5);
  RowMatrix beta(6, 1);
  beta << 0.3, -1.2, 0.0, 2.0, 0.5, -0.1;
  const RowMatrix g = smooth_gradient(p.yt, p.x.values, beta);
  const double h = 1e-6;
  for (Index i = 0; i < 6; ++i) {
    RowMatrix up = beta, down = beta;
    up(i, 0) += h;
    down(i, 0) -= h;
    const double fd = (oracle::objective(p.yt.values, p.x.values, up, p.yt.weights, 0.0,
                                         Penalty::Simple, 0) -
                       oracle::objective(p.yt.values, p.x.values, down, p.yt.weights, 0.0,
                                         Penalty::Simple, 0)) /
                      (2 * h);
    EXPECT_NEAR(g(i, 0), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(FitSimple, ReconstructsModelExactlyWhenNoiseFree) {
  // y = b0 + b x + d with all genes but one at b = 0 and a tiny penalty.
  const Index m = 30, n = 7;
  RowMatrix raw_x(n, 1);
  raw_x << 0.1, 0.9, 2.0, 3.5, 4.0, 5.5, 7.0;
  Vector d(n);
  d << 0.0, 0.4, -0.3, 1.0, 0.2, -0.8, 0.6;
  RowMatrix y(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      y(i, j) = 0.1 * i + (i == 3 ? 1.5 * raw_x(j, 0) : 0.0) + d[j];
  const DesignMatrix x = standardize_design(raw_x);
  SolverConfig cfg = tight();
  cfg.alpha_ratio = 1e-6;
  const FitResult fit =
      fit_simple(y, x, VarianceEstimates::fixed(Vector::Ones(m)), cfg);
  EXPECT_NEAR(fit.beta(3, 0), 1.5, 1e-5);
  for (Index i = 0; i < m; ++i) {
    if (i != 3) EXPECT_LE(std::abs(fit.beta(i, 0)), 1e-9);
    EXPECT_NEAR(fit.beta0[i], 0.1 * i, 1e-5);
  }
  for (Index j = 0; j < n; ++j) EXPECT_NEAR(fit.d[j], d[j], 1e-5);
  EXPECT_EQ(fit.d[0], 0.0);
}

TEST(FitSimple, DeFlagsFollowThreshold) {
  const Problem p = make_problem(50, 10, 5);
  SolverConfig cfg = tight();
  cfg.alpha_ratio = 0.4;
  cfg.de_threshold = 0.05;
  const FitResult fit = fit_simple(p.yt, p.x, cfg);
  for (Index i = 0; i < 10; ++i)
    EXPECT_EQ(fit.de_flags[static_cast<std::size_t>(i)], std::abs(fit.beta_std(i, 0)) > 0.05);
}

TEST(FitSimple, NonConvergenceIsFlagged) {
  const Problem p = make_problem(51, 10, 5);
  SolverConfig cfg;
  cfg.alpha_ratio = 0.01;
  cfg.max_iter = 1;
  cfg.primal_tol = cfg.dual_tol = 1e-15;
  const FitResult fit = fit_simple(p.yt, p.x, cfg);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.iterations, 1);
}

TEST(FitSimple, RejectsBadConfigAndDesign) {
  const Problem p = make_problem(52, 5, 5);
  SolverConfig cfg;
  cfg.alpha_ratio = 1.0;
  EXPECT_THROW(fit_simple(p.yt, p.x, cfg), ConfigError);
  cfg.alpha_ratio = 0.0;
  EXPECT_THROW(fit_simple(p.yt, p.x, cfg), ConfigError);
  cfg = SolverConfig{};
  cfg.rho = 0.0;
  EXPECT_THROW(fit_simple(p.yt, p.x, cfg), ConfigError);
  const DesignMatrix two = standardize_design(
      (RowMatrix(5, 2) << 1, 0, 2, 1, 3, 0, 4, 1, 5, 3).finished());
  EXPECT_THROW(fit_simple(p.yt, two, SolverConfig{}), ConfigError);
}

TEST(FitSimple, BitwiseIdenticalAcrossThreadCounts) {
  SimulationConfig sim;
  sim.genes = 500;
  sim.de_fraction = 0.4;
  sim.up_fraction = 0.7;
  const SimulatedData data = simulate(sim);
  const ExpressionMatrix y = log_expression(data.counts, Unit::Raw, 0.5);
  const DesignMatrix x = standardize_design(data.truth.x);

  const int saved = omp_get_max_threads();
  std::vector<FitResult> fits;
  for (int threads : {1, 2, 8}) {
    omp_set_num_threads(threads);
    const VarianceEstimates s = estimate_shrunken_variances(y.values, x);
    fits.push_back(fit_simple(y, x, s, SolverConfig{}));
  }
  omp_set_num_threads(saved);
  for (std::size_t k = 1; k < fits.size(); ++k) {
    EXPECT_EQ(fits[k].beta_std, fits[0].beta_std);
    EXPECT_EQ(fits[k].beta0, fits[0].beta0);
    EXPECT_EQ(fits[k].d, fits[0].d);
    EXPECT_EQ(fits[k].sigma2, fits[0].sigma2);
    EXPECT_EQ(fits[k].iterations, fits[0].iterations);
  }
}

TEST(FitSimple, FigureScenarioSeparatesGenes) {
  SimulationConfig sim = SimulationConfig::figure_preset();
  sim.de_fraction = 0.3;
  sim.up_fraction = 0.5;
  sim.seed = 7;
  const SimulatedData data = simulate(sim);
  const ExpressionMatrix y = log_expression(data.counts, Unit::Raw, 0.5);
  const DesignMatrix x = standardize_design(data.truth.x);
  const FitResult fit = fit_simple(y, x, estimate_shrunken_variances(y.values, x), SolverConfig{});
  const double cut = 0.1 * fit.beta_std.cwiseAbs().maxCoeff();
  int de = 0, de_hit = 0, null = 0, null_hit = 0;
  for (Index i = 0; i < sim.genes; ++i) {
    const bool above = std::abs(fit.beta_std(i, 0)) > cut;
    if (data.truth.de_labels[static_cast<std::size_t>(i)]) {
      ++de;
      de_hit += above;
    } else {
      ++null;
      null_hit += !above;
    }
  }
  EXPECT_GE(static_cast<double>(null_hit) / null, 0.99);
  // The truth itself puts about 4% of DE effects under the cut.
  EXPECT_GE(static_cast<double>(de_hit) / de, 0.93);
}
