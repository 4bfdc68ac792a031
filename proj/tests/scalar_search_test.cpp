#include "jointnorm/scalar_search.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace jointnorm;

namespace {

double scalar_objective(const Vector& z, const Vector& r, double alpha, double other,
                        double beta) {
  return 0.5 * (z * beta - r).squaredNorm() + alpha * std::sqrt(beta * beta + other);
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

} // namespace

TEST(MinimizeScalarGroup, ClosedFormWhenOthersZero) {
  EXPECT_DOUBLE_EQ(minimize_scalar_group(vec({1, 0}), vec({2, 0}), 0.5, 0.0), 1.5);
  EXPECT_DOUBLE_EQ(minimize_scalar_group(vec({1, 0}), vec({0.3, 0}), 0.5, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(minimize_scalar_group(vec({2, 0}), vec({-4, 1}), 1.0, 0.0), -7.0 / 4.0);
}

TEST(MinimizeScalarGroup, ZeroPenaltyGivesLeastSquares) {
  const Vector z = vec({1.0, -2.0, 0.5});
  const Vector r = vec({0.3, 1.1, -0.7});
  EXPECT_NEAR(minimize_scalar_group(z, r, 0.0, 3.0), z.dot(r) / z.squaredNorm(), 1e-15);
}

TEST(MinimizeScalarGroup, MatchesDenseGrid) {
  const Vector z = vec({1, 0});
  const Vector r = vec({1, 0});
  const double alpha = 0.8, other = 0.25;
  double best = 0.0, best_f = scalar_objective(z, r, alpha, other, 0.0);
  for (long k = 0; k <= 1'000'000; ++k) {
    const double b = k * 1e-6;
    const double f = scalar_objective(z, r, alpha, other, b);
    if (f < best_f) {
      best_f = f;
      best = b;
    }
  }
  EXPECT_NEAR(minimize_scalar_group(z, r, alpha, other), best, 1e-5);
}

TEST(MinimizeScalarGroup, StationaryOnRandomInputs) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = 1 + trial % 6;
    Vector z(n), r(n);
    for (Index j = 0; j < n; ++j) {
      z[j] = normal(rng);
      r[j] = 3.0 * normal(rng);
    }
    const double alpha = unit(rng), other = unit(rng) + 1e-3;
    const double b = minimize_scalar_group(z, r, alpha, other);
    const double ols = z.dot(r) / z.squaredNorm();
    EXPECT_GE(b, std::min(0.0, ols) - 1e-12);
    EXPECT_LE(b, std::max(0.0, ols) + 1e-12);
    const double grad = z.squaredNorm() * b - z.dot(r) + alpha * b / std::sqrt(b * b + other);
    EXPECT_LE(std::abs(grad), 1e-9 * std::max(1.0, std::abs(z.dot(r)))) << trial;
  }
}

TEST(MinimizeScalarGroup, RejectsZeroColumn) {
  EXPECT_THROW(minimize_scalar_group(Vector::Zero(3), vec({1, 2, 3}), 0.5, 1.0), DataError);
}
