#include "jointnorm/scalar_search.hpp"

#include "jointnorm/kernels.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>

namespace jointnorm {

double minimize_scalar_group(const Vector& z, const Vector& r, double alpha,
                             double other_norm_sq) {
  const double zz = z.squaredNorm();
  if (!(zz > 0.0)) throw DataError("zero coordinate direction");
  const double zr = z.dot(r);
  if (other_norm_sq <= 0.0) return kernels::soft_threshold(zr, alpha) / zz;
  const double ols = zr / zz;
  if (alpha == 0.0 || ols == 0.0) return ols;

  // Terms constant in beta are dropped.
  const auto objective = [&](double b) {
    return 0.5 * zz * b * b - zr * b + alpha * std::sqrt(b * b + other_norm_sq);
  };
  const double lo = std::min(0.0, ols);
  const double hi = std::max(0.0, ols);
  double best = boost::math::tools::brent_find_minima(objective, lo, hi, 26).first;

  // Newton polish. Near the minimum the objective is flat to rounding, so
  // steps are judged by the gradient instead.
  const auto gradient = [&](double b) {
    return zz * b - zr + alpha * b / std::sqrt(b * b + other_norm_sq);
  };
  double grad = gradient(best);
  for (int step = 0; step < 8 && grad != 0.0; ++step) {
    const double root = std::sqrt(best * best + other_norm_sq);
    const double curv = zz + alpha * other_norm_sq / (root * root * root);
    const double candidate = std::clamp(best - grad / curv, lo, hi);
    const double candidate_grad = gradient(candidate);
    if (!(std::abs(candidate_grad) < std::abs(grad))) break;
    best = candidate;
    grad = candidate_grad;
  }
  return best;
}

} // namespace jointnorm
