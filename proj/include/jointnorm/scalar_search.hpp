#pragma once

#include "jointnorm/types.hpp"

namespace jointnorm {

/// Minimizer over beta of
///
///   1/2 || z * beta - r ||^2 + alpha * sqrt(beta^2 + other_norm_sq)
///
/// It lies between 0 and the least-squares value z'r / ||z||^2. Uses the
/// closed form when other_norm_sq == 0 or alpha == 0 and a bracketed
/// Brent search polished by Newton steps otherwise. Throws DataError for a
/// zero `z`.
double minimize_scalar_group(const Vector& z, const Vector& r, double alpha,
                             double other_norm_sq);

} // namespace jointnorm
