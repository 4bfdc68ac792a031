#pragma once

#include "jointnorm/types.hpp"

#include <string>
#include <vector>

namespace jointnorm {

/// Standardized covariates: every column has zero mean and unit Euclidean
/// norm. `center` and `scale` map back to the caller's units,
/// x_raw = center + scale * x.
struct DesignMatrix {
  RowMatrix values; // n x p
  std::vector<std::string> covariate_names;
  Vector center;
  Vector scale;

  Index samples() const { return values.rows(); }
  Index covariates() const { return values.cols(); }
};

/// Centers each column and scales it to unit norm. Throws DataError
/// ("degenerate design") for a constant column and for n < 2. Input that is
/// already standardized to within 1e-12 is returned bit-for-bit with
/// center 0 and scale 1.
DesignMatrix standardize_design(const RowMatrix& raw,
                                std::vector<std::string> names = {});

} // namespace jointnorm
