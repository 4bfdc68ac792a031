#include "jointnorm/design.hpp"

#include <cmath>

namespace jointnorm {

DesignMatrix standardize_design(const RowMatrix& raw,
                                std::vector<std::string> names) {
  const Index n = raw.rows();
  const Index p = raw.cols();
  if (n < 2) throw DataError("design needs at least 2 samples");
  if (p < 1) throw DataError("design needs at least one covariate");
  if (!raw.allFinite()) throw DataError("non-finite covariate value");
  if (names.empty())
    for (Index k = 0; k < p; ++k) names.push_back("x" + std::to_string(k + 1));
  if (static_cast<Index>(names.size()) != p)
    throw DataError("covariate name count does not match design width");

  DesignMatrix d;
  d.values.resize(n, p);
  d.center.resize(p);
  d.scale.resize(p);
  d.covariate_names = std::move(names);

  for (Index k = 0; k < p; ++k) {
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) sum += raw(j, k);
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    double peak = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double dev = raw(j, k) - mean;
      ss += dev * dev;
      peak = std::max(peak, std::abs(raw(j, k)));
    }
    const double norm = std::sqrt(ss);
    if (norm <= 1e-12 * std::max(1.0, peak))
      throw DataError("degenerate design: covariate '" + d.covariate_names[k] +
                      "' is constant");

    if (std::abs(mean) <= 1e-12 && std::abs(norm - 1.0) <= 1e-12) {
      d.values.col(k) = raw.col(k);
      d.center[k] = 0.0;
      d.scale[k] = 1.0;
      continue;
    }
    for (Index j = 0; j < n; ++j) d.values(j, k) = (raw(j, k) - mean) / norm;
    d.center[k] = mean;
    d.scale[k] = norm;
  }
  return d;
}

} // namespace jointnorm
