#include "jointnorm/units.hpp"

#include <cmath>
#include <string>

namespace jointnorm {

Unit parse_unit(std::string_view name) {
  if (name == "raw") return Unit::Raw;
  if (name == "cpm") return Unit::Cpm;
  if (name == "fpkm") return Unit::Fpkm;
  if (name == "tpm") return Unit::Tpm;
  throw ConfigError("unknown unit '" + std::string(name) + "'");
}

std::string_view unit_name(Unit unit) {
  switch (unit) {
  case Unit::Raw: return "raw";
  case Unit::Cpm: return "cpm";
  case Unit::Fpkm: return "fpkm";
  case Unit::Tpm: return "tpm";
  }
  return "raw";
}

RowMatrix to_unit(const CountMatrix& counts, Unit unit, double pseudocount) {
  if (pseudocount < 0.0) throw ConfigError("pseudocount must be non-negative");
  if ((unit == Unit::Fpkm || unit == Unit::Tpm) && !counts.gene_lengths)
    throw DataError("gene lengths required for " + std::string(unit_name(unit)));

  RowMatrix shifted = counts.counts.array() + pseudocount;
  const Index m = counts.genes();
  const Index n = counts.samples();

  switch (unit) {
  case Unit::Raw:
    return shifted;
  case Unit::Cpm:
    for (Index j = 0; j < n; ++j)
      shifted.col(j) *= 1e6 / counts.library_sizes[j];
    return shifted;
  case Unit::Fpkm: {
    const Vector& len = *counts.gene_lengths;
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j)
        shifted(i, j) = 1e9 * shifted(i, j) / (len[i] * counts.library_sizes[j]);
    return shifted;
  }
  case Unit::Tpm: {
    const Vector& len = *counts.gene_lengths;
    for (Index i = 0; i < m; ++i) shifted.row(i) /= len[i];
    for (Index j = 0; j < n; ++j) {
      double total = 0.0;
      for (Index i = 0; i < m; ++i) total += shifted(i, j);
      if (total <= 0.0) throw DataError("TPM undefined for an all-zero sample");
      shifted.col(j) *= 1e6 / total;
    }
    return shifted;
  }
  }
  return shifted;
}

ExpressionMatrix log_transform(const RowMatrix& values, double pseudocount,
                               std::vector<std::string> gene_ids,
                               std::vector<std::string> sample_ids) {
  if (!(pseudocount > 0.0)) throw ConfigError("pseudocount must be positive");
  if (!values.allFinite()) throw DataError("non-finite input value");
  if ((values.array() < 0.0).any()) throw DataError("negative input value");

  ExpressionMatrix out;
  out.values = (values.array() + pseudocount).log().matrix();
  out.gene_ids = std::move(gene_ids);
  out.sample_ids = std::move(sample_ids);
  return out;
}

ExpressionMatrix log_expression(const CountMatrix& counts, Unit unit,
                                double pseudocount) {
  if (!(pseudocount > 0.0)) throw ConfigError("pseudocount must be positive");
  ExpressionMatrix out;
  out.values = to_unit(counts, unit, pseudocount).array().log().matrix();
  if (!out.values.allFinite()) throw DataError("non-finite log expression");
  out.gene_ids = counts.gene_ids;
  out.sample_ids = counts.sample_ids;
  return out;
}

} // namespace jointnorm
