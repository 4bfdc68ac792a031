#pragma once

#include "jointnorm/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace jointnorm {

/// Raw read counts c_ij plus the per-gene and per-sample side information
/// needed by the expression-unit conversions.
struct CountMatrix {
  RowMatrix counts; // m x n, non-negative integers stored as double
  std::vector<std::string> gene_ids;
  std::vector<std::string> sample_ids;
  std::optional<Vector> gene_lengths; // bases, all > 0
  Vector library_sizes;               // N_j (or an override q_j)

  Index genes() const { return counts.rows(); }
  Index samples() const { return counts.cols(); }

  /// Throws DataError when any invariant is broken.
  void validate() const;
};

/// Log-scale expression values y_ij.
struct ExpressionMatrix {
  RowMatrix values;
  std::vector<std::string> gene_ids;
  std::vector<std::string> sample_ids;

  Index genes() const { return values.rows(); }
  Index samples() const { return values.cols(); }
};

/// Numeric sample covariates as read from disk, before standardization.
struct CovariateTable {
  std::vector<std::string> names;
  RowMatrix values; // n x p, rows ordered like the requested sample ids
};

/// Parses a count TSV: header `gene_id<TAB>s1...sn`, one row per gene.
/// Library sizes default to column sums.
CountMatrix load_counts(const std::filesystem::path& path);

/// Attaches gene lengths from a `gene_id<TAB>length` sidecar.
void attach_gene_lengths(CountMatrix& counts, const std::filesystem::path& path);

/// Replaces library sizes with a `sample_id<TAB>libsize` override.
void attach_library_sizes(CountMatrix& counts,
                          const std::filesystem::path& path);

/// Reads `sample_id<TAB>name1...namep` and reorders rows to `sample_ids`.
/// Every sample must appear exactly once.
CovariateTable load_covariates(const std::filesystem::path& path,
                               const std::vector<std::string>& sample_ids);

void write_counts(const std::filesystem::path& path, const CountMatrix& counts);
void write_gene_lengths(const std::filesystem::path& path,
                        const CountMatrix& counts);
void write_covariates(const std::filesystem::path& path,
                      const std::vector<std::string>& sample_ids,
                      const CovariateTable& table);

/// Shortest representation that round-trips through strtod.
std::string format_double(double value);

} // namespace jointnorm
