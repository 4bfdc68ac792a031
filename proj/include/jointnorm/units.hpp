#pragma once

#include "jointnorm/io.hpp"

#include <string_view>

namespace jointnorm {

enum class Unit { Raw, Cpm, Fpkm, Tpm };

Unit parse_unit(std::string_view name);
std::string_view unit_name(Unit unit);

/// Converts counts to the requested expression unit:
///   cpm  = 1e6 c / N_j
///   fpkm = 1e9 c / (l_i N_j)
///   tpm  = 1e6 (c / l_i) / sum_i (c / l_i)
/// `pseudocount` is added to every count before scaling, so that the log of
/// any unit differs from log(c + pseudocount) only by gene and sample terms.
/// FPKM and TPM need gene lengths.
RowMatrix to_unit(const CountMatrix& counts, Unit unit, double pseudocount = 0.0);

/// y_ij = ln(value_ij + pseudocount). Natural log throughout.
ExpressionMatrix log_transform(const RowMatrix& values, double pseudocount,
                               std::vector<std::string> gene_ids = {},
                               std::vector<std::string> sample_ids = {});

/// ln(to_unit(counts, unit, pseudocount)), carrying identifiers along.
ExpressionMatrix log_expression(const CountMatrix& counts, Unit unit,
                                double pseudocount);

inline constexpr double kDefaultPseudocount = 0.5;

} // namespace jointnorm
