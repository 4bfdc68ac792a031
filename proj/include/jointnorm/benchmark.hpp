#pragma once

#include "jointnorm/detectors.hpp"
#include "jointnorm/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace jointnorm {

struct GridCell {
  int de_pct = 0;
  int up_pct = 0;
};

/// Parses `30:50,70:90`.
std::vector<GridCell> parse_grid(const std::string& text);

/// DE in {30,50,70} x Up in {50,70,90}.
std::vector<GridCell> table_grid();

struct BenchmarkConfig {
  std::vector<GridCell> grid;
  SimulationConfig base = SimulationConfig::benchmark_preset(); // seed = base seed
  int replicates = 10;
};

struct BenchmarkRow {
  int de_pct = 0;
  int up_pct = 0;
  std::string method;
  double mean_auc = 0.0;
  double stderr_auc = 0.0;
  int replicates = 0;       // successful replicates
  bool single_replicate = false; // stderr undefined, reported as 0
  bool complete = true;     // false when any replicate failed
  std::vector<double> aucs; // per successful replicate
  std::string error;        // first failure message
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows; // sorted by (de, up, detector order)
  std::string description;        // canonical config text
  std::uint64_t fingerprint = 0;  // FNV-1a of `description`
};

/// For each cell and replicate r: simulate with seed base.seed + r, run
/// every detector, score by AUC against the truth. Cells and replicates run
/// in parallel; the report does not depend on the thread count.
BenchmarkReport run_benchmark(const BenchmarkConfig& cfg,
                              const DetectorList& detectors);

std::string describe_benchmark(const BenchmarkConfig& cfg,
                               const DetectorList& detectors);

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t value);

/// `de_pct<TAB>up_pct<TAB>method<TAB>mean_auc<TAB>stderr<TAB>replicates`.
void write_report(const std::filesystem::path& path, const BenchmarkReport& report);

} // namespace jointnorm
