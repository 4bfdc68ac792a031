#include "jointnorm/benchmark.hpp"

#include "jointnorm/auc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace jointnorm {

std::vector<GridCell> parse_grid(const std::string& text) {
  std::vector<GridCell> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    GridCell cell;
    char colon = 0;
    std::istringstream is(item);
    if (!(is >> cell.de_pct >> colon >> cell.up_pct) || colon != ':' ||
        !(is >> std::ws).eof())
      throw ConfigError("bad grid cell '" + item + "', expected DE:UP");
    if (cell.de_pct < 0 || cell.de_pct > 100 || cell.up_pct < 0 || cell.up_pct > 100)
      throw ConfigError("grid percentages must be in [0,100]");
    grid.push_back(cell);
  }
  if (grid.empty()) throw ConfigError("empty grid");
  return grid;
}

std::vector<GridCell> table_grid() {
  std::vector<GridCell> grid;
  for (int de : {30, 50, 70})
    for (int up : {50, 70, 90}) grid.push_back({de, up});
  return grid;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::string describe_benchmark(const BenchmarkConfig& cfg,
                               const DetectorList& detectors) {
  const SimulationConfig& b = cfg.base;
  std::ostringstream os;
  os << "grid=";
  for (std::size_t k = 0; k < cfg.grid.size(); ++k)
    os << (k ? "," : "") << cfg.grid[k].de_pct << ":" << cfg.grid[k].up_pct;
  os << ";replicates=" << cfg.replicates << ";distribution="
     << distribution_name(b.distribution) << ";genes=" << b.genes
     << ";samples=" << b.samples << ";lognormal_sd=" << format_double(b.lognormal_sd)
     << ";dispersion_scale=" << format_double(b.negbin_dispersion_scale)
     << ";fold_mean=" << format_double(b.fold_mean) << ";seed=" << b.seed
     << ";detectors=";
  for (std::size_t k = 0; k < detectors.size(); ++k)
    os << (k ? "," : "") << detectors[k]->describe();
  return os.str();
}

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg,
                              const DetectorList& detectors) {
  if (cfg.replicates < 1) throw ConfigError("replicates must be at least 1");
  if (detectors.empty()) throw ConfigError("no detectors");
  if (cfg.grid.empty()) throw ConfigError("empty grid");
  cfg.base.validate();

  const auto cells = static_cast<long>(cfg.grid.size());
  const long reps = cfg.replicates;
  const auto ndet = detectors.size();

  // One slot per (cell, replicate, detector); empty on failure.
  std::vector<std::optional<double>> aucs(static_cast<std::size_t>(cells * reps) * ndet);
  std::vector<std::string> errors(aucs.size());

#pragma omp parallel for schedule(dynamic)
  for (long task = 0; task < cells * reps; ++task) {
    const GridCell& cell = cfg.grid[static_cast<std::size_t>(task / reps)];
    SimulationConfig sim = cfg.base;
    sim.de_fraction = cell.de_pct / 100.0;
    sim.up_fraction = cell.up_pct / 100.0;
    sim.seed = cfg.base.seed + static_cast<std::uint64_t>(task % reps);
    std::optional<SimulatedData> data;
    std::string sim_error;
    try {
      data = simulate(sim);
    } catch (const std::exception& e) {
      sim_error = e.what();
    }
    for (std::size_t d = 0; d < ndet; ++d) {
      const auto slot = static_cast<std::size_t>(task) * ndet + d;
      if (!data) {
        errors[slot] = "simulation failed: " + sim_error;
        continue;
      }
      try {
        const auto scores =
            detectors[d]->scores(data->counts, truth_covariates(data->truth));
        aucs[slot] = auc(scores, data->truth.de_labels);
      } catch (const std::exception& e) {
        errors[slot] = e.what();
      }
    }
  }

  BenchmarkReport report;
  for (long c = 0; c < cells; ++c) {
    for (std::size_t d = 0; d < ndet; ++d) {
      BenchmarkRow row;
      row.de_pct = cfg.grid[static_cast<std::size_t>(c)].de_pct;
      row.up_pct = cfg.grid[static_cast<std::size_t>(c)].up_pct;
      row.method = detectors[d]->name();
      for (long r = 0; r < reps; ++r) {
        const auto slot = static_cast<std::size_t>(c * reps + r) * ndet + d;
        if (aucs[slot]) {
          row.aucs.push_back(*aucs[slot]);
        } else {
          row.complete = false;
          if (row.error.empty()) row.error = errors[slot];
        }
      }
      row.replicates = static_cast<int>(row.aucs.size());
      if (row.replicates > 0) {
        double sum = 0.0;
        for (double a : row.aucs) sum += a;
        row.mean_auc = sum / row.replicates;
        if (row.replicates > 1) {
          double ss = 0.0;
          for (double a : row.aucs) ss += (a - row.mean_auc) * (a - row.mean_auc);
          row.stderr_auc = std::sqrt(ss / (row.replicates - 1)) / std::sqrt(row.replicates);
        } else {
          row.single_replicate = true;
        }
      } else {
        row.mean_auc = std::nan("");
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.description = describe_benchmark(cfg, detectors);
  report.fingerprint = fnv1a(report.description);
  return report;
}

void write_report(const std::filesystem::path& path, const BenchmarkReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "de_pct\tup_pct\tmethod\tmean_auc\tstderr\treplicates\n";
  for (const auto& row : report.rows)
    out << row.de_pct << '\t' << row.up_pct << '\t' << row.method << '\t'
        << (row.replicates > 0 ? format_double(row.mean_auc) : "NA") << '\t'
        << format_double(row.stderr_auc) << '\t' << row.replicates << '\n';
}

} // namespace jointnorm
