#pragma once

#include "jointnorm/io.hpp"
#include "jointnorm/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace jointnorm {

enum class Distribution { Lognormal, Negbin };

Distribution parse_distribution(std::string_view name);
std::string_view distribution_name(Distribution d);

struct SimulationConfig {
  Index genes = 1000;
  Index samples = 15;
  double de_fraction = 0.0;
  double up_fraction = 0.5;
  Distribution distribution = Distribution::Lognormal;
  double lognormal_sd = 0.31622776601683794; // sqrt(0.1); 0 gives noise-free y
  double negbin_dispersion_scale = 0.2;
  double fold_mean = 2.0;
  std::uint64_t seed = 1;

  /// Throws ConfigError.
  void validate() const;
  Index de_count() const;
  Index up_count() const;

  /// Log-normal scheme with log-fold changes centred at +-2 and y noise of
  /// variance 0.1.
  static SimulationConfig figure_preset();
  /// Benchmark scheme: log-fold changes centred at +-1, y noise sd 0.1.
  static SimulationConfig benchmark_preset();
};

struct SimulationTruth {
  std::vector<bool> de_labels;
  std::vector<bool> up_labels;
  Vector true_beta;  // 0 for non-DE genes
  Vector true_beta0;
  Vector x;          // covariate, one value per sample
  Vector gene_lengths;
  Vector library_sizes;
  Vector dispersion; // per-gene NB dispersion actually used; empty for lognormal
};

struct SimulatedData {
  CountMatrix counts;
  SimulationTruth truth;
};

/// Dispatches on cfg.distribution.
SimulatedData simulate(const SimulationConfig& cfg);

/// y_ij = beta0_i + beta_i x_j + noise, counts
/// floor(N_j l_i e^y_ij / sum_l l_l e^y_lj) + 1.
SimulatedData simulate_lognormal(const SimulationConfig& cfg);

/// Counts ~ NB(mean mu_ij, dispersion phi_i), mu_ij = N_j l_i e^eta_ij /
/// sum_l l_l e^eta_lj with eta = beta0 + beta x.
SimulatedData simulate_negbin(const SimulationConfig& cfg);

/// Gamma-Poisson draw with variance mean + dispersion * mean^2. Poisson
/// when dispersion is 0.
double sample_negbin(double mean, double dispersion, CounterRng& rng);

/// `gene_id<TAB>is_de<TAB>true_beta`.
void write_truth(const std::filesystem::path& path,
                 const std::vector<std::string>& gene_ids,
                 const SimulationTruth& truth);

/// The covariate as a one-column table named `x`.
CovariateTable truth_covariates(const SimulationTruth& truth);

} // namespace jointnorm
