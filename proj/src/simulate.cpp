#include "jointnorm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

namespace jointnorm {

namespace {

// Stream purposes.
enum : std::uint64_t { kGeneStream = 1, kSampleStream, kSelectStream, kNoiseStream };

double normal(CounterRng& rng, double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

double uniform(CounterRng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::string numbered(const char* prefix, Index k) {
  return prefix + std::to_string(k + 1);
}

struct Skeleton {
  SimulationTruth truth;
  std::vector<std::string> gene_ids;
  std::vector<std::string> sample_ids;
};

// Gene and sample parameters shared by both count models.
Skeleton draw_parameters(const SimulationConfig& cfg) {
  cfg.validate();
  const Index m = cfg.genes;
  const Index n = cfg.samples;
  Skeleton s;
  SimulationTruth& t = s.truth;
  t.de_labels.assign(static_cast<std::size_t>(m), false);
  t.up_labels.assign(static_cast<std::size_t>(m), false);
  t.true_beta = Vector::Zero(m);
  t.true_beta0.resize(m);
  t.gene_lengths.resize(m);

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  CounterRng select(cfg.seed, kSelectStream, 0);
  std::shuffle(order.begin(), order.end(), select);
  const Index de = cfg.de_count();
  const Index up = cfg.up_count();
  for (Index k = 0; k < de; ++k) {
    const auto i = static_cast<std::size_t>(order[static_cast<std::size_t>(k)]);
    t.de_labels[i] = true;
    t.up_labels[i] = k < up;
  }

  for (Index i = 0; i < m; ++i) {
    CounterRng rng(cfg.seed, kGeneStream, static_cast<std::uint64_t>(i));
    t.true_beta0[i] = normal(rng, -3.0, std::sqrt(2.0));
    t.gene_lengths[i] = std::exp(uniform(rng, 5.0, 10.0));
    const auto ui = static_cast<std::size_t>(i);
    if (t.de_labels[ui]) {
      // Redraw until the sign agrees with the up/down assignment.
      const double sign = t.up_labels[ui] ? 1.0 : -1.0;
      double b = 0.0;
      do b = normal(rng, sign * cfg.fold_mean, 1.0);
      while (!(b * sign > 0.0));
      t.true_beta[i] = b;
    }
  }

  t.x.resize(n);
  t.library_sizes.resize(n);
  for (Index j = 0; j < n; ++j) {
    CounterRng rng(cfg.seed, kSampleStream, static_cast<std::uint64_t>(j));
    t.x[j] = normal(rng, 0.0, 1.0);
    t.library_sizes[j] = uniform(rng, 3e7, 5e7);
  }

  for (Index i = 0; i < m; ++i) s.gene_ids.push_back(numbered("gene", i));
  for (Index j = 0; j < n; ++j) s.sample_ids.push_back(numbered("s", j));
  return s;
}

// Per-sample allocation N_j l_i e^eta_ij / sum_l l_l e^eta_lj, computed
// with the column maximum factored out for range safety.
RowMatrix allocate(const RowMatrix& eta, const Vector& lengths,
                   const Vector& library_sizes) {
  RowMatrix share(eta.rows(), eta.cols());
  for (Index j = 0; j < eta.cols(); ++j) {
    const double top = eta.col(j).maxCoeff();
    double total = 0.0;
    for (Index i = 0; i < eta.rows(); ++i) {
      share(i, j) = lengths[i] * std::exp(eta(i, j) - top);
      total += share(i, j);
    }
    for (Index i = 0; i < eta.rows(); ++i)
      share(i, j) = library_sizes[j] * share(i, j) / total;
  }
  return share;
}

SimulatedData assemble(Skeleton s, RowMatrix counts) {
  SimulatedData out;
  out.counts.counts = std::move(counts);
  out.counts.gene_ids = std::move(s.gene_ids);
  out.counts.sample_ids = std::move(s.sample_ids);
  out.counts.gene_lengths = s.truth.gene_lengths;
  out.counts.library_sizes = out.counts.counts.colwise().sum().transpose();
  out.counts.validate();
  out.truth = std::move(s.truth);
  return out;
}

} // namespace

Distribution parse_distribution(std::string_view name) {
  if (name == "lognormal") return Distribution::Lognormal;
  if (name == "negbin") return Distribution::Negbin;
  throw ConfigError("unknown distribution '" + std::string(name) + "'");
}

std::string_view distribution_name(Distribution d) {
  return d == Distribution::Lognormal ? "lognormal" : "negbin";
}

void SimulationConfig::validate() const {
  if (genes < 2 || samples < 2)
    throw ConfigError("simulation needs at least 2 genes and 2 samples");
  if (!(de_fraction >= 0.0 && de_fraction <= 1.0))
    throw ConfigError("DE fraction must be in [0,1]");
  if (!(up_fraction >= 0.0 && up_fraction <= 1.0))
    throw ConfigError("up fraction must be in [0,1]");
  if (!(lognormal_sd >= 0.0) || !std::isfinite(lognormal_sd))
    throw ConfigError("log-normal sd must be non-negative");
  if (!(negbin_dispersion_scale >= 0.0) || !std::isfinite(negbin_dispersion_scale))
    throw ConfigError("dispersion scale must be non-negative");
  if (!(fold_mean > 0.0) || !std::isfinite(fold_mean))
    throw ConfigError("fold mean must be positive");
}

Index SimulationConfig::de_count() const {
  return static_cast<Index>(std::floor(static_cast<double>(genes) * de_fraction + 0.5));
}

Index SimulationConfig::up_count() const {
  return static_cast<Index>(
      std::floor(static_cast<double>(de_count()) * up_fraction + 0.5));
}

SimulationConfig SimulationConfig::figure_preset() { return SimulationConfig{}; }

SimulationConfig SimulationConfig::benchmark_preset() {
  SimulationConfig cfg;
  cfg.fold_mean = 1.0;
  cfg.lognormal_sd = 0.1;
  return cfg;
}

SimulatedData simulate(const SimulationConfig& cfg) {
  return cfg.distribution == Distribution::Lognormal ? simulate_lognormal(cfg)
                                                     : simulate_negbin(cfg);
}

SimulatedData simulate_lognormal(const SimulationConfig& cfg) {
  Skeleton s = draw_parameters(cfg);
  const SimulationTruth& t = s.truth;
  const Index m = cfg.genes;
  const Index n = cfg.samples;

  RowMatrix y(m, n);
  for (Index i = 0; i < m; ++i) {
    CounterRng rng(cfg.seed, kNoiseStream, static_cast<std::uint64_t>(i));
    for (Index j = 0; j < n; ++j) {
      const double noise = cfg.lognormal_sd > 0.0 ? normal(rng, 0.0, cfg.lognormal_sd) : 0.0;
      y(i, j) = t.true_beta0[i] + t.true_beta[i] * t.x[j] + noise;
    }
  }
  RowMatrix counts = allocate(y, t.gene_lengths, t.library_sizes);
  counts = counts.array().floor() + 1.0;
  return assemble(std::move(s), std::move(counts));
}

double sample_negbin(double mean, double dispersion, CounterRng& rng) {
  if (!(mean > 0.0)) return 0.0;
  double rate = mean;
  if (dispersion > 0.0) {
    const double shape = 1.0 / dispersion;
    rate = std::gamma_distribution<double>(shape, mean / shape)(rng);
    if (!(rate > 0.0)) return 0.0;
  }
  return static_cast<double>(std::poisson_distribution<long long>(rate)(rng));
}

SimulatedData simulate_negbin(const SimulationConfig& cfg) {
  Skeleton s = draw_parameters(cfg);
  SimulationTruth& t = s.truth;
  const Index m = cfg.genes;
  const Index n = cfg.samples;

  RowMatrix eta(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) eta(i, j) = t.true_beta0[i] + t.true_beta[i] * t.x[j];
  const RowMatrix mu = allocate(eta, t.gene_lengths, t.library_sizes);

  t.dispersion.resize(m);
  RowMatrix counts(m, n);
  for (Index i = 0; i < m; ++i) {
    CounterRng rng(cfg.seed, kNoiseStream, static_cast<std::uint64_t>(i));
    t.dispersion[i] = cfg.negbin_dispersion_scale * std::exp(normal(rng, -1.5, 0.5));
    for (Index j = 0; j < n; ++j)
      counts(i, j) = sample_negbin(mu(i, j), t.dispersion[i], rng);
  }
  return assemble(std::move(s), std::move(counts));
}

void write_truth(const std::filesystem::path& path,
                 const std::vector<std::string>& gene_ids,
                 const SimulationTruth& truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "gene_id\tis_de\ttrue_beta\n";
  for (std::size_t i = 0; i < gene_ids.size(); ++i)
    out << gene_ids[i] << '\t' << (truth.de_labels[i] ? 1 : 0) << '\t'
        << format_double(truth.true_beta[static_cast<Index>(i)]) << '\n';
}

CovariateTable truth_covariates(const SimulationTruth& truth) {
  CovariateTable table;
  table.names = {"x"};
  table.values = truth.x;
  return table;
}

} // namespace jointnorm
