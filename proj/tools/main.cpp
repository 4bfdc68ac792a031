#include "jointnorm/admm_multiple.hpp"
#include "jointnorm/admm_simple.hpp"
#include "jointnorm/benchmark.hpp"
#include "jointnorm/io.hpp"
#include "jointnorm/manifest.hpp"
#include "jointnorm/simulate.hpp"
#include "jointnorm/units.hpp"
#include "jointnorm/variance.hpp"

#include <CLI11.hpp>

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace jointnorm;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNotConverged = 4;

// Option values are parsed with from_chars so that a manifest written with
// format_double reproduces every double bit for bit.
double parse_double(const std::string& text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw CLI::ValidationError("'" + text + "' is not a finite number");
  return v;
}

CLI::Option* add_number(CLI::App& app, const std::string& name, double& target,
                        const std::string& help) {
  return app
      .add_option_function<std::string>(
          name, [&target](const std::string& s) { target = parse_double(s); }, help)
      ->default_str(format_double(target));
}

std::string absolute(const std::string& path) {
  return path.empty() ? path : fs::absolute(path).lexically_normal().string();
}

struct SolverFlags {
  SolverConfig cfg;
  double alpha = 0.0;
  CLI::Option* alpha_opt = nullptr;

  void add(CLI::App& app) {
    add_number(app, "--rho", cfg.rho, "ADMM penalty parameter");
    add_number(app, "--alpha-ratio", cfg.alpha_ratio, "alpha as a fraction of alpha_max, in (0,1)");
    alpha_opt = add_number(app, "--alpha", alpha, "explicit alpha; overrides --alpha-ratio");
    app.add_option("--max-iter", cfg.max_iter, "ADMM iteration cap")->capture_default_str();
    add_number(app, "--primal-tol", cfg.primal_tol, "primal residual tolerance");
    add_number(app, "--dual-tol", cfg.dual_tol, "dual residual tolerance");
    add_number(app, "--de-threshold", cfg.de_threshold,
               "DE call threshold on the standardized coefficient");
  }
  SolverConfig resolve() const {
    SolverConfig out = cfg;
    if (alpha_opt->count()) out.alpha_override = alpha;
    out.validate();
    return out;
  }
  void record(Manifest& m) const {
    m.set("rho", cfg.rho);
    m.set("alpha-ratio", cfg.alpha_ratio);
    if (alpha_opt->count()) m.set("alpha", alpha);
    m.set("max-iter", static_cast<long long>(cfg.max_iter));
    m.set("primal-tol", cfg.primal_tol);
    m.set("dual-tol", cfg.dual_tol);
    m.set("de-threshold", cfg.de_threshold);
  }
};

struct SimulationFlags {
  SimulationConfig cfg;
  std::string distribution;
  long long seed = 1;

  explicit SimulationFlags(SimulationConfig preset)
      : cfg(preset), distribution(distribution_name(preset.distribution)),
        seed(static_cast<long long>(preset.seed)) {}

  void add(CLI::App& app, bool with_fractions) {
    app.add_option("--genes", cfg.genes, "number of genes")->capture_default_str();
    app.add_option("--samples", cfg.samples, "number of samples")->capture_default_str();
    if (with_fractions) {
      add_number(app, "--de-fraction", cfg.de_fraction, "fraction of DE genes");
      add_number(app, "--up-fraction", cfg.up_fraction, "fraction of DE genes up-regulated");
    }
    app.add_option("--distribution", distribution, "lognormal or negbin")
        ->check(CLI::IsMember({"lognormal", "negbin"}))
        ->capture_default_str();
    add_number(app, "--lognormal-sd", cfg.lognormal_sd, "sd of log-scale noise");
    add_number(app, "--dispersion-scale", cfg.negbin_dispersion_scale,
               "multiplier on the NB dispersion prior");
    add_number(app, "--fold-mean", cfg.fold_mean, "mean absolute log-fold change of DE genes");
    app.add_option("--seed", seed, "base random seed")->capture_default_str();
  }
  SimulationConfig resolve() const {
    SimulationConfig out = cfg;
    out.distribution = parse_distribution(distribution);
    out.seed = static_cast<std::uint64_t>(seed);
    out.validate();
    return out;
  }
  void record(Manifest& m, bool with_fractions) const {
    m.set("genes", static_cast<long long>(cfg.genes));
    m.set("samples", static_cast<long long>(cfg.samples));
    if (with_fractions) {
      m.set("de-fraction", cfg.de_fraction);
      m.set("up-fraction", cfg.up_fraction);
    }
    m.set("distribution", distribution);
    m.set("lognormal-sd", cfg.lognormal_sd);
    m.set("dispersion-scale", cfg.negbin_dispersion_scale);
    m.set("fold-mean", cfg.fold_mean);
    m.set("seed", seed);
  }
};

struct Common {
  std::string out_prefix;
  std::string manifest;
  int threads = omp_get_max_threads();

  void add(CLI::App& app) {
    app.add_option("--out-prefix", out_prefix, "prefix for every output file")->required();
    app.add_option("--threads", threads, "worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--manifest", manifest,
                   "rerun from a manifest; explicit flags override its values");
  }
  void record(Manifest& m, const std::string& command) const {
    m.set("command", command);
    m.set("version", std::string(JOINTNORM_VERSION));
    m.set("out-prefix", absolute(out_prefix));
    m.set("threads", static_cast<long long>(threads));
  }
  fs::path output(const std::string& suffix) const { return out_prefix + suffix; }
};

// ---- fit ----

struct FitFlags {
  Common common;
  SolverFlags solver;
  std::string counts, covariates, lengths, libsizes, truth;
  std::string unit = "raw";
  double pseudocount = kDefaultPseudocount;
  std::string penalty = "simple";
  std::string interest;

  void add(CLI::App& app) {
    app.add_option("--counts", counts, "count matrix TSV")->required();
    app.add_option("--covariates", covariates, "sample covariate TSV")->required();
    app.add_option("--lengths", lengths, "gene length TSV");
    app.add_option("--libsizes", libsizes, "library size override TSV");
    app.add_option("--unit", unit, "raw, cpm, fpkm or tpm")
        ->check(CLI::IsMember({"raw", "cpm", "fpkm", "tpm"}))
        ->capture_default_str();
    add_number(app, "--pseudocount", pseudocount, "added to counts before the log");
    app.add_option("--penalty", penalty, "simple, type1 or type2")
        ->check(CLI::IsMember({"simple", "type1", "type2"}))
        ->capture_default_str();
    app.add_option("--covariate-of-interest", interest, "penalized covariate column");
    app.add_option("--truth", truth, "truth TSV; writes true vs estimated coefficients");
    solver.add(app);
    common.add(app);
  }
};

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

void write_fit(const fs::path& path, const CountMatrix& counts, const FitResult& fit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "gene_id\tbeta0";
  if (fit.beta.cols() == 1)
    out << "\tbeta";
  else
    for (const auto& name : fit.covariate_names) out << "\tbeta_" << name;
  out << "\tsigma2\tde_flag\n";
  for (Index i = 0; i < fit.genes(); ++i) {
    out << counts.gene_ids[static_cast<std::size_t>(i)] << '\t' << format_double(fit.beta0[i]);
    for (Index k = 0; k < fit.beta.cols(); ++k) out << '\t' << format_double(fit.beta(i, k));
    out << '\t' << format_double(fit.sigma2[i]) << '\t'
        << (fit.de_flags[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
  }
}

void write_samples(const fs::path& path, const CountMatrix& counts, const FitResult& fit) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "sample_id\td\n";
  for (Index j = 0; j < fit.d.size(); ++j)
    out << counts.sample_ids[static_cast<std::size_t>(j)] << '\t' << format_double(fit.d[j])
        << '\n';
}

// Joins a truth file onto the fit: one row per gene with the true and
// estimated coefficient of the covariate of interest.
void write_figure(const fs::path& truth_path, const fs::path& out_path,
                  const CountMatrix& counts, const FitResult& fit) {
  std::ifstream in(truth_path);
  if (!in) throw DataError("cannot open " + truth_path.string());
  std::map<std::string, std::pair<std::string, std::string>> truth;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() < 3) throw DataError(truth_path.string() + ": malformed row");
    truth[f[0]] = {f[1], f[2]};
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + out_path.string());
  out << "gene_id\tis_de\ttrue_beta\tbeta\tbeta_std\n";
  for (Index i = 0; i < fit.genes(); ++i) {
    const auto& id = counts.gene_ids[static_cast<std::size_t>(i)];
    const auto it = truth.find(id);
    if (it == truth.end()) throw DataError("truth file has no row for '" + id + "'");
    out << id << '\t' << it->second.first << '\t' << it->second.second << '\t'
        << format_double(fit.beta(i, fit.interest)) << '\t'
        << format_double(fit.beta_std(i, fit.interest)) << '\n';
  }
}

int run_fit(const FitFlags& f) {
  const Penalty penalty = parse_penalty(f.penalty);
  const SolverConfig cfg = f.solver.resolve();
  if (!(f.pseudocount > 0.0)) throw ConfigError("pseudocount must be positive");
  if (penalty == Penalty::Type1 && f.interest.empty())
    throw ConfigError("--penalty type1 requires --covariate-of-interest");
  if (penalty == Penalty::Type2 && !f.interest.empty())
    throw ConfigError("--covariate-of-interest does not apply to type2");

  CountMatrix counts = load_counts(f.counts);
  if (!f.lengths.empty()) attach_gene_lengths(counts, f.lengths);
  if (!f.libsizes.empty()) attach_library_sizes(counts, f.libsizes);
  CovariateTable table = load_covariates(f.covariates, counts.sample_ids);

  Index interest = 0;
  if (!f.interest.empty()) {
    const auto it = std::find(table.names.begin(), table.names.end(), f.interest);
    if (it == table.names.end())
      throw ConfigError("no covariate named '" + f.interest + "'");
    interest = it - table.names.begin();
  }
  if (penalty == Penalty::Simple && table.values.cols() > 1) {
    if (f.interest.empty())
      throw ConfigError("--penalty simple takes one covariate; name it with "
                        "--covariate-of-interest");
    table.values = RowMatrix(table.values.col(interest));
    table.names = {table.names[static_cast<std::size_t>(interest)]};
    interest = 0;
  }

  const ExpressionMatrix y = log_expression(counts, parse_unit(f.unit), f.pseudocount);
  const DesignMatrix x = standardize_design(table.values, table.names);
  const VarianceEstimates sigma2 = estimate_shrunken_variances(y.values, x);
  std::cerr << "variances: iterations=" << sigma2.iterations
            << " converged=" << sigma2.converged
            << " shrinkage_weight=" << format_double(sigma2.weight) << '\n';

  FitResult fit;
  switch (penalty) {
  case Penalty::Simple: fit = fit_simple(y, x, sigma2, cfg); break;
  case Penalty::Type1: fit = fit_type1(y.values, x, sigma2, interest, cfg); break;
  case Penalty::Type2: fit = fit_type2(y.values, x, sigma2, cfg); break;
  }
  std::cerr << "alpha_max=" << format_double(fit.alpha_max)
            << " alpha=" << format_double(fit.alpha_used) << " iterations=" << fit.iterations
            << " primal_residual=" << format_double(fit.primal_residual)
            << " dual_residual=" << format_double(fit.dual_residual)
            << " converged=" << (fit.converged ? "yes" : "no") << '\n';

  write_fit(f.common.output(".fit.tsv"), counts, fit);
  write_samples(f.common.output(".samples.tsv"), counts, fit);
  if (!f.truth.empty()) write_figure(f.truth, f.common.output(".figure.tsv"), counts, fit);

  Manifest m;
  f.common.record(m, "fit");
  f.solver.record(m);
  m.set("counts", absolute(f.counts));
  m.set("covariates", absolute(f.covariates));
  if (!f.lengths.empty()) m.set("lengths", absolute(f.lengths));
  if (!f.libsizes.empty()) m.set("libsizes", absolute(f.libsizes));
  if (!f.truth.empty()) m.set("truth", absolute(f.truth));
  m.set("unit", f.unit);
  m.set("pseudocount", f.pseudocount);
  m.set("penalty", f.penalty);
  if (!f.interest.empty()) m.set("covariate-of-interest", f.interest);
  m.set("result.alpha_max", fit.alpha_max);
  m.set("result.alpha_used", fit.alpha_used);
  m.set("result.iterations", static_cast<long long>(fit.iterations));
  m.set("result.converged", std::string(fit.converged ? "true" : "false"));
  m.write(f.common.output(".manifest"));

  if (!fit.converged) {
    std::cerr << "warning: ADMM did not converge in " << fit.iterations << " iterations\n";
    return kExitNotConverged;
  }
  return 0;
}

// ---- simulate ----

struct SimulateFlags {
  Common common;
  SimulationFlags sim{SimulationConfig::figure_preset()};
  void add(CLI::App& app) {
    sim.add(app, true);
    common.add(app);
  }
};

int run_simulate(const SimulateFlags& f) {
  const SimulationConfig cfg = f.sim.resolve();
  const SimulatedData data = simulate(cfg);
  write_counts(f.common.output(".counts.tsv"), data.counts);
  write_gene_lengths(f.common.output(".lengths.tsv"), data.counts);
  write_covariates(f.common.output(".covariates.tsv"), data.counts.sample_ids,
                   truth_covariates(data.truth));
  write_truth(f.common.output(".truth.tsv"), data.counts.gene_ids, data.truth);

  Manifest m;
  f.common.record(m, "simulate");
  f.sim.record(m, true);
  m.write(f.common.output(".manifest"));

  const auto de = std::count(data.truth.de_labels.begin(), data.truth.de_labels.end(), true);
  const auto up = std::count(data.truth.up_labels.begin(), data.truth.up_labels.end(), true);
  std::cout << "genes=" << cfg.genes << " samples=" << cfg.samples << " de=" << de
            << " up=" << up << " down=" << de - up << '\n';
  return 0;
}

// ---- benchmark ----

struct BenchmarkFlags {
  Common common;
  SolverFlags solver;
  SimulationFlags sim{SimulationConfig::benchmark_preset()};
  std::string grid;
  std::string preset;
  int replicates = 10;
  std::vector<std::string> detector_cmds;

  void add(CLI::App& app) {
    app.add_option("--grid", grid, "cells as DE:UP percentages, e.g. 30:50,70:90");
    app.add_option("--preset", preset, "table2: DE {30,50,70} x Up {50,70,90}")
        ->check(CLI::IsMember({"table2"}));
    app.add_option("--replicates", replicates, "replicates per cell")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--detector-cmd", detector_cmds,
                   "external detector NAME=COMMAND, called as COMMAND counts covariates scores")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sim.add(app, false);
    solver.add(app);
    common.add(app);
  }
};

int run_benchmark_command(const BenchmarkFlags& f) {
  if (f.grid.empty() == f.preset.empty())
    throw ConfigError("benchmark needs exactly one of --grid and --preset");
  BenchmarkConfig cfg;
  cfg.grid = f.preset.empty() ? parse_grid(f.grid) : table_grid();
  cfg.base = f.sim.resolve();
  cfg.replicates = f.replicates;

  DetectorList detectors = builtin_detectors(f.solver.resolve());
  for (const auto& entry : f.detector_cmds) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size())
      throw ConfigError("--detector-cmd expects NAME=COMMAND, got '" + entry + "'");
    detectors.push_back(
        std::make_unique<ExternalDetector>(entry.substr(0, eq), entry.substr(eq + 1)));
  }

  const BenchmarkReport report = run_benchmark(cfg, detectors);
  write_report(f.common.output(".report.tsv"), report);

  Manifest m;
  f.common.record(m, "benchmark");
  f.sim.record(m, false);
  f.solver.record(m);
  if (f.preset.empty())
    m.set("grid", f.grid);
  else
    m.set("preset", f.preset);
  m.set("replicates", static_cast<long long>(f.replicates));
  for (std::size_t k = 0; k < f.detector_cmds.size(); ++k)
    m.set("detector-cmd." + std::to_string(k + 1), f.detector_cmds[k]);
  m.set("result.fingerprint", hex64(report.fingerprint));
  m.write(f.common.output(".manifest"));

  int status = 0;
  std::cout << "fingerprint=" << hex64(report.fingerprint) << '\n';
  for (const auto& row : report.rows) {
    std::cout << row.de_pct << ':' << row.up_pct << '\t' << row.method << '\t'
              << (row.replicates ? format_double(row.mean_auc) : "NA") << " +- "
              << format_double(row.stderr_auc) << " (" << row.replicates << ")"
              << (row.single_replicate ? " single replicate" : "") << '\n';
    if (!row.complete) {
      std::cerr << "cell " << row.de_pct << ':' << row.up_pct << " method " << row.method
                << " incomplete: " << row.error << '\n';
      status = kExitData;
    }
  }
  return status;
}

// Turns manifest entries into leading arguments; flags given explicitly
// come later and win under the take-last policy.
std::vector<std::string> expand_manifest(std::vector<std::string> args) {
  std::string path;
  for (std::size_t k = 1; k < args.size(); ++k) {
    if (args[k] == "--manifest" && k + 1 < args.size()) path = args[k + 1];
    else if (args[k].rfind("--manifest=", 0) == 0) path = args[k].substr(11);
  }
  if (path.empty() || args.size() < 2) return args;

  const Manifest m = Manifest::read(path);
  const auto command = m.get("command");
  if (command && *command != args[1])
    throw ConfigError("manifest was written by '" + *command + "', not '" + args[1] + "'");
  if (const auto v = m.get("version"); v && *v != JOINTNORM_VERSION)
    std::cerr << "warning: manifest written by version " << *v << '\n';

  std::vector<std::string> out(args.begin(), args.begin() + 2);
  for (const auto& [key, value] : m.entries()) {
    if (key == "command" || key == "version" || key.rfind("result.", 0) == 0) continue;
    const auto dot = key.find('.');
    out.push_back("--" + key.substr(0, dot));
    out.push_back(value);
  }
  out.insert(out.end(), args.begin() + 2, args.end());
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint normalization and differential expression by penalized regression"};
  app.set_version_flag("--version", std::string(JOINTNORM_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  FitFlags fit;
  SimulateFlags sim;
  BenchmarkFlags bench;
  auto* fit_cmd = app.add_subcommand("fit", "fit the model to a count matrix");
  fit.add(*fit_cmd);
  auto* sim_cmd = app.add_subcommand("simulate", "write a synthetic data set with its truth");
  sim.add(*sim_cmd);
  auto* bench_cmd = app.add_subcommand("benchmark", "replicated AUC benchmark over a grid");
  bench.add(*bench_cmd);

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_manifest(std::move(args));
    std::vector<const char*> raw;
    for (const auto& a : args) raw.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(raw.size()), const_cast<char**>(raw.data()));
    } catch (const CLI::Success& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitUsage;
    }

    int threads = 1;
    if (*fit_cmd) threads = fit.common.threads;
    if (*sim_cmd) threads = sim.common.threads;
    if (*bench_cmd) threads = bench.common.threads;
    omp_set_num_threads(threads);

    if (*fit_cmd) return run_fit(fit);
    if (*sim_cmd) return run_simulate(sim);
    return run_benchmark_command(bench);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
