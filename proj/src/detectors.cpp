#include "jointnorm/detectors.hpp"

#include "jointnorm/admm_simple.hpp"
#include "jointnorm/design.hpp"
#include "jointnorm/variance.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <unistd.h>

namespace jointnorm {

namespace {

void require_single_covariate(const CountMatrix& counts,
                              const CovariateTable& covariate) {
  if (covariate.values.cols() != 1)
    throw ConfigError("detectors take exactly one covariate");
  if (covariate.values.rows() != counts.samples())
    throw DataError("covariate rows must match sample count");
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::filesystem::path scratch_dir() {
  static std::atomic<unsigned> counter{0};
  const auto dir = std::filesystem::temp_directory_path() /
                   ("jointnorm-detector-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

} // namespace

std::string SlrAdmmDetector::describe() const {
  std::ostringstream os;
  os << "slr-admm(rho=" << format_double(cfg_.rho)
     << ",ratio=" << format_double(cfg_.alpha_ratio)
     << ",alpha=" << (cfg_.alpha_override ? format_double(*cfg_.alpha_override) : "auto")
     << ",max_iter=" << cfg_.max_iter << ",ptol=" << format_double(cfg_.primal_tol)
     << ",dtol=" << format_double(cfg_.dual_tol) << ",unit=" << unit_name(unit_)
     << ",pc=" << format_double(pseudocount_) << ")";
  return os.str();
}

std::vector<double> SlrAdmmDetector::scores(const CountMatrix& counts,
                                            const CovariateTable& covariate) const {
  require_single_covariate(counts, covariate);
  const ExpressionMatrix y = log_expression(counts, unit_, pseudocount_);
  const DesignMatrix x = standardize_design(covariate.values, covariate.names);
  const VarianceEstimates sigma2 = estimate_shrunken_variances(y.values, x);
  const FitResult fit = fit_simple(y, x, sigma2, cfg_);
  std::vector<double> out(static_cast<std::size_t>(fit.genes()));
  for (Index i = 0; i < fit.genes(); ++i)
    out[static_cast<std::size_t>(i)] = std::abs(fit.beta_std(i, 0));
  return out;
}

std::string NaiveOlsDetector::describe() const {
  return "naive-ols(pc=" + format_double(pseudocount_) + ")";
}

std::vector<double> NaiveOlsDetector::scores(const CountMatrix& counts,
                                             const CovariateTable& covariate) const {
  require_single_covariate(counts, covariate);
  const RowMatrix y = log_transform(counts.counts, pseudocount_).values;
  const Index m = y.rows();
  const Index n = y.cols();
  const Vector col_means = y.colwise().mean().transpose();
  const Vector x = covariate.values.col(0);
  const Vector xc = x.array() - x.mean();
  const double sxx = xc.squaredNorm();
  if (!(sxx > 0.0)) throw DataError("degenerate design: covariate is constant");

  std::vector<double> out(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    double sxy = 0.0;
    for (Index j = 0; j < n; ++j) sxy += xc[j] * (y(i, j) - col_means[j]);
    out[static_cast<std::size_t>(i)] = std::abs(sxy / sxx);
  }
  return out;
}

std::vector<double> ExternalDetector::scores(const CountMatrix& counts,
                                             const CovariateTable& covariate) const {
  require_single_covariate(counts, covariate);
  const auto dir = scratch_dir();
  const auto counts_path = dir / "counts.tsv";
  const auto cov_path = dir / "covariates.tsv";
  const auto score_path = dir / "scores.tsv";
  write_counts(counts_path, counts);
  write_covariates(cov_path, counts.sample_ids, covariate);

  const std::string cmd = command_ + " " + shell_quote(counts_path.string()) + " " +
                          shell_quote(cov_path.string()) + " " +
                          shell_quote(score_path.string());
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    std::filesystem::remove_all(dir);
    throw DataError("detector '" + name_ + "' exited with status " +
                    std::to_string(status));
  }

  std::ifstream in(score_path);
  if (!in) {
    std::filesystem::remove_all(dir);
    throw DataError("detector '" + name_ + "' wrote no scores");
  }
  std::unordered_map<std::string, double> table;
  std::string line;
  std::getline(in, line); // header
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    char* end = nullptr;
    const std::string value = line.substr(tab + 1);
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || !std::isfinite(v)) {
      std::filesystem::remove_all(dir);
      throw DataError("detector '" + name_ + "' wrote a non-numeric score");
    }
    table[line.substr(0, tab)] = v;
  }
  std::filesystem::remove_all(dir);

  std::vector<double> out;
  out.reserve(counts.gene_ids.size());
  for (const auto& id : counts.gene_ids) {
    const auto it = table.find(id);
    if (it == table.end())
      throw DataError("detector '" + name_ + "' gave no score for '" + id + "'");
    out.push_back(it->second);
  }
  return out;
}

DetectorList builtin_detectors(const SolverConfig& cfg) {
  DetectorList list;
  list.push_back(std::make_unique<SlrAdmmDetector>(cfg));
  list.push_back(std::make_unique<NaiveOlsDetector>());
  return list;
}

} // namespace jointnorm
