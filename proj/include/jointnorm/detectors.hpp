#pragma once

#include "jointnorm/fit.hpp"
#include "jointnorm/io.hpp"
#include "jointnorm/units.hpp"

#include <memory>
#include <string>
#include <vector>

namespace jointnorm {

/// A DE detector maps counts plus a single covariate to one score per
/// gene; larger means more likely differentially expressed.
class Detector {
public:
  virtual ~Detector() = default;
  virtual std::string name() const = 0;
  /// Identifying description folded into benchmark fingerprints.
  virtual std::string describe() const = 0;
  virtual std::vector<double> scores(const CountMatrix& counts,
                                     const CovariateTable& covariate) const = 0;
};

/// Log expression, shrunken variances, single-covariate ADMM;
/// score |beta| on the standardized scale.
class SlrAdmmDetector final : public Detector {
public:
  explicit SlrAdmmDetector(SolverConfig cfg = {}, Unit unit = Unit::Raw,
                           double pseudocount = kDefaultPseudocount)
      : cfg_(cfg), unit_(unit), pseudocount_(pseudocount) {}
  std::string name() const override { return "slr-admm"; }
  std::string describe() const override;
  std::vector<double> scores(const CountMatrix& counts,
                             const CovariateTable& covariate) const override;

private:
  SolverConfig cfg_;
  Unit unit_;
  double pseudocount_;
};

/// Per-gene least-squares slope of column-mean-normalized log counts on the
/// covariate; score |slope|.
class NaiveOlsDetector final : public Detector {
public:
  explicit NaiveOlsDetector(double pseudocount = kDefaultPseudocount)
      : pseudocount_(pseudocount) {}
  std::string name() const override { return "naive-ols"; }
  std::string describe() const override;
  std::vector<double> scores(const CountMatrix& counts,
                             const CovariateTable& covariate) const override;

private:
  double pseudocount_;
};

/// Runs `<command> <counts.tsv> <covariates.tsv> <scores.tsv>` through the
/// shell. The command must write `gene_id<TAB>score` with a header line and
/// exit 0.
class ExternalDetector final : public Detector {
public:
  ExternalDetector(std::string name, std::string command)
      : name_(std::move(name)), command_(std::move(command)) {}
  std::string name() const override { return name_; }
  std::string describe() const override { return name_ + ":" + command_; }
  std::vector<double> scores(const CountMatrix& counts,
                             const CovariateTable& covariate) const override;

private:
  std::string name_;
  std::string command_;
};

using DetectorList = std::vector<std::unique_ptr<Detector>>;

/// slr-admm followed by naive-ols.
DetectorList builtin_detectors(const SolverConfig& cfg = {});

} // namespace jointnorm
