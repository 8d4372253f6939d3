#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sensikit/models.hpp"

namespace sensikit {

/// A model named the way the command line and config files name it.
struct ModelDescriptor {
  std::string kind = "gfunction";  // gfunction | linear | custom
  std::vector<double> a;           // gfunction coefficients
  double alpha = 1.0;              // linear
  std::size_t p = 0;               // linear dimension; gfunction default length
  std::string custom_name;

  Model build() const;
  /// Same family at dimension p. g-function coefficients beyond the given
  /// ones follow a_i = i.
  ModelDescriptor with_dimension(std::size_t p) const;
  std::string label() const;
};

enum class Study { convergence, mse, dimension, variance_compare };

std::string to_string(Study s);
Study study_from_string(const std::string& s);

struct ExperimentConfig {
  Study study = Study::mse;
  ModelDescriptor model;
  /// convergence: Pick-Freeze sample sizes N (rank uses (p + 1) N).
  std::vector<std::size_t> sizes;
  std::size_t replications = 1;
  /// mse, dimension: total number of model calls per replication.
  std::optional<std::size_t> budget;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = ".";
  /// dimension: the p grid. variance_compare: the p values.
  std::vector<std::size_t> dimensions;
  /// variance_compare: the alpha grid.
  std::vector<double> alphas;

  void validate() const;
};

inline constexpr const char* kMethodRank = "rank";
inline constexpr const char* kMethodPickFreeze = "pick-freeze";

struct ConvergenceRow {
  std::string method;
  std::size_t index = 0;  // 1-based
  std::size_t size = 0;   // N for Pick-Freeze, n = (p + 1) N for rank
  double estimate = 0.0;
  double exact = 0.0;
  double abs_error = 0.0;
};

struct ConvergenceReport {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t p = 0;
  std::vector<ConvergenceRow> rows;
  std::size_t evaluations = 0;

  /// Largest |estimate - exact| over indices for one method and size.
  double max_error(const std::string& method, std::size_t size) const;
};

/// Median, quartiles and 1.5 IQR whiskers; points beyond are outliers.
struct BoxStats {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double whisker_lo = 0.0;
  double whisker_hi = 0.0;
  std::vector<double> outliers;
};

BoxStats box_stats(std::vector<double> values);

struct MseRow {
  std::string method;
  std::size_t index = 0;  // 1-based
  std::size_t budget = 0;
  std::size_t replications = 0;
  double mean = 0.0;
  double median = 0.0;
  double stdev = 0.0;
  BoxStats box;
};

struct MseReport {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t p = 0;
  std::size_t budget = 0;
  std::size_t rank_n = 0;
  std::size_t pickfreeze_n = 0;
  std::vector<MseRow> rows;
  std::size_t rank_evaluations = 0;
  std::size_t pickfreeze_evaluations = 0;
  std::vector<std::string> warnings;

  const MseRow& row(const std::string& method, std::size_t index) const;
};

struct VarianceRow {
  double alpha = 0.0;
  std::size_t p = 0;
  std::size_t index = 0;  // 1 or 2
  double v_pf = 0.0;
  double v_rank = 0.0;
  double v_eff = 0.0;

  double pf_minus_rank() const { return v_pf - v_rank; }
  double rank_minus_eff() const { return v_rank - v_eff; }
};

struct VarianceReport {
  std::uint64_t seed = 0;
  std::vector<VarianceRow> rows;
};

ConvergenceReport run_convergence(const ExperimentConfig& config);
MseReport run_mse(const ExperimentConfig& config);
/// One report per p in the grid; p values with N = budget / (p + 1) < 2 are
/// skipped and listed in `skipped`.
std::vector<MseReport> run_dimension(const ExperimentConfig& config,
                                     std::vector<std::string>* skipped = nullptr);
VarianceReport run_variance_compare(const ExperimentConfig& config);

}  // namespace sensikit
