#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sharedas/evaluation.hpp"
#include "sharedas/methods.hpp"
#include "sharedas/problems.hpp"
#include "sharedas/sampling.hpp"

namespace sharedas {

inline constexpr const char* kLibraryVersion = "1.0.0";

enum class RmseUnits { kNormalized, kOriginal };
enum class ZahmReconstruction { kCondExp, kProjector };

struct ExperimentConfig {
  std::string problem;                      // evaluator id, or empty with a dataset
  std::optional<std::filesystem::path> dataset;
  DistributionKind distribution = DistributionKind::kUniformSymmetric;
  std::optional<std::filesystem::path> covariance_file;
  Eigen::Index n = 1000;
  std::size_t repetitions = 10;
  std::uint64_t seed = 0;
  bool normalize = true;
  RmseUnits rmse_units = RmseUnits::kNormalized;
  std::vector<Method> methods = all_methods();
  Eigen::Index zahm_n_mc = 20;
  ZahmReconstruction zahm_reconstruction = ZahmReconstruction::kCondExp;
  bool see_ascending = false;
  bool out_of_sample = false;
  double fd_rel_step = 0.0;  // 0 selects the default step
  std::filesystem::path output_dir = "out";
  std::size_t jobs = 1;
  bool reproducible = false;

  bool has_evaluator() const { return !dataset.has_value(); }
};

/// Parses the JSON document; unknown keys and invalid values throw
/// ConfigError. Relative dataset/covariance paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
/// JSON echo of a config, accepted back by parse_config.
std::string config_to_json(const ExperimentConfig& config);

/// Checks cross-field invariants (evaluator requirements, method lists).
void validate_config(const ExperimentConfig& config, bool needs_evaluator);

struct RepetitionFailure {
  std::size_t repetition;
  std::string message;
};

struct ExperimentResult {
  std::vector<RmseReport> reports;             // ordered by (repetition, method)
  std::vector<RepetitionFailure> failures;
  std::vector<std::vector<SharedBasis>> bases;  // per successful repetition
  std::size_t rejected_samples = 0;
  Warnings warnings;
  Eigen::Index dim = 0;
  Eigen::Index objectives = 0;

  std::string rmse_csv() const;
};

/// Runs every repetition for an evaluator problem. Throws ConfigError for
/// invalid configs and Error when no repetition succeeds.
ExperimentResult run_experiment(const ExperimentConfig& config, const VectorProblem& problem);

/// Resolves the problem from the config, runs, and writes rmse_report.csv,
/// basis_<method>_rep<r>.csv and manifest.json into config.output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// The problem named by config.problem.
std::unique_ptr<VectorProblem> resolve_problem(const ExperimentConfig& config);

/// Subspace for one method on repetition 0 (evaluator) or on the dataset.
SharedBasis compute_basis(const ExperimentConfig& config, Method method);

/// SharedBasis CSV: header `<method>,<d>,ordering=descending`, then the
/// d x d basis row by row.
std::string format_basis_csv(const SharedBasis& basis);
SharedBasis parse_basis_csv(const std::string& text);

/// Summary-plot table for one method on repetition 0.
SummaryPlotTable run_summary_plot(const ExperimentConfig& config, Method method, Eigen::Index rank,
                                  const VectorProblem* problem = nullptr);

struct NormalizationRow {
  Method method;
  Eigen::Index j;
  double normalized_mean_sum;
  double original_mean_sum;
};

struct NormalizationComparison {
  std::vector<NormalizationRow> rows;
  std::size_t repetitions = 0;
  Warnings warnings;

  /// `method,j,normalized,original,repetitions,single_repetition`
  std::string csv() const;
};

/// Runs the experiment with gradients from normalized and from original
/// outputs; RMSEs are reported in the units chosen by config.rmse_units.
NormalizationComparison compare_normalization(const ExperimentConfig& config,
                                              const VectorProblem* problem = nullptr);

/// Mean over successful repetitions of the RMSE sum per (method, j).
double mean_rmse_sum(const ExperimentResult& result, Method method, Eigen::Index j);
/// Mean per-objective RMSE.
Vector mean_rmse(const ExperimentResult& result, Method method, Eigen::Index j);

}  // namespace sharedas
