#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sharedas/gradients.hpp"
#include "sharedas/linalg.hpp"
#include "sharedas/methods.hpp"
#include "sharedas/problems.hpp"
#include "sharedas/sampling.hpp"

namespace sharedas {

/// Outputs of the pipeline at a set of points. Rows whose evaluation hit a
/// DomainError are listed in `excluded` and hold NaN.
struct Evaluation {
  Matrix values;  // n x C
  std::vector<Eigen::Index> excluded;
};

/// f(warp(x_i)) for every sample row, normalized by `stats` when given.
Evaluation evaluate_outputs(const VectorProblem& problem, const Matrix& points, DistributionKind kind,
                            const OutputStats* stats);

/// f(warp(W_j W_j^T x_i)): projection in sampling space, then the pipeline.
Evaluation reconstruct_projection(const VectorProblem& problem, const Matrix& basis, Eigen::Index j,
                                  const Matrix& points, DistributionKind kind, const OutputStats* stats);

/// Same with an arbitrary (possibly oblique) projector P.
Evaluation reconstruct_with_projector(const VectorProblem& problem, const Matrix& projector,
                                      const Matrix& points, DistributionKind kind,
                                      const OutputStats* stats);

/// (1/N) sum_i f(P x + (I - P) x'_i) with one N-sample x'_1..x'_N drawn from
/// dist (seeded) and shared by every x. Undefined terms are dropped from the
/// average; a row is excluded only when all N terms are undefined.
Evaluation reconstruct_condexp(const VectorProblem& problem, const Matrix& projector,
                               const Matrix& points, const Distribution& dist, Eigen::Index n_mc,
                               std::uint64_t seed, const OutputStats* stats);

struct RmseResult {
  Vector per_objective;
  double sum = 0.0;
  std::size_t excluded = 0;
};

/// Per-objective root-mean-square deviation over rows not in `exclusions`.
/// Throws EmptyEvaluation when every row is excluded.
RmseResult rmse_sum(const Matrix& original, const Matrix& reconstructed,
                    const std::vector<Eigen::Index>& exclusions);

struct RmseAtRank {
  Eigen::Index j;
  RmseResult rmse;
};

struct RmseReport {
  Method method;
  std::size_t repetition = 0;
  Eigen::Index n = 0;
  std::vector<RmseAtRank> per_dimension;  // j = 1..d
};

/// CSV `method,repetition,j,objective,rmse,excluded_points`. One row per
/// objective plus an `objective=sum` row for each (method, repetition, j).
std::string rmse_csv_header();
std::string format_rmse_rows(const RmseReport& report);

struct SummaryPlotTable {
  Vector active_coordinate;  // W_1^T x_i
  Matrix original;           // n x C
  Matrix first;              // reconstruction at the first requested rank
  Matrix second;             // reconstruction at the next rank
  Eigen::Index first_rank = 1;
  Eigen::Index second_rank = 2;
};

/// Sufficient-summary-plot data for ranks (rank, rank + 1), the second
/// capped at d.
SummaryPlotTable summary_plot_data(const VectorProblem& problem, const Matrix& basis,
                                   const Matrix& points, DistributionKind kind,
                                   const OutputStats* stats, Eigen::Index rank = 1);

/// Header `as1,f_1..f_C,rec<r>_f_1..,rec<r+1>_f_1..`; excluded entries as nan.
std::string format_summary_plot_csv(const SummaryPlotTable& table);

/// Shortest round-trip decimal representation ("nan" for NaN).
std::string format_double(double v);

}  // namespace sharedas
