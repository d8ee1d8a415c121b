#include "sharedas/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "sharedas/errors.hpp"
#include "sharedas/rng.hpp"
#include "sharedas/simd/kernels.hpp"

namespace sharedas {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void apply_stats(Vector& y, const OutputStats* stats) {
  if (!stats) return;
  y = (y - stats->mean).cwiseQuotient(stats->std);
}

template <typename PointFn>
Evaluation evaluate_rows(const VectorProblem& problem, Eigen::Index n, PointFn&& point_value,
                         const OutputStats* stats) {
  Evaluation out{Matrix(n, problem.output_dim()), {}};
  for (Eigen::Index i = 0; i < n; ++i) {
    try {
      Vector y = point_value(i);
      if (!y.allFinite()) throw DomainError("non-finite output");
      apply_stats(y, stats);
      out.values.row(i) = y.transpose();
    } catch (const DomainError&) {
      out.values.row(i).setConstant(kNaN);
      out.excluded.push_back(i);
    }
  }
  return out;
}

void check_points(const VectorProblem& problem, const Matrix& points) {
  if (points.cols() != problem.input_dim()) {
    throw ValidationError("evaluation: point dimension does not match the problem");
  }
}

}  // namespace

Evaluation evaluate_outputs(const VectorProblem& problem, const Matrix& points, DistributionKind kind,
                            const OutputStats* stats) {
  check_points(problem, points);
  return evaluate_rows(
      problem, points.rows(),
      [&](Eigen::Index i) {
        return problem.evaluate(warp_to_box(points.row(i).transpose(), kind, problem.box()));
      },
      stats);
}

Evaluation reconstruct_with_projector(const VectorProblem& problem, const Matrix& projector,
                                      const Matrix& points, DistributionKind kind,
                                      const OutputStats* stats) {
  check_points(problem, points);
  if (projector.rows() != points.cols() || projector.cols() != points.cols()) {
    throw ValidationError("reconstruct: projector must be d x d");
  }
  const Matrix projected = points * projector.transpose();
  return evaluate_outputs(problem, projected, kind, stats);
}

Evaluation reconstruct_projection(const VectorProblem& problem, const Matrix& basis, Eigen::Index j,
                                  const Matrix& points, DistributionKind kind, const OutputStats* stats) {
  if (basis.rows() != problem.input_dim() || j < 1 || j > basis.cols()) {
    throw ValidationError("reconstruct_projection: rank " + std::to_string(j) + " out of range");
  }
  return reconstruct_with_projector(problem, leading_projector(basis, j), points, kind, stats);
}

Evaluation reconstruct_condexp(const VectorProblem& problem, const Matrix& projector,
                               const Matrix& points, const Distribution& dist, Eigen::Index n_mc,
                               std::uint64_t seed, const OutputStats* stats) {
  check_points(problem, points);
  if (n_mc < 1) throw ValidationError("reconstruct_condexp: n_mc must be at least 1");
  const Eigen::Index d = problem.input_dim();
  if (projector.rows() != d || projector.cols() != d) {
    throw ValidationError("reconstruct_condexp: projector must be d x d");
  }
  const Matrix shifts = draw_samples(dist, n_mc, seed).points;  // N x d
  const Matrix complement = Matrix::Identity(d, d) - projector;
  const Matrix shift_terms = shifts * complement.transpose();    // rows (I - P) x'_i
  const Matrix projected = points * projector.transpose();
  return evaluate_rows(
      problem, points.rows(),
      [&](Eigen::Index i) {
        // Infeasible terms are dropped from the average; the row is only
        // excluded when no term can be evaluated.
        Vector acc = Vector::Zero(problem.output_dim());
        Eigen::Index used = 0;
        for (Eigen::Index s = 0; s < n_mc; ++s) {
          const Vector z = projected.row(i).transpose() + shift_terms.row(s).transpose();
          try {
            acc += problem.evaluate(warp_to_box(z, dist.kind(), problem.box()));
            ++used;
          } catch (const DomainError&) {
          }
        }
        if (used == 0) throw DomainError("reconstruct_condexp: no feasible term in the average");
        return Vector(acc / static_cast<double>(used));
      },
      stats);
}

RmseResult rmse_sum(const Matrix& original, const Matrix& reconstructed,
                    const std::vector<Eigen::Index>& exclusions) {
  if (original.rows() != reconstructed.rows() || original.cols() != reconstructed.cols()) {
    throw ValidationError("rmse_sum: shape mismatch");
  }
  const Eigen::Index n = original.rows();
  std::vector<char> skip(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i : exclusions) {
    if (i < 0 || i >= n) throw ValidationError("rmse_sum: exclusion index out of range");
    skip[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!skip[static_cast<std::size_t>(i)]) kept.push_back(i);
  }
  if (kept.empty()) throw EmptyEvaluation("rmse_sum: every row is excluded");

  const auto& kern = simd::active();
  const auto m = static_cast<Eigen::Index>(kept.size());
  RmseResult out;
  out.excluded = static_cast<std::size_t>(n - m);
  out.per_objective.resize(original.cols());
  Vector a(m);
  Vector b(m);
  for (Eigen::Index k = 0; k < original.cols(); ++k) {
    for (Eigen::Index r = 0; r < m; ++r) {
      a(r) = original(kept[static_cast<std::size_t>(r)], k);
      b(r) = reconstructed(kept[static_cast<std::size_t>(r)], k);
    }
    const double ss = kern.sum_sq_diff(a.data(), b.data(), static_cast<std::size_t>(m));
    out.per_objective(k) = std::sqrt(ss / static_cast<double>(m));
  }
  out.sum = out.per_objective.sum();
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string rmse_csv_header() { return "method,repetition,j,objective,rmse,excluded_points\n"; }

std::string format_rmse_rows(const RmseReport& report) {
  std::string out;
  const std::string prefix = std::string(to_string(report.method)) + "," + std::to_string(report.repetition) + ",";
  for (const auto& row : report.per_dimension) {
    const std::string head = prefix + std::to_string(row.j) + ",";
    const std::string tail = "," + std::to_string(row.rmse.excluded) + "\n";
    for (Eigen::Index k = 0; k < row.rmse.per_objective.size(); ++k) {
      out += head + std::to_string(k + 1) + "," + format_double(row.rmse.per_objective(k)) + tail;
    }
    out += head + "sum," + format_double(row.rmse.sum) + tail;
  }
  return out;
}

SummaryPlotTable summary_plot_data(const VectorProblem& problem, const Matrix& basis,
                                   const Matrix& points, DistributionKind kind,
                                   const OutputStats* stats, Eigen::Index rank) {
  const Eigen::Index d = problem.input_dim();
  if (d < 2) throw ValidationError("summary_plot_data: needs at least two inputs");
  if (rank < 1 || rank > d) throw ValidationError("summary_plot_data: rank out of range");
  SummaryPlotTable t;
  t.first_rank = rank;
  t.second_rank = std::min<Eigen::Index>(rank + 1, d);
  t.active_coordinate = points * basis.col(0);
  t.original = evaluate_outputs(problem, points, kind, stats).values;
  t.first = reconstruct_projection(problem, basis, t.first_rank, points, kind, stats).values;
  t.second = reconstruct_projection(problem, basis, t.second_rank, points, kind, stats).values;
  return t;
}

std::string format_summary_plot_csv(const SummaryPlotTable& t) {
  const Eigen::Index c = t.original.cols();
  std::string out = "as1";
  for (Eigen::Index k = 1; k <= c; ++k) out += ",f_" + std::to_string(k);
  for (Eigen::Index k = 1; k <= c; ++k) out += ",rec" + std::to_string(t.first_rank) + "_f_" + std::to_string(k);
  for (Eigen::Index k = 1; k <= c; ++k) out += ",rec" + std::to_string(t.second_rank) + "_f_" + std::to_string(k);
  out += '\n';
  for (Eigen::Index i = 0; i < t.original.rows(); ++i) {
    out += format_double(t.active_coordinate(i));
    for (Eigen::Index k = 0; k < c; ++k) out += "," + format_double(t.original(i, k));
    for (Eigen::Index k = 0; k < c; ++k) out += "," + format_double(t.first(i, k));
    for (Eigen::Index k = 0; k < c; ++k) out += "," + format_double(t.second(i, k));
    out += '\n';
  }
  return out;
}

}  // namespace sharedas
