#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "sharedas/diagnostics.hpp"
#include "sharedas/linalg.hpp"
#include "sharedas/problems.hpp"
#include "sharedas/sampling.hpp"

namespace sharedas {

using VectorMap = std::function<Vector(const Vector&)>;

/// (machine epsilon)^(1/3)
inline double default_fd_step() { return std::cbrt(std::numeric_limits<double>::epsilon()); }

/// Central-difference Jacobian of f at x with per-coordinate step
/// rel_step * max(1, |x_i|). A DomainError anywhere in the stencil shrinks
/// the steps tenfold once; a second failure throws StencilError.
Matrix jacobian_fd(const VectorMap& f, const Vector& x, double rel_step = default_fd_step());

/// Same, for a problem in its own box coordinates.
Matrix jacobian_fd(const VectorProblem& problem, const Vector& x,
                   double rel_step = default_fd_step());

/// The map from sampling space to outputs: warp into the box, then evaluate.
VectorMap composed_map(const VectorProblem& problem, DistributionKind kind);

/// Per-objective gradients over a sample. gradients[k] is n x d and its row i
/// is the gradient of f_k at sample point i, taken in sampling space.
struct JacobianSet {
  std::vector<Matrix> gradients;

  Eigen::Index size() const noexcept { return gradients.empty() ? 0 : gradients.front().rows(); }
  Eigen::Index objectives() const noexcept { return static_cast<Eigen::Index>(gradients.size()); }
  Eigen::Index dim() const noexcept { return gradients.empty() ? 0 : gradients.front().cols(); }

  /// C x d Jacobian at sample i.
  Matrix jacobian_at(Eigen::Index i) const;

  /// Builds from per-sample C x d Jacobians.
  static JacobianSet from_jacobians(const std::vector<Matrix>& jacobians);
  void validate() const;
};

inline constexpr double kStdFloor = 1e-12;

struct OutputStats {
  Vector mean;
  Vector std;  // sample standard deviation (n - 1), floored at kStdFloor
  Warnings warnings;

  /// (y - mean) / std, row-wise on an n x C matrix.
  Matrix normalize(const Matrix& outputs) const;
};

OutputStats compute_output_stats(const Matrix& outputs);

struct GradientPipeline {
  JacobianSet jacobians;
  OutputStats stats;
  Matrix outputs;  // raw outputs, n x C
};

/// Evaluates outputs and Jacobians of the composed map on every sample
/// point. With normalize set, gradient rows of objective k are divided by
/// std_k of the raw outputs on this sample.
GradientPipeline build_jacobian_set(const VectorProblem& problem, const SampleSet& samples,
                                    bool normalize, double rel_step = default_fd_step());

/// Sample of n points at which both the evaluator and the FD stencil are
/// defined; infeasible draws are replaced by fresh draws from the same
/// stream and counted.
struct FeasibleSample {
  SampleSet samples;
  std::size_t rejected = 0;
};
FeasibleSample draw_feasible_samples(const VectorProblem& problem, const Distribution& dist,
                                     Eigen::Index n, std::uint64_t seed,
                                     double rel_step = default_fd_step(),
                                     std::size_t max_rejections = 1000000);

struct SpdCollection {
  std::vector<SymmetricMatrix> matrices;
  std::vector<double> weights;  // n_k

  Eigen::Index dim() const noexcept { return matrices.empty() ? 0 : matrices.front().dim(); }
  std::size_t size() const noexcept { return matrices.size(); }
  SymmetricMatrix sum() const;
};

/// rows^T rows / n for an n x d matrix of row vectors.
SymmetricMatrix mean_outer_product(const Matrix& rows);

/// C_k = (1/n) sum_i grad f_k(x_i)^T grad f_k(x_i), weights n_k = n.
SpdCollection assemble_spd(const JacobianSet& js);

/// H = (1/n) sum_i J(x_i)^T J(x_i).
SymmetricMatrix assemble_h(const JacobianSet& js);

/// c + z z^T, z the mean gradient row.
SymmetricMatrix lee_augment(const SymmetricMatrix& c, const Vector& mean_grad);

}  // namespace sharedas
