#pragma once

// Shared active subspace constructions.
//
// Gradient level (each Jacobian is reduced to one d-vector u(x_i), then the
// scalar active subspace of (1/n) sum u^T u is taken):
//   AG   average of the objectives' gradients
//   MCH  minimum-norm element of the convex hull of the gradients
//   LP   per-input projection of the objectives' derivatives on their
//        leading principal direction
// SPD level (works on the per-objective matrices C_k):
//   SSPD eigenvectors of sum_k C_k
//   FG   joint diagonalization of {C_k} by pairwise rotations
//   SEE  stepwise extraction of common eigenvectors
// Ridge approximation:
//   Zahm generalized eigenvectors of (H, Sigma^{-1})

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sharedas/diagnostics.hpp"
#include "sharedas/gradients.hpp"
#include "sharedas/linalg.hpp"

namespace sharedas {

enum class Method { kAg, kMch, kLp, kSspd, kFg, kSee, kZahm };

std::string_view to_string(Method m);
/// Throws ConfigError listing the valid tags.
Method method_from_string(std::string_view tag);
const std::vector<Method>& all_methods();

struct SharedBasis {
  Method method;
  Matrix basis;       // d x d, orthonormal columns by decreasing importance
  Vector importance;  // non-increasing
  std::optional<Matrix> per_objective_values;  // C x d, diag(W^T C_k W)
  Warnings warnings;
};

struct RidgeProjector {
  Matrix projector;  // P_r, d x d
  Eigen::Index rank = 0;
  Matrix vectors;    // d x r generalized eigenvectors, v_i^T Sigma^{-1} v_j = delta_ij
  Vector values;     // all d generalized eigenvalues, descending
};

struct HullPoint {
  Vector point;         // u
  Vector coefficients;  // alpha on the simplex
};

/// Scalar active subspace of a single PSD matrix.
SharedBasis scalar_active_subspace(const SymmetricMatrix& c, Method tag = Method::kSspd);

SharedBasis method_ag(const JacobianSet& js);

/// Minimum Euclidean norm point of the convex hull of the rows of j.
/// Exact face enumeration for up to kHullExactMaxRows rows; projected
/// gradient on the simplex beyond that.
inline constexpr Eigen::Index kHullExactMaxRows = 3;
HullPoint min_norm_hull_point(const Matrix& j);
HullPoint min_norm_hull_point_exact(const Matrix& j);
HullPoint min_norm_hull_point_iterative(const Matrix& j, double gap_tol = 1e-10,
                                        int max_iter = 200000);

SharedBasis method_mch(const JacobianSet& js);
SharedBasis method_lp(const JacobianSet& js);
SharedBasis method_sspd(const SpdCollection& spd);

struct FgOptions {
  double angle_tol = 1e-10;
  int max_sweeps = 100;
  int max_inner = 100;
};
SharedBasis method_fg(const SpdCollection& spd, const FgOptions& options = {});

/// prod_k (det diag(W^T C_k W) / det(W^T C_k W))^{n_k}; >= 1 by Hadamard's
/// inequality. Overflows to +inf for large n_k; see fg_log_deviation.
double fg_deviation(const SpdCollection& spd, const Matrix& w);
/// Natural log of fg_deviation.
double fg_log_deviation(const SpdCollection& spd, const Matrix& w);

struct SeeOptions {
  double tol = 1e-10;
  int max_iter = 500;
  /// Minimize the per-step objective instead of maximizing it. The result is
  /// still reported by descending importance.
  bool ascending = false;
};
SharedBasis method_see(const SpdCollection& spd, const SeeOptions& options = {});

RidgeProjector method_zahm(const SymmetricMatrix& h, const SymmetricMatrix& sigma, Eigen::Index r);

/// C_k + eps I with eps = 1e-10 trace(C_k) / d (falls back to the pooled
/// trace when C_k vanishes).
SpdCollection ridge_regularize(const SpdCollection& spd);

}  // namespace sharedas
