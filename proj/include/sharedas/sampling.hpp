#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "sharedas/linalg.hpp"
#include "sharedas/rng.hpp"

namespace sharedas {

enum class DistributionKind { kStandardNormal, kUniformSymmetric };

std::string_view to_string(DistributionKind kind);
DistributionKind distribution_from_string(std::string_view name);

/// Sampling distribution. The uniform kind is U([-1, 1]^d); the normal kind
/// is N(0, covariance) with covariance defaulting to the identity.
class Distribution {
 public:
  Distribution(DistributionKind kind, Eigen::Index dim);
  Distribution(DistributionKind kind, Eigen::Index dim, SymmetricMatrix covariance);

  static Distribution standard_normal(Eigen::Index dim) {
    return {DistributionKind::kStandardNormal, dim};
  }
  static Distribution uniform_symmetric(Eigen::Index dim) {
    return {DistributionKind::kUniformSymmetric, dim};
  }

  DistributionKind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return dim_; }
  bool has_covariance() const noexcept { return cov_factor_.has_value(); }
  /// Identity when no covariance was given.
  SymmetricMatrix covariance() const;

  /// One draw, consuming variates from rng.
  Vector draw(Rng& rng) const;

 private:
  DistributionKind kind_;
  Eigen::Index dim_;
  std::optional<SymmetricMatrix> covariance_;
  std::optional<Matrix> cov_factor_;  // lower Cholesky factor
};

/// Axis-aligned box [lower_i, upper_i].
class BoxDomain {
 public:
  BoxDomain(Vector lower, Vector upper);
  static BoxDomain unit(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return lower_.size(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  bool contains(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

struct SampleSet {
  Matrix points;  // n x d, sampling space
  Distribution distribution;
  std::uint64_t seed;

  Eigen::Index size() const noexcept { return points.rows(); }
  Eigen::Index dim() const noexcept { return points.cols(); }
};

/// n draws from dist; deterministic in (dist, n, seed).
SampleSet draw_samples(const Distribution& dist, Eigen::Index n, std::uint64_t seed);

/// Maps a sampling-space point into the box: a sigmoid for the normal kind,
/// clamp((x+1)/2, 0, 1) for the uniform kind, then the affine map onto
/// [lower, upper].
Vector warp_to_box(const Vector& x, DistributionKind kind, const BoxDomain& box);

/// Per-coordinate derivative of warp_to_box at x.
Vector warp_derivative(const Vector& x, DistributionKind kind, const BoxDomain& box);

}  // namespace sharedas
