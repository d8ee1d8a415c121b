#include "sharedas/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sharedas/errors.hpp"

namespace sharedas {

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::kStandardNormal: return "normal";
    case DistributionKind::kUniformSymmetric: return "uniform";
  }
  return "unknown";
}

DistributionKind distribution_from_string(std::string_view name) {
  if (name == "normal" || name == "standard-normal") return DistributionKind::kStandardNormal;
  if (name == "uniform" || name == "uniform-symmetric") return DistributionKind::kUniformSymmetric;
  throw ValidationError("unknown distribution '" + std::string(name) +
                        "' (expected 'normal' or 'uniform')");
}

Distribution::Distribution(DistributionKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {
  if (dim < 1) throw ValidationError("Distribution: dimension must be positive");
}

Distribution::Distribution(DistributionKind kind, Eigen::Index dim, SymmetricMatrix covariance)
    : Distribution(kind, dim) {
  if (kind != DistributionKind::kStandardNormal) {
    throw ValidationError("Distribution: covariance is only supported for the normal kind");
  }
  if (covariance.dim() != dim) throw ValidationError("Distribution: covariance dimension mismatch");
  Eigen::LLT<Matrix> llt(covariance.matrix());
  if (llt.info() != Eigen::Success) {
    throw SingularCovariance("Distribution: covariance is not positive definite");
  }
  cov_factor_ = llt.matrixL().toDenseMatrix();
  covariance_ = std::move(covariance);
}

SymmetricMatrix Distribution::covariance() const {
  return covariance_ ? *covariance_ : SymmetricMatrix::identity(dim_);
}

Vector Distribution::draw(Rng& rng) const {
  Vector x(dim_);
  if (kind_ == DistributionKind::kUniformSymmetric) {
    for (Eigen::Index i = 0; i < dim_; ++i) x(i) = rng.uniform(-1.0, 1.0);
    return x;
  }
  for (Eigen::Index i = 0; i < dim_; ++i) x(i) = rng.normal();
  if (cov_factor_) x = (*cov_factor_) * x;
  return x;
}

BoxDomain::BoxDomain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size() || lower_.size() == 0) {
    throw ValidationError("BoxDomain: bound dimensions disagree");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_(i) < upper_(i))) {
      throw ValidationError("BoxDomain: lower bound not below upper bound at coordinate " +
                            std::to_string(i));
    }
  }
}

BoxDomain BoxDomain::unit(Eigen::Index dim) {
  return BoxDomain(Vector::Zero(dim), Vector::Ones(dim));
}

bool BoxDomain::contains(const Vector& x) const {
  return x.size() == dim() && (x.array() >= lower_.array()).all() &&
         (x.array() <= upper_.array()).all();
}

SampleSet draw_samples(const Distribution& dist, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("draw_samples: n must be at least 1");
  Rng rng(seed);
  Matrix points(n, dist.dim());
  for (Eigen::Index i = 0; i < n; ++i) points.row(i) = dist.draw(rng).transpose();
  return SampleSet{std::move(points), dist, seed};
}

namespace {

double unit_coordinate(double x, DistributionKind kind) {
  if (kind == DistributionKind::kStandardNormal) return 1.0 / (1.0 + std::exp(-x));
  return std::clamp((x + 1.0) / 2.0, 0.0, 1.0);
}

}  // namespace

Vector warp_to_box(const Vector& x, DistributionKind kind, const BoxDomain& box) {
  if (x.size() != box.dim()) throw ValidationError("warp_to_box: dimension mismatch");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = unit_coordinate(x(i), kind);
    const double width = box.upper()(i) - box.lower()(i);
    out(i) = std::clamp(t * width + box.lower()(i), box.lower()(i), box.upper()(i));
  }
  return out;
}

Vector warp_derivative(const Vector& x, DistributionKind kind, const BoxDomain& box) {
  if (x.size() != box.dim()) throw ValidationError("warp_derivative: dimension mismatch");
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double width = box.upper()(i) - box.lower()(i);
    if (kind == DistributionKind::kStandardNormal) {
      const double s = 1.0 / (1.0 + std::exp(-x(i)));
      out(i) = width * s * (1.0 - s);
    } else {
      out(i) = (x(i) > -1.0 && x(i) < 1.0) ? 0.5 * width : 0.0;
    }
  }
  return out;
}

}  // namespace sharedas
