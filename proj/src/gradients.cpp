#include "sharedas/gradients.hpp"

#include <algorithm>
#include <string>

#include "sharedas/errors.hpp"
#include "sharedas/simd/kernels.hpp"

namespace sharedas {
namespace {

Matrix central_differences(const VectorMap& f, const Vector& x, double rel_step) {
  const Eigen::Index d = x.size();
  Matrix jac;
  Vector probe = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    probe(i) = x(i) + h;
    const Vector up = f(probe);
    probe(i) = x(i) - h;
    const Vector down = f(probe);
    probe(i) = x(i);
    if (i == 0) jac.resize(up.size(), d);
    // (x + h) - (x - h) is the step actually taken after rounding.
    const double span = (x(i) + h) - (x(i) - h);
    jac.col(i) = (up - down) / span;
  }
  return jac;
}

}  // namespace

Matrix jacobian_fd(const VectorMap& f, const Vector& x, double rel_step) {
  if (!(rel_step > 0.0)) throw ValidationError("jacobian_fd: rel_step must be positive");
  if (!x.allFinite()) throw ValidationError("jacobian_fd: non-finite point");
  try {
    return central_differences(f, x, rel_step);
  } catch (const DomainError&) {
  }
  try {
    return central_differences(f, x, rel_step / 10.0);
  } catch (const DomainError& e) {
    throw StencilError(std::string("jacobian_fd: stencil leaves the domain: ") + e.what());
  }
}

Matrix jacobian_fd(const VectorProblem& problem, const Vector& x, double rel_step) {
  return jacobian_fd([&](const Vector& p) { return problem.evaluate(p); }, x, rel_step);
}

VectorMap composed_map(const VectorProblem& problem, DistributionKind kind) {
  return [&problem, kind](const Vector& x) {
    return problem.evaluate(warp_to_box(x, kind, problem.box()));
  };
}

Matrix JacobianSet::jacobian_at(Eigen::Index i) const {
  Matrix j(objectives(), dim());
  for (Eigen::Index k = 0; k < objectives(); ++k) j.row(k) = gradients[static_cast<std::size_t>(k)].row(i);
  return j;
}

JacobianSet JacobianSet::from_jacobians(const std::vector<Matrix>& jacobians) {
  if (jacobians.empty()) throw ValidationError("JacobianSet: no samples");
  const Eigen::Index n = static_cast<Eigen::Index>(jacobians.size());
  const Eigen::Index c = jacobians.front().rows();
  const Eigen::Index d = jacobians.front().cols();
  JacobianSet js;
  js.gradients.assign(static_cast<std::size_t>(c), Matrix(n, d));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix& j = jacobians[static_cast<std::size_t>(i)];
    if (j.rows() != c || j.cols() != d) throw ValidationError("JacobianSet: inconsistent Jacobian shape");
    for (Eigen::Index k = 0; k < c; ++k) js.gradients[static_cast<std::size_t>(k)].row(i) = j.row(k);
  }
  js.validate();
  return js;
}

void JacobianSet::validate() const {
  if (gradients.empty()) throw ValidationError("JacobianSet: no objectives");
  for (std::size_t k = 0; k < gradients.size(); ++k) {
    const Matrix& g = gradients[k];
    if (g.rows() != size() || g.cols() != dim() || g.rows() == 0 || g.cols() == 0) {
      throw ValidationError("JacobianSet: objective " + std::to_string(k + 1) + " has inconsistent shape");
    }
    if (!g.allFinite()) {
      throw ValidationError("JacobianSet: objective " + std::to_string(k + 1) + " has non-finite gradients");
    }
  }
}

Matrix OutputStats::normalize(const Matrix& outputs) const {
  Matrix out = outputs;
  for (Eigen::Index k = 0; k < out.cols(); ++k) {
    out.col(k) = (out.col(k).array() - mean(k)) / std(k);
  }
  return out;
}

OutputStats compute_output_stats(const Matrix& outputs) {
  const Eigen::Index n = outputs.rows();
  const Eigen::Index c = outputs.cols();
  OutputStats stats;
  stats.mean = outputs.colwise().mean().transpose();
  stats.std = Vector::Zero(c);
  for (Eigen::Index k = 0; k < c; ++k) {
    double s = 0.0;
    if (n > 1) {
      const Vector centered = outputs.col(k).array() - stats.mean(k);
      s = std::sqrt(centered.squaredNorm() / static_cast<double>(n - 1));
    }
    if (!(s >= kStdFloor)) {
      stats.warnings.push_back({WarningKind::kNearConstantOutput,
                                "objective " + std::to_string(k + 1) + " has standard deviation " +
                                    std::to_string(s) + "; floored"});
      s = kStdFloor;
    }
    stats.std(k) = s;
  }
  return stats;
}

GradientPipeline build_jacobian_set(const VectorProblem& problem, const SampleSet& samples,
                                    bool normalize, double rel_step) {
  if (samples.dim() != problem.input_dim()) {
    throw ValidationError("build_jacobian_set: sample dimension does not match the problem");
  }
  const Eigen::Index n = samples.size();
  const Eigen::Index c = problem.output_dim();
  const Eigen::Index d = problem.input_dim();
  const VectorMap f = composed_map(problem, samples.distribution.kind());

  GradientPipeline out;
  out.outputs.resize(n, c);
  out.jacobians.gradients.assign(static_cast<std::size_t>(c), Matrix(n, d));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector x = samples.points.row(i).transpose();
    out.outputs.row(i) = f(x).transpose();
    Matrix jac;
    try {
      jac = jacobian_fd(f, x, rel_step);
    } catch (const StencilError& e) {
      throw StencilError(e.what(), static_cast<std::size_t>(i));
    }
    for (Eigen::Index k = 0; k < c; ++k) out.jacobians.gradients[static_cast<std::size_t>(k)].row(i) = jac.row(k);
  }
  out.stats = compute_output_stats(out.outputs);
  if (normalize) {
    for (Eigen::Index k = 0; k < c; ++k) out.jacobians.gradients[static_cast<std::size_t>(k)] /= out.stats.std(k);
  }
  return out;
}

FeasibleSample draw_feasible_samples(const VectorProblem& problem, const Distribution& dist,
                                     Eigen::Index n, std::uint64_t seed, double rel_step,
                                     std::size_t max_rejections) {
  if (n < 1) throw ValidationError("draw_feasible_samples: n must be at least 1");
  if (dist.dim() != problem.input_dim()) {
    throw ValidationError("draw_feasible_samples: distribution dimension does not match the problem");
  }
  const VectorMap f = composed_map(problem, dist.kind());
  Rng rng(seed);
  FeasibleSample out{SampleSet{Matrix(n, dist.dim()), dist, seed}, 0};
  for (Eigen::Index i = 0; i < n;) {
    const Vector x = dist.draw(rng);
    try {
      const Vector y = f(x);
      if (!y.allFinite()) throw DomainError("non-finite output");
      (void)jacobian_fd(f, x, rel_step);
      out.samples.points.row(i++) = x.transpose();
    } catch (const DomainError&) {
      ++out.rejected;
    } catch (const StencilError&) {
      ++out.rejected;
    }
    if (out.rejected > max_rejections) {
      throw DomainError("draw_feasible_samples: too many infeasible draws (" +
                        std::to_string(out.rejected) + ")");
    }
  }
  return out;
}

SymmetricMatrix SpdCollection::sum() const {
  if (matrices.empty()) throw ValidationError("SpdCollection: empty");
  SymmetricMatrix total = matrices.front();
  for (std::size_t k = 1; k < matrices.size(); ++k) total = total + matrices[k];
  return total;
}

SymmetricMatrix mean_outer_product(const Matrix& rows) {
  const Eigen::Index n = rows.rows();
  const Eigen::Index d = rows.cols();
  if (n < 1) throw ValidationError("mean_outer_product: no rows");
  const auto& kern = simd::active();
  Matrix m(d, d);
  const auto un = static_cast<std::size_t>(n);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      const double v = kern.dot(rows.col(a).data(), rows.col(b).data(), un) / static_cast<double>(n);
      m(a, b) = v;
      m(b, a) = v;
    }
  }
  return symmetrize(m);
}

SpdCollection assemble_spd(const JacobianSet& js) {
  js.validate();
  SpdCollection out;
  for (const Matrix& g : js.gradients) {
    out.matrices.push_back(mean_outer_product(g));
    out.weights.push_back(static_cast<double>(js.size()));
  }
  return out;
}

SymmetricMatrix assemble_h(const JacobianSet& js) {
  js.validate();
  const Eigen::Index d = js.dim();
  const auto n = static_cast<std::size_t>(js.size());
  const auto& kern = simd::active();
  Matrix h = Matrix::Zero(d, d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      double v = 0.0;
      for (const Matrix& g : js.gradients) {
        v += kern.dot(g.col(a).data(), g.col(b).data(), n) / static_cast<double>(n);
      }
      h(a, b) = v;
      h(b, a) = v;
    }
  }
  return symmetrize(h);
}

SymmetricMatrix lee_augment(const SymmetricMatrix& c, const Vector& mean_grad) {
  if (mean_grad.size() != c.dim()) throw ValidationError("lee_augment: dimension mismatch");
  return symmetrize(c.matrix() + mean_grad * mean_grad.transpose());
}

}  // namespace sharedas
