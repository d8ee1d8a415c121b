#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sharedas/linalg.hpp"
#include "sharedas/sampling.hpp"

namespace sharedas {

/// A vector-valued function f = (f_1, ..., f_C) on a box in R^d.
class VectorProblem {
 public:
  virtual ~VectorProblem() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index input_dim() const = 0;
  virtual Eigen::Index output_dim() const = 0;
  virtual const BoxDomain& box() const = 0;

  /// f at a box point. Throws DomainError where f is undefined.
  virtual Vector evaluate(const Vector& x) const = 0;

  /// Analytic C x d Jacobian in box coordinates, when the problem has one.
  virtual std::optional<Matrix> jacobian(const Vector& /*x*/) const { return std::nullopt; }
};

/// Adapter for evaluators given as callables (tests, small fixtures).
class FunctionProblem final : public VectorProblem {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  FunctionProblem(std::string name, Eigen::Index output_dim, BoxDomain box, Evaluator f);

  std::string name() const override { return name_; }
  Eigen::Index input_dim() const override { return box_.dim(); }
  Eigen::Index output_dim() const override { return output_dim_; }
  const BoxDomain& box() const override { return box_; }
  Vector evaluate(const Vector& x) const override;

 private:
  std::string name_;
  Eigen::Index output_dim_;
  BoxDomain box_;
  Evaluator f_;
};

/// The two objectives in their native coordinates b = (b1, b2, b3).
/// Throws DomainError when the square root in f_2 has a negative argument.
std::array<double, 2> eval_synthetic_core(double b1, double b2, double b3);

/// Rotated two-objective, three-input benchmark on [0, 1]^3:
///   f_k(x) = core_k(b(R_k x)),  b(y) = (15 y1 - 5, 15 y2, y3).
class SyntheticProblem final : public VectorProblem {
 public:
  struct Options {
    /// Identity rotations; a hook for composition tests.
    bool identity_rotations = false;
    /// When false, b3 = x3 is taken from the unrotated input.
    bool rotate_third_coordinate = true;
  };

  SyntheticProblem();
  explicit SyntheticProblem(Options options);

  /// The rotation matrices exactly as printed (two significant digits).
  static const Eigen::Matrix3d& rotation1();
  static const Eigen::Matrix3d& rotation2();

  std::string name() const override { return "synthetic"; }
  Eigen::Index input_dim() const override { return 3; }
  Eigen::Index output_dim() const override { return 2; }
  const BoxDomain& box() const override { return box_; }
  Vector evaluate(const Vector& x) const override;
  std::optional<Matrix> jacobian(const Vector& x) const override;

 private:
  Eigen::Vector3d native(const Eigen::Matrix3d& rotation, const Vector& x) const;

  Options options_;
  Eigen::Matrix3d r1_;
  Eigen::Matrix3d r2_;
  BoxDomain box_;
};

/// Externally evaluated problem: points, outputs and Jacobians on a sample.
struct DatasetProblem {
  Matrix points;                 // n x d
  Matrix outputs;                // n x C
  std::vector<Matrix> gradients; // C matrices, each n x d; row i is grad f_k(x_i)

  Eigen::Index size() const noexcept { return points.rows(); }
  Eigen::Index input_dim() const noexcept { return points.cols(); }
  Eigen::Index output_dim() const noexcept { return outputs.cols(); }
};

/// Reads the dataset CSV: header x_1..x_d, f_1..f_C, g_1_1..g_1_d, ...,
/// g_C_1..g_C_d. Throws ParseError naming the offending row and column.
DatasetProblem load_dataset_problem(const std::filesystem::path& path);
DatasetProblem parse_dataset_csv(const std::string& text);

/// Writes the same schema with round-trip precision.
void write_dataset_problem(const DatasetProblem& data, const std::filesystem::path& path);
std::string format_dataset_csv(const DatasetProblem& data);

/// Named evaluator problems the CLI knows about.
std::unique_ptr<VectorProblem> make_problem(const std::string& id);

}  // namespace sharedas
