#include "sharedas/problems.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sharedas/errors.hpp"

namespace sharedas {

FunctionProblem::FunctionProblem(std::string name, Eigen::Index output_dim, BoxDomain box,
                                 Evaluator f)
    : name_(std::move(name)), output_dim_(output_dim), box_(std::move(box)), f_(std::move(f)) {
  if (output_dim_ < 1) throw ValidationError("FunctionProblem: output dimension must be positive");
}

Vector FunctionProblem::evaluate(const Vector& x) const {
  Vector y = f_(x);
  if (y.size() != output_dim_) throw ValidationError("FunctionProblem: evaluator output size");
  return y;
}

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCosWeight = 1.0 - 1.0 / (8.0 * kPi);
constexpr double kQuadCoef = 5.1 / (4.0 * kPi * kPi);

double sqrt_argument(double b1, double b2) { return (10.5 - b1) * (b1 + 5.5) * (b2 + 0.5); }

Eigen::RowVector3d f1_gradient(double b1, double b2, double b3) {
  const double a = b2 - kQuadCoef * b1 * b1 + 5.0 / kPi * b1 - 6.0;
  return {2.0 * a * (-2.0 * kQuadCoef * b1 + 5.0 / kPi) - 10.0 * kCosWeight * std::sin(b1),
          2.0 * a, kPi * std::cos(kPi * b3)};
}

Eigen::RowVector3d f2_gradient(double b1, double b2, double b3) {
  const double q = sqrt_argument(b1, b2);
  if (!(q > 0.0)) throw DomainError("synthetic f_2: gradient undefined where the radicand is <= 0");
  const double bq = b2 - kQuadCoef * b1 * b1 - 6.0;
  const double root = std::sqrt(q);
  return {-(5.0 - 2.0 * b1) * (b2 + 0.5) / (2.0 * root) +
              (2.0 / 30.0) * bq * 2.0 * kQuadCoef * b1 + kCosWeight / 3.0 * std::sin(b1),
          -(10.5 - b1) * (b1 + 5.5) / (2.0 * root) - (2.0 / 30.0) * bq,
          2.0 * kPi * std::sin(2.0 * kPi * b3)};
}

}  // namespace

namespace {

double synthetic_f1(double b1, double b2, double b3) {
  const double a = b2 - kQuadCoef * b1 * b1 + 5.0 / kPi * b1 - 6.0;
  return a * a + 10.0 * (kCosWeight * std::cos(b1) + 1.0) + std::sin(kPi * b3);
}

double synthetic_f2(double b1, double b2, double b3) {
  const double q = sqrt_argument(b1, b2);
  if (q < 0.0 || !std::isfinite(q)) {
    throw DomainError("synthetic f_2: negative radicand " + std::to_string(q));
  }
  const double bq = b2 - kQuadCoef * b1 * b1 - 6.0;
  return -std::sqrt(q) - bq * bq / 30.0 - (kCosWeight * std::cos(b1) + 1.0) / 3.0 -
         std::cos(2.0 * kPi * b3);
}

}  // namespace

std::array<double, 2> eval_synthetic_core(double b1, double b2, double b3) {
  return {synthetic_f1(b1, b2, b3), synthetic_f2(b1, b2, b3)};
}

const Eigen::Matrix3d& SyntheticProblem::rotation1() {
  static const Eigen::Matrix3d r = [] {
    Eigen::Matrix3d m;
    m << -0.71, 0.34, 0.62,
          0.28, 0.94, -0.2,
         -0.65, 0.032, -0.76;
    return m;
  }();
  return r;
}

const Eigen::Matrix3d& SyntheticProblem::rotation2() {
  static const Eigen::Matrix3d r = [] {
    Eigen::Matrix3d m;
    m << -0.32, 0.84, -0.44,
          0.76, -0.058, -0.65,
          0.57, 0.54, 0.62;
    return m;
  }();
  return r;
}

SyntheticProblem::SyntheticProblem() : SyntheticProblem(Options{}) {}

SyntheticProblem::SyntheticProblem(Options options)
    : options_(options),
      r1_(options.identity_rotations ? Eigen::Matrix3d::Identity() : rotation1()),
      r2_(options.identity_rotations ? Eigen::Matrix3d::Identity() : rotation2()),
      box_(BoxDomain::unit(3)) {}

Eigen::Vector3d SyntheticProblem::native(const Eigen::Matrix3d& rotation, const Vector& x) const {
  const Eigen::Vector3d y = rotation * Eigen::Vector3d(x(0), x(1), x(2));
  const double third = options_.rotate_third_coordinate ? y(2) : x(2);
  return {15.0 * y(0) - 5.0, 15.0 * y(1), third};
}

Vector SyntheticProblem::evaluate(const Vector& x) const {
  if (x.size() != 3) throw ValidationError("SyntheticProblem: input must have 3 coordinates");
  const Eigen::Vector3d b1 = native(r1_, x);
  const Eigen::Vector3d b2 = native(r2_, x);
  // Each objective sees its own rotation; only f_2 has a restricted domain.
  const double f1 = synthetic_f1(b1(0), b1(1), b1(2));
  const double f2 = synthetic_f2(b2(0), b2(1), b2(2));
  Vector out(2);
  out << f1, f2;
  return out;
}

std::optional<Matrix> SyntheticProblem::jacobian(const Vector& x) const {
  if (x.size() != 3) throw ValidationError("SyntheticProblem: input must have 3 coordinates");
  auto chain = [&](const Eigen::Matrix3d& rotation) {
    Eigen::Matrix3d db_dx;
    db_dx.row(0) = 15.0 * rotation.row(0);
    db_dx.row(1) = 15.0 * rotation.row(1);
    if (options_.rotate_third_coordinate) {
      db_dx.row(2) = rotation.row(2);
    } else {
      db_dx.row(2) = Eigen::RowVector3d::UnitZ();
    }
    return db_dx;
  };
  const Eigen::Vector3d b1 = native(r1_, x);
  const Eigen::Vector3d b2 = native(r2_, x);
  Matrix j(2, 3);
  j.row(0) = f1_gradient(b1(0), b1(1), b1(2)) * chain(r1_);
  j.row(1) = f2_gradient(b2(0), b2(1), b2(2)) * chain(r2_);
  return j;
}

}  // namespace sharedas

namespace sharedas {

std::unique_ptr<VectorProblem> make_problem(const std::string& id) {
  if (id == "synthetic") return std::make_unique<SyntheticProblem>();
  if (id == "synthetic-unrotated-b3") {
    SyntheticProblem::Options opts;
    opts.rotate_third_coordinate = false;
    return std::make_unique<SyntheticProblem>(opts);
  }
  throw ConfigError("unknown problem '" + id + "' (known: synthetic, synthetic-unrotated-b3)");
}

}  // namespace sharedas
