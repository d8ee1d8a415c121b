// Independent reference computations used as test oracles. Nothing here
// calls into the library's numerical kernels.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat rotation1() {
  Mat r(3, 3);
  r << -0.71, 0.34, 0.62, 0.28, 0.94, -0.2, -0.65, 0.032, -0.76;
  return r;
}

inline Mat rotation2() {
  Mat r(3, 3);
  r << -0.32, 0.84, -0.44, 0.76, -0.058, -0.65, 0.57, 0.54, 0.62;
  return r;
}

// Both synthetic objectives written straight from the formulas, templated so
// that complex-step differentiation can be applied.
template <typename T>
T branin_f1(T b1, T b2, T b3) {
  using std::cos;
  using std::sin;
  const double pi = std::numbers::pi;
  const T inner = b2 - 5.1 * (b1 / (2.0 * pi)) * (b1 / (2.0 * pi)) + (5.0 / pi) * b1 - 6.0;
  return inner * inner + 10.0 * ((1.0 - 1.0 / (8.0 * pi)) * cos(b1) + 1.0) + sin(pi * b3);
}

template <typename T>
T branin_f2(T b1, T b2, T b3) {
  using std::cos;
  using std::sqrt;
  const double pi = std::numbers::pi;
  const T quad = b2 - 5.1 / (4.0 * pi * pi) * b1 * b1 - 6.0;
  return -sqrt((10.5 - b1) * (b1 + 5.5) * (b2 + 0.5)) - quad * quad / 30.0 -
         ((1.0 - 1.0 / (8.0 * pi)) * cos(b1) + 1.0) / 3.0 - cos(2.0 * pi * b3);
}

template <typename T>
T synthetic_component(int k, const Mat& rot, const Eigen::Matrix<T, 3, 1>& x) {
  Eigen::Matrix<T, 3, 1> y;
  for (int i = 0; i < 3; ++i) y(i) = rot(i, 0) * x(0) + rot(i, 1) * x(1) + rot(i, 2) * x(2);
  const T b1 = 15.0 * y(0) - 5.0;
  const T b2 = 15.0 * y(1);
  const T b3 = y(2);
  return k == 0 ? branin_f1(b1, b2, b3) : branin_f2(b1, b2, b3);
}

inline Vec synthetic(const Vec& x) {
  const Eigen::Vector3d p = x;
  return Eigen::Vector2d(synthetic_component<double>(0, rotation1(), p),
                         synthetic_component<double>(1, rotation2(), p));
}

inline double synthetic_radicand(const Vec& x) {
  const Vec y = rotation2() * x;
  const double b1 = 15.0 * y(0) - 5.0;
  const double b2 = 15.0 * y(1);
  return (10.5 - b1) * (b1 + 5.5) * (b2 + 0.5);
}

// First-order distance from x to the zero set of the f_2 radicand, in box
// units. "Interior" points in the gradient checks keep this at least 0.01.
inline double synthetic_boundary_distance(const Vec& x) {
  const Vec y = rotation2() * x;
  const double b1 = 15.0 * y(0) - 5.0;
  const double b2 = 15.0 * y(1);
  const double q = (10.5 - b1) * (b1 + 5.5) * (b2 + 0.5);
  // dq/db1 and dq/db2, then the chain rule through b = 15 R_2 x.
  const double dq1 = (5.0 - 2.0 * b1) * (b2 + 0.5);
  const double dq2 = (10.5 - b1) * (b1 + 5.5);
  const Vec grad = 15.0 * (dq1 * rotation2().row(0) + dq2 * rotation2().row(1)).transpose();
  return q / grad.norm();
}

inline bool synthetic_interior(const Vec& x, double margin = 0.01) {
  return x.minCoeff() >= margin && x.maxCoeff() <= 1.0 - margin && synthetic_radicand(x) > 0.0 &&
         synthetic_boundary_distance(x) >= margin;
}

// Complex-step derivative: exact to rounding for analytic functions.
inline Mat synthetic_jacobian(const Vec& x) {
  using C = std::complex<double>;
  const double h = 1e-30;
  Mat jac(2, 3);
  for (int k = 0; k < 2; ++k) {
    const Mat& rot = k == 0 ? rotation1() : rotation2();
    for (int i = 0; i < 3; ++i) {
      Eigen::Matrix<C, 3, 1> z(C(x(0)), C(x(1)), C(x(2)));
      z(i) += C(0.0, h);
      jac(k, i) = synthetic_component<C>(k, rot, z).imag() / h;
    }
  }
  return jac;
}

inline Mat naive_mean_outer(const Mat& rows) {
  Mat m = Mat::Zero(rows.cols(), rows.cols());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index a = 0; a < rows.cols(); ++a) {
      for (Eigen::Index b = 0; b < rows.cols(); ++b) m(a, b) += rows(i, a) * rows(i, b);
    }
  }
  return m / static_cast<double>(rows.rows());
}

// Eigen's own solver; ascending, so reversed.
inline Mat eigvecs_desc(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvectors().rowwise().reverse();
}

inline Vec eigvals_desc(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvalues().reverse();
}

inline Mat projector(const Mat& w, Eigen::Index j) {
  const Mat lead = w.leftCols(j);
  return lead * lead.transpose();
}

inline double proj_distance(const Mat& a, const Mat& b, Eigen::Index j) {
  return (projector(a, j) - projector(b, j)).norm();
}

inline Mat random_orthogonal(Eigen::Index d, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Mat a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = nd(gen);
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ() * Mat::Identity(d, d);
}

inline Mat random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Mat a(r, c);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = nd(gen);
  return a;
}

inline Mat random_spd(Eigen::Index d, std::mt19937_64& gen) {
  const Mat a = random_matrix(d, d + 2, gen);
  return a * a.transpose() / static_cast<double>(d + 2);
}

// Min-norm hull point by a grid over the simplex followed by zoomed
// refinement around the incumbent. Valid for up to three rows.
inline Vec hull_grid(const Mat& j) {
  const Eigen::Index c = j.rows();
  auto norm_at = [&](double a, double b) {
    Vec alpha(c);
    if (c == 1) alpha << 1.0;
    if (c == 2) alpha << a, 1.0 - a;
    if (c == 3) alpha << a, b, 1.0 - a - b;
    return (j.transpose() * alpha).squaredNorm();
  };
  if (c == 1) return j.row(0).transpose();
  double best_a = 0.0;
  double best_b = 0.0;
  double best = norm_at(0.0, 0.0);
  double width = 1.0;
  double ca = 0.5;
  double cb = 0.5;
  const int steps = c == 2 ? 2000 : 200;
  for (int round = 0; round < 12; ++round) {
    for (int s = 0; s <= steps; ++s) {
      const double a = std::clamp(ca - width / 2 + width * s / steps, 0.0, 1.0);
      const int inner = c == 3 ? steps : 0;
      for (int t = 0; t <= inner; ++t) {
        const double b = c == 3 ? std::clamp(cb - width / 2 + width * t / steps, 0.0, 1.0) : 0.0;
        if (a + b > 1.0) continue;
        const double v = norm_at(a, b);
        if (v < best) {
          best = v;
          best_a = a;
          best_b = b;
        }
      }
    }
    ca = best_a;
    cb = best_b;
    width *= c == 2 ? 0.01 : 0.1;
  }
  Vec alpha(c);
  if (c == 2) alpha << best_a, 1.0 - best_a;
  if (c == 3) alpha << best_a, best_b, 1.0 - best_a - best_b;
  return j.transpose() * alpha;
}

// Product over k of (det diag(B_k) / det B_k)^{n_k} for B_k = W^T C_k W.
inline double fg_objective(const std::vector<Mat>& cs, const std::vector<double>& weights, const Mat& w) {
  double log_total = 0.0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const Mat b = w.transpose() * cs[k] * w;
    double log_diag = 0.0;
    for (Eigen::Index i = 0; i < b.rows(); ++i) log_diag += std::log(b(i, i));
    log_total += weights[k] * (log_diag - std::log(b.determinant()));
  }
  return log_total;
}

}  // namespace oracle
