#include "sharedas/methods.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "sharedas/errors.hpp"

namespace sharedas {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::kAg: return "ag";
    case Method::kMch: return "mch";
    case Method::kLp: return "lp";
    case Method::kSspd: return "sspd";
    case Method::kFg: return "fg";
    case Method::kSee: return "see";
    case Method::kZahm: return "zahm";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::kAg,  Method::kMch, Method::kLp,  Method::kSspd,
                                           Method::kFg,  Method::kSee, Method::kZahm};
  return methods;
}

Method method_from_string(std::string_view tag) {
  for (Method m : all_methods()) {
    if (to_string(m) == tag) return m;
  }
  std::string valid;
  for (Method m : all_methods()) {
    if (!valid.empty()) valid += ", ";
    valid += to_string(m);
  }
  throw ConfigError("unknown method '" + std::string(tag) + "' (valid: " + valid + ")");
}

namespace {

void add_spectrum_warnings(const Vector& values, Warnings& warnings) {
  const double top = values.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) {
    warnings.push_back({WarningKind::kDegenerateSpectrum, "matrix is zero; basis is arbitrary"});
    return;
  }
  for (Eigen::Index i = 0; i + 1 < values.size(); ++i) {
    if (values(i) - values(i + 1) <= 1e-12 * top) {
      warnings.push_back({WarningKind::kDegenerateSpectrum,
                          "repeated eigenvalue at positions " + std::to_string(i + 1) + " and " +
                              std::to_string(i + 2) + "; only the spanned projector is defined"});
    }
  }
}

SharedBasis basis_from_rows(const Matrix& u, Method tag) {
  SharedBasis out = scalar_active_subspace(mean_outer_product(u), tag);
  return out;
}

// Stable reorder of columns (and matching importance / per-objective
// columns) by descending importance.
void order_by_importance(SharedBasis& b) {
  const Eigen::Index d = b.importance.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return b.importance(x) > b.importance(y);
  });
  Matrix w(b.basis.rows(), d);
  Vector imp(d);
  std::optional<Matrix> per;
  if (b.per_objective_values) per = Matrix(b.per_objective_values->rows(), d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    w.col(k) = b.basis.col(src);
    imp(k) = b.importance(src);
    if (per) per->col(k) = b.per_objective_values->col(src);
  }
  b.basis = std::move(w);
  b.importance = std::move(imp);
  b.per_objective_values = std::move(per);
}

Matrix per_objective_diagonals(const SpdCollection& spd, const Matrix& w) {
  Matrix out(static_cast<Eigen::Index>(spd.size()), w.cols());
  for (std::size_t k = 0; k < spd.size(); ++k) {
    const Matrix& c = spd.matrices[k].matrix();
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      out(static_cast<Eigen::Index>(k), j) = w.col(j).dot(c * w.col(j));
    }
  }
  return out;
}

void validate_collection(const SpdCollection& spd, const char* who) {
  if (spd.matrices.empty()) throw ValidationError(std::string(who) + ": empty SPD collection");
  if (spd.weights.size() != spd.matrices.size()) {
    throw ValidationError(std::string(who) + ": weights and matrices disagree in count");
  }
  for (const auto& m : spd.matrices) {
    if (m.dim() != spd.dim()) throw ValidationError(std::string(who) + ": dimension mismatch");
  }
  for (double w : spd.weights) {
    if (!(w > 0.0)) throw ValidationError(std::string(who) + ": weights must be positive");
  }
}

std::vector<double> relative_weights(const SpdCollection& spd) {
  const double top = *std::max_element(spd.weights.begin(), spd.weights.end());
  std::vector<double> w;
  for (double x : spd.weights) w.push_back(x / top);
  return w;
}

// Angle in (-pi/4, pi/4] equivalent to `angle` modulo pi/2.
double reduce_quarter_turn(double angle) {
  constexpr double half_pi = std::numbers::pi / 2.0;
  double r = std::remainder(angle, half_pi);
  if (r <= -half_pi / 2.0) r += half_pi;
  return r;
}

}  // namespace

SharedBasis scalar_active_subspace(const SymmetricMatrix& c, Method tag) {
  EigenPair eig = sym_eig(c);
  SharedBasis out{tag, std::move(eig.vectors), std::move(eig.values), std::nullopt, {}};
  add_spectrum_warnings(out.importance, out.warnings);
  return out;
}

SharedBasis method_ag(const JacobianSet& js) {
  js.validate();
  Matrix u = Matrix::Zero(js.size(), js.dim());
  for (const Matrix& g : js.gradients) u += g;
  u /= static_cast<double>(js.objectives());
  return basis_from_rows(u, Method::kAg);
}

HullPoint min_norm_hull_point_exact(const Matrix& j) {
  const Eigen::Index c = j.rows();
  if (c < 1 || c > 20) throw ValidationError("min_norm_hull_point_exact: unsupported row count");
  if (!j.allFinite()) throw ValidationError("min_norm_hull_point: non-finite gradient");
  const Matrix gram = j * j.transpose();
  const double scale = std::max(1.0, gram.diagonal().maxCoeff());

  HullPoint best;
  double best_norm = std::numeric_limits<double>::infinity();
  // Faces by increasing size so that ties prefer the smaller support.
  std::vector<unsigned> masks(static_cast<std::size_t>((1u << c) - 1));
  std::iota(masks.begin(), masks.end(), 1u);
  std::stable_sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
    return std::popcount(a) < std::popcount(b);
  });
  for (unsigned mask : masks) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index k = 0; k < c; ++k) {
      if (mask & (1u << k)) idx.push_back(k);
    }
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix kkt = Matrix::Zero(m + 1, m + 1);
    Vector rhs = Vector::Zero(m + 1);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) kkt(a, b) = gram(idx[a], idx[b]) / scale;
      kkt(a, m) = 1.0;
      kkt(m, a) = 1.0;
    }
    rhs(m) = 1.0;
    Eigen::FullPivLU<Matrix> lu(kkt);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) continue;
    const Vector sol = lu.solve(rhs);
    Vector alpha = sol.head(m);
    if ((alpha.array() < -1e-12).any()) continue;
    alpha = alpha.cwiseMax(0.0);
    alpha /= alpha.sum();
    Vector full = Vector::Zero(c);
    for (Eigen::Index a = 0; a < m; ++a) full(idx[a]) = alpha(a);
    const Vector u = j.transpose() * full;
    const double norm = u.squaredNorm();
    if (norm < best_norm * (1.0 - 1e-14) - 1e-300) {
      best_norm = norm;
      best = HullPoint{u, full};
    }
  }
  return best;
}

namespace {

Vector project_to_simplex(const Vector& v) {
  Vector s = v;
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    cum += s(i);
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (s(i) - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

}  // namespace

HullPoint min_norm_hull_point_iterative(const Matrix& j, double gap_tol, int max_iter) {
  const Eigen::Index c = j.rows();
  if (c < 1) throw ValidationError("min_norm_hull_point: no gradients");
  if (!j.allFinite()) throw ValidationError("min_norm_hull_point: non-finite gradient");
  const Matrix gram = j * j.transpose();
  const double scale = std::max(1.0, gram.diagonal().maxCoeff());
  const double lipschitz = std::max(sym_eig(symmetrize(gram)).values(0), 1e-300);
  const double step = 1.0 / lipschitz;

  Vector alpha = Vector::Constant(c, 1.0 / static_cast<double>(c));
  Vector y = alpha;
  double t = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector g_alpha = gram * alpha;
    const double gap = alpha.dot(g_alpha) - g_alpha.minCoeff();
    if (gap <= gap_tol * scale) break;
    const Vector next = project_to_simplex(y - step * (gram * y));
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - alpha);
    // Restart the momentum whenever it would increase the objective.
    if (next.dot(gram * next) > alpha.dot(g_alpha)) {
      y = next;
      t = 1.0;
    } else {
      t = t_next;
    }
    alpha = next;
  }
  return HullPoint{j.transpose() * alpha, alpha};
}

HullPoint min_norm_hull_point(const Matrix& j) {
  if (j.rows() == 1) {
    if (!j.allFinite()) throw ValidationError("min_norm_hull_point: non-finite gradient");
    return HullPoint{j.row(0).transpose(), Vector::Ones(1)};
  }
  if (j.rows() <= kHullExactMaxRows) return min_norm_hull_point_exact(j);
  return min_norm_hull_point_iterative(j);
}

SharedBasis method_mch(const JacobianSet& js) {
  js.validate();
  Matrix u(js.size(), js.dim());
  for (Eigen::Index i = 0; i < js.size(); ++i) {
    u.row(i) = min_norm_hull_point(js.jacobian_at(i)).point.transpose();
  }
  return basis_from_rows(u, Method::kMch);
}

SharedBasis method_lp(const JacobianSet& js) {
  js.validate();
  const Eigen::Index n = js.size();
  const Eigen::Index c = js.objectives();
  const Eigen::Index d = js.dim();
  Warnings warnings;
  if (n < c) {
    warnings.push_back({WarningKind::kFewSamples, "fewer samples than objectives"});
  }
  Matrix a(n, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    Matrix jj(n, c);
    for (Eigen::Index k = 0; k < c; ++k) jj.col(k) = js.gradients[static_cast<std::size_t>(k)].col(col);
    Vector w = Vector::Unit(c, 0);
    if (jj.cwiseAbs().maxCoeff() == 0.0) {
      warnings.push_back({WarningKind::kZeroColumn,
                          "all derivatives with respect to input " + std::to_string(col + 1) + " vanish"});
    } else {
      // Sign from the eigensolver convention (largest component positive),
      // so a single objective keeps A equal to its gradient matrix.
      w = sym_eig(mean_outer_product(jj)).vectors.col(0);
    }
    a.col(col) = jj * w;
  }
  SharedBasis out = basis_from_rows(a, Method::kLp);
  out.warnings.insert(out.warnings.begin(), warnings.begin(), warnings.end());
  return out;
}

SharedBasis method_sspd(const SpdCollection& spd) {
  validate_collection(spd, "method_sspd");
  return scalar_active_subspace(spd.sum(), Method::kSspd);
}

SpdCollection ridge_regularize(const SpdCollection& spd) {
  validate_collection(spd, "ridge_regularize");
  const auto d = static_cast<double>(spd.dim());
  const double pooled = spd.sum().matrix().trace() / d;
  SpdCollection out;
  out.weights = spd.weights;
  for (const auto& m : spd.matrices) {
    double eps = 1e-10 * m.matrix().trace() / d;
    if (!(eps > 0.0)) eps = 1e-10 * pooled;
    if (!(eps > 0.0)) eps = 1e-10;
    out.matrices.push_back(symmetrize(m.matrix() + eps * Matrix::Identity(spd.dim(), spd.dim())));
  }
  return out;
}

SharedBasis method_fg(const SpdCollection& spd, const FgOptions& options) {
  validate_collection(spd, "method_fg");
  const SpdCollection ridged = ridge_regularize(spd);
  const std::vector<double> weights = relative_weights(ridged);
  const Eigen::Index d = spd.dim();
  const std::size_t c = ridged.size();

  Matrix w = sym_eig(ridged.sum()).vectors;
  double last_angle = 0.0;
  bool converged = d < 2;
  std::vector<Eigen::Matrix2d> t(c);
  for (int sweep = 0; sweep < options.max_sweeps && !converged; ++sweep) {
    last_angle = 0.0;
    for (Eigen::Index p = 0; p + 1 < d; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        Eigen::Matrix<double, Eigen::Dynamic, 2> h(d, 2);
        h.col(0) = w.col(p);
        h.col(1) = w.col(q);
        for (std::size_t k = 0; k < c; ++k) t[k] = h.transpose() * ridged.matrices[k].matrix() * h;

        double theta = 0.0;
        for (int inner = 0; inner < options.max_inner; ++inner) {
          const Eigen::Vector2d q1(std::cos(theta), std::sin(theta));
          const Eigen::Vector2d q2(-std::sin(theta), std::cos(theta));
          Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
          for (std::size_t k = 0; k < c; ++k) {
            const double d1 = q1.dot(t[k] * q1);
            const double d2 = q2.dot(t[k] * q2);
            m += weights[k] * ((d1 - d2) / (d1 * d2)) * t[k];
          }
          const double next =
              reduce_quarter_turn(0.5 * std::atan2(2.0 * m(0, 1), m(0, 0) - m(1, 1)));
          const double change = std::abs(reduce_quarter_turn(next - theta));
          theta = next;
          if (change < 1e-15) break;
        }
        last_angle = std::max(last_angle, std::abs(theta));
        if (theta != 0.0) {
          const double cs = std::cos(theta);
          const double sn = std::sin(theta);
          const Vector wp = w.col(p);
          const Vector wq = w.col(q);
          w.col(p) = cs * wp + sn * wq;
          w.col(q) = -sn * wp + cs * wq;
        }
      }
    }
    converged = last_angle < options.angle_tol;
  }
  if (!converged) {
    throw NonConvergence("method_fg: no convergence after " + std::to_string(options.max_sweeps) +
                             " sweeps (last rotation angle " + std::to_string(last_angle) + ")",
                         last_angle);
  }

  normalize_column_signs(w);
  SharedBasis out{Method::kFg, w, Vector(d), per_objective_diagonals(spd, w), {}};
  out.importance = out.per_objective_values->colwise().sum().transpose();
  order_by_importance(out);
  return out;
}

double fg_log_deviation(const SpdCollection& spd, const Matrix& w) {
  validate_collection(spd, "fg_deviation");
  if (w.rows() != spd.dim() || w.cols() != spd.dim()) {
    throw ValidationError("fg_deviation: basis must be d x d");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < spd.size(); ++k) {
    const Matrix t = w.transpose() * spd.matrices[k].matrix() * w;
    const Eigen::LLT<Matrix> llt(t);
    if (llt.info() != Eigen::Success) {
      throw SingularMatrix("fg_deviation: transformed matrix " + std::to_string(k + 1) +
                           " is not positive definite");
    }
    const Matrix l = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    double log_diag = 0.0;
    for (Eigen::Index i = 0; i < t.rows(); ++i) log_diag += std::log(t(i, i));
    total += spd.weights[k] * (log_diag - log_det);
  }
  return total;
}

double fg_deviation(const SpdCollection& spd, const Matrix& w) {
  return std::exp(fg_log_deviation(spd, w));
}

SharedBasis method_see(const SpdCollection& spd, const SeeOptions& options) {
  validate_collection(spd, "method_see");
  const SpdCollection ridged = ridge_regularize(spd);
  const std::vector<double> weights = relative_weights(ridged);
  const Eigen::Index d = spd.dim();
  const std::size_t c = ridged.size();

  Matrix w = Matrix::Zero(d, d);
  for (Eigen::Index step = 0; step < d; ++step) {
    Matrix complement;
    if (step == 0) {
      complement = Matrix::Identity(d, d);
    } else {
      Eigen::HouseholderQR<Matrix> qr(w.leftCols(step));
      const Matrix q = qr.householderQ() * Matrix::Identity(d, d);
      complement = q.rightCols(d - step);
    }
    const Eigen::Index m = complement.cols();
    std::vector<Matrix> reduced(c);
    Matrix pooled = Matrix::Zero(m, m);
    for (std::size_t k = 0; k < c; ++k) {
      reduced[k] = complement.transpose() * ridged.matrices[k].matrix() * complement;
      pooled += reduced[k];
    }

    Vector v = Vector::Ones(1);
    if (m > 1) {
      const EigenPair start = sym_eig(symmetrize(pooled));
      v = options.ascending ? Vector(start.vectors.col(m - 1)) : Vector(start.vectors.col(0));
      bool converged = false;
      double change = 0.0;
      for (int it = 0; it < options.max_iter; ++it) {
        Matrix s = Matrix::Zero(m, m);
        for (std::size_t k = 0; k < c; ++k) s += (weights[k] / v.dot(reduced[k] * v)) * reduced[k];
        Vector next = options.ascending ? Vector(s.trace() * v - s * v) : Vector(s * v);
        next.normalize();
        if (next.dot(v) < 0.0) next = -next;
        change = (next * next.transpose() - v * v.transpose()).norm();
        v = next;
        if (change < options.tol) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        throw NonConvergence("method_see: step " + std::to_string(step + 1) + " did not converge in " +
                                 std::to_string(options.max_iter) + " iterations",
                             change);
      }
    }
    w.col(step) = complement * v;
  }

  normalize_column_signs(w);
  SharedBasis out{Method::kSee, w, Vector(d), per_objective_diagonals(spd, w), {}};
  out.importance = out.per_objective_values->colwise().sum().transpose();
  order_by_importance(out);
  return out;
}

RidgeProjector method_zahm(const SymmetricMatrix& h, const SymmetricMatrix& sigma, Eigen::Index r) {
  const Eigen::Index d = h.dim();
  if (sigma.dim() != d) throw ValidationError("method_zahm: covariance dimension mismatch");
  if (r < 1 || r > d) throw ValidationError("method_zahm: rank " + std::to_string(r) + " out of range");
  const Eigen::LLT<Matrix> llt(sigma.matrix());
  if (llt.info() != Eigen::Success) throw SingularCovariance("method_zahm: covariance is not positive definite");
  const Matrix sigma_inv = llt.solve(Matrix::Identity(d, d));
  const GeneralizedEigenPair gen = gen_sym_eig(h, symmetrize(sigma_inv));
  RidgeProjector out;
  out.rank = r;
  out.vectors = gen.vectors.leftCols(r);
  out.values = gen.values;
  out.projector = out.vectors * out.vectors.transpose() * sigma_inv;
  return out;
}

}  // namespace sharedas
