#include "sharedas/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "sharedas/errors.hpp"

namespace sharedas {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr int kMaxJacobiSweeps = 100;

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ValidationError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

double off_diagonal_norm_sq(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return s;
}

// Reorders (values, vectors) by descending value, stable on ties.
void sort_descending(Vector& values, Matrix& vectors) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  Vector v(values.size());
  Matrix w(vectors.rows(), vectors.cols());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    v(k) = values(order[static_cast<std::size_t>(k)]);
    w.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  values = std::move(v);
  vectors = std::move(w);
}

}  // namespace

SymmetricMatrix::SymmetricMatrix(const Matrix& m) {
  require_square_finite(m, "SymmetricMatrix");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw ValidationError("SymmetricMatrix: asymmetry " + std::to_string(asym) +
                          " exceeds tolerance");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(Eigen::Index dim) {
  return SymmetricMatrix(Matrix::Identity(dim, dim), Trusted{});
}

SymmetricMatrix SymmetricMatrix::zero(Eigen::Index dim) {
  return SymmetricMatrix(Matrix::Zero(dim, dim), Trusted{});
}

SymmetricMatrix SymmetricMatrix::operator+(const SymmetricMatrix& other) const {
  if (other.dim() != dim()) throw ValidationError("SymmetricMatrix: dimension mismatch in sum");
  return SymmetricMatrix(m_ + other.m_, Trusted{});
}

SymmetricMatrix SymmetricMatrix::scaled(double factor) const {
  return SymmetricMatrix(factor * m_, Trusted{});
}

SymmetricMatrix symmetrize(const Matrix& m) {
  require_square_finite(m, "symmetrize");
  return SymmetricMatrix(0.5 * (m + m.transpose()), SymmetricMatrix::Trusted{});
}

void normalize_column_signs(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    auto col = vectors.col(c);
    const double peak = col.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) >= peak - 1e-12 * peak) {
        if (col(i) < 0) col = -col;
        break;
      }
    }
  }
}

EigenPair sym_eig(const SymmetricMatrix& m) {
  const Eigen::Index d = m.dim();
  Matrix a = m.matrix();
  Matrix v = Matrix::Identity(d, d);

  const double total = a.squaredNorm();
  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    if (off_diagonal_norm_sq(a) <= eps * eps * total) break;
    for (Eigen::Index p = 0; p < d - 1; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Skip rotations that cannot change the diagonal in floating point.
        if (std::abs(apq) < eps * 1e-3 * std::sqrt(std::abs(a(p, p) * a(q, q)))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  EigenPair out{a.diagonal(), std::move(v)};
  sort_descending(out.values, out.vectors);
  normalize_column_signs(out.vectors);
  return out;
}

GeneralizedEigenPair gen_sym_eig(const SymmetricMatrix& a, const SymmetricMatrix& b) {
  if (a.dim() != b.dim()) throw ValidationError("gen_sym_eig: dimension mismatch");
  const Eigen::LLT<Matrix> llt(b.matrix());
  if (llt.info() != Eigen::Success) {
    throw SingularCovariance("gen_sym_eig: metric matrix is not positive definite");
  }
  const Matrix& l = llt.matrixL().toDenseMatrix();
  if ((l.diagonal().array() <= 0.0).any()) {
    throw SingularCovariance("gen_sym_eig: metric matrix is not positive definite");
  }
  // C = L^{-1} A L^{-T}
  const auto lower = l.triangularView<Eigen::Lower>();
  Matrix tmp = lower.solve(a.matrix());
  Matrix reduced = lower.solve(tmp.transpose());
  EigenPair std_pair = sym_eig(symmetrize(reduced));
  Matrix vectors = l.transpose().triangularView<Eigen::Upper>().solve(std_pair.vectors);
  normalize_column_signs(vectors);
  return GeneralizedEigenPair{std::move(std_pair.values), std::move(vectors)};
}

Matrix leading_projector(const Matrix& w, Eigen::Index j) {
  if (j < 0 || j > w.cols()) throw ValidationError("leading_projector: rank out of range");
  const auto wj = w.leftCols(j);
  return wj * wj.transpose();
}

double projector_distance(const Matrix& w1, const Matrix& w2, Eigen::Index j) {
  if (w1.rows() != w2.rows()) throw ValidationError("projector_distance: row mismatch");
  if (j < 1 || j > w1.cols() || j > w2.cols()) {
    throw ValidationError("projector_distance: rank " + std::to_string(j) + " out of range");
  }
  return (leading_projector(w1, j) - leading_projector(w2, j)).norm();
}

double orthonormality_defect(const Matrix& w) {
  return (w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff();
}

}  // namespace sharedas
