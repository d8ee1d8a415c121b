#pragma once

// Dense symmetric eigen-solvers and subspace comparison utilities.
//
// Conventions shared by every solver here:
//  * eigenvalues are returned in descending order; equal eigenvalues keep
//    the order in which the solver produced them (stable sort);
//  * each eigenvector is sign-normalized so that its largest-magnitude
//    component is positive (first such component on ties).
// Inside a block of repeated eigenvalues only the spanned projector is
// meaningful, never the individual vectors.

#include <Eigen/Dense>

#include <cstddef>

namespace sharedas {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Square, finite, symmetric matrix. Construction validates symmetry to a
/// relative tolerance of 1e-12 and stores the exactly symmetrized value.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Matrix& m);

  static SymmetricMatrix identity(Eigen::Index dim);
  static SymmetricMatrix zero(Eigen::Index dim);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymmetricMatrix operator+(const SymmetricMatrix& other) const;
  SymmetricMatrix scaled(double factor) const;

 private:
  struct Trusted {};
  SymmetricMatrix(Matrix m, Trusted) : m_(std::move(m)) {}
  friend SymmetricMatrix symmetrize(const Matrix& m);

  Matrix m_;
};

/// (m + m^T) / 2 without the tolerance check; for matrices that are
/// symmetric by construction up to rounding.
SymmetricMatrix symmetrize(const Matrix& m);

struct EigenPair {
  Vector values;   // descending
  Matrix vectors;  // column-orthonormal
};

struct GeneralizedEigenPair {
  Vector values;   // descending
  Matrix vectors;  // B-orthonormal: V^T B V = I
};

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
EigenPair sym_eig(const SymmetricMatrix& m);

/// Solves A v = lambda B v for symmetric A and positive definite B through
/// the Cholesky reduction B = L L^T. Throws SingularCovariance when B is not
/// positive definite.
GeneralizedEigenPair gen_sym_eig(const SymmetricMatrix& a, const SymmetricMatrix& b);

/// W_j W_j^T for the leading j columns of w.
Matrix leading_projector(const Matrix& w, Eigen::Index j);

/// Frobenius norm of the difference of the rank-j projectors spanned by the
/// leading j columns of w1 and w2.
double projector_distance(const Matrix& w1, const Matrix& w2, Eigen::Index j);

/// Flips the sign of each column so its largest-magnitude entry is positive.
void normalize_column_signs(Matrix& vectors);

/// max_ij |W^T W - I|_ij
double orthonormality_defect(const Matrix& w);

}  // namespace sharedas
