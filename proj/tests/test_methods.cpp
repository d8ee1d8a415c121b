#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sharedas/errors.hpp"
#include "sharedas/gradients.hpp"
#include "sharedas/methods.hpp"

using namespace sharedas;

namespace {

JacobianSet random_set(Eigen::Index n, Eigen::Index c, Eigen::Index d, std::mt19937_64& gen) {
  JacobianSet js;
  for (Eigen::Index k = 0; k < c; ++k) js.gradients.push_back(oracle::random_matrix(n, d, gen));
  return js;
}

SpdCollection collection(const std::vector<Matrix>& ms, double weight = 1.0) {
  SpdCollection spd;
  for (const auto& m : ms) {
    spd.matrices.emplace_back(m);
    spd.weights.push_back(weight);
  }
  return spd;
}

// Matrices sharing the eigenvectors q with random positive spectra.
std::vector<Matrix> commuting(const Matrix& q, int count, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.1, 5.0);
  std::vector<Matrix> out;
  for (int k = 0; k < count; ++k) {
    Vector lam(q.cols());
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = u(gen);
    out.push_back(q * lam.asDiagonal() * q.transpose());
  }
  return out;
}

bool all_distances_small(const Matrix& a, const Matrix& b, double tol) {
  for (Eigen::Index j = 1; j <= a.cols(); ++j) {
    if (oracle::proj_distance(a, b, j) > tol) return false;
  }
  return true;
}

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("method tags") {
  for (Method m : all_methods()) CHECK(method_from_string(to_string(m)) == m);
  try {
    method_from_string("pca");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (const char* tag : {"ag", "mch", "lp", "sspd", "fg", "see", "zahm"}) CHECK(msg.find(tag) != std::string::npos);
  }
}

TEST_CASE("ag on duplicated objectives") {
  JacobianSet js;
  js.gradients.push_back(Matrix(rows({{2, 0}, {2, 0}})));
  js.gradients.push_back(Matrix(rows({{2, 0}, {2, 0}})));
  const SharedBasis b = method_ag(js);
  CHECK(b.importance(0) == doctest::Approx(4.0));
  CHECK(b.importance(1) == doctest::Approx(0.0));
  CHECK(b.basis(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("ag cancellation is degenerate") {
  std::mt19937_64 gen(1);
  const Matrix g = oracle::random_matrix(6, 3, gen);
  JacobianSet js;
  js.gradients = {g, -g};
  const SharedBasis b = method_ag(js);
  CHECK(b.importance.cwiseAbs().maxCoeff() == 0.0);
  CHECK(has_warning(b.warnings, WarningKind::kDegenerateSpectrum));
  CHECK(orthonormality_defect(b.basis) < 1e-14);
}

TEST_CASE("ag against naive pipeline") {
  std::mt19937_64 gen(2);
  const JacobianSet js = random_set(40, 2, 4, gen);
  const Matrix u = (js.gradients[0] + js.gradients[1]) / 2.0;
  const Matrix ref = oracle::eigvecs_desc(oracle::naive_mean_outer(u));
  CHECK(all_distances_small(method_ag(js).basis, ref, 1e-10));
}

TEST_CASE("min-norm hull point examples") {
  const HullPoint one = min_norm_hull_point(rows({{3, -4}}));
  CHECK(one.point == Eigen::Vector2d(3, -4));
  CHECK(one.coefficients(0) == 1.0);

  const HullPoint opposite = min_norm_hull_point(rows({{1, 2}, {-1, -2}}));
  CHECK(opposite.point.norm() < 1e-14);

  const HullPoint corner = min_norm_hull_point(rows({{1, 0}, {0, 1}}));
  CHECK(corner.point(0) == doctest::Approx(0.5));
  CHECK(corner.point(1) == doctest::Approx(0.5));
  const Vector grid = oracle::hull_grid(rows({{1, 0}, {0, 1}}));
  CHECK((corner.point - grid).norm() < 1e-6);
}

TEST_CASE("min-norm hull point vertex and edge solutions") {
  // Closest point is the vertex (1, 0).
  const HullPoint v = min_norm_hull_point(rows({{1, 0}, {3, 1}}));
  CHECK((v.point - Eigen::Vector2d(1, 0)).norm() < 1e-12);
  CHECK(v.coefficients.sum() == doctest::Approx(1.0));
  CHECK(v.coefficients.minCoeff() >= 0.0);
}

TEST_CASE("exact and iterative hull solvers agree") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix j = oracle::random_matrix(3, 2 + trial % 3, gen);
    const HullPoint exact = min_norm_hull_point_exact(j);
    const HullPoint iter = min_norm_hull_point_iterative(j);
    CHECK((exact.point - iter.point).norm() < 1e-5);
    CHECK((exact.point - oracle::hull_grid(j)).norm() < 1e-4);
  }
  const Matrix big = oracle::random_matrix(6, 3, gen);
  const HullPoint h = min_norm_hull_point(big);
  for (Eigen::Index k = 0; k < 6; ++k) {
    CHECK(h.point.dot(big.row(k).transpose()) >= h.point.squaredNorm() - 1e-8);
  }
}

TEST_CASE("mch special cases") {
  std::mt19937_64 gen(4);
  const JacobianSet one = random_set(30, 1, 3, gen);
  const SharedBasis sas = scalar_active_subspace(assemble_spd(one).matrices[0]);
  CHECK(all_distances_small(method_mch(one).basis, sas.basis, 1e-10));

  JacobianSet same;
  same.gradients = {one.gradients[0], one.gradients[0]};
  CHECK(all_distances_small(method_mch(same).basis, method_ag(same).basis, 1e-10));
}

TEST_CASE("mch against grid oracle with three objectives") {
  std::mt19937_64 gen(5);
  const JacobianSet js = random_set(12, 3, 3, gen);
  Matrix u(12, 3);
  for (Eigen::Index i = 0; i < 12; ++i) u.row(i) = oracle::hull_grid(js.jacobian_at(i)).transpose();
  const Matrix ref = oracle::eigvecs_desc(oracle::naive_mean_outer(u));
  const Vector vals = oracle::eigvals_desc(oracle::naive_mean_outer(u));
  const SharedBasis b = method_mch(js);
  CHECK((b.importance - vals).cwiseAbs().maxCoeff() < 1e-6);
  for (Eigen::Index j = 1; j < 3; ++j) {
    if (vals(j - 1) - vals(j) > 1e-3) CHECK(oracle::proj_distance(b.basis, ref, j) < 1e-4);
  }
}

TEST_CASE("lp single objective is the scalar active subspace") {
  std::mt19937_64 gen(6);
  const JacobianSet one = random_set(25, 1, 4, gen);
  const SharedBasis sas = scalar_active_subspace(assemble_spd(one).matrices[0]);
  CHECK(all_distances_small(method_lp(one).basis, sas.basis, 1e-10));
}

TEST_CASE("lp with a doubled objective") {
  std::mt19937_64 gen(7);
  // Every per-column weight is +(1,2)/sqrt(5), so A = sqrt(5) * g.
  const Matrix g = oracle::random_matrix(25, 3, gen);
  JacobianSet js;
  js.gradients = {g, 2.0 * g};
  const SharedBasis sas = scalar_active_subspace(SymmetricMatrix(oracle::naive_mean_outer(g)));
  const SharedBasis lp = method_lp(js);
  CHECK(all_distances_small(lp.basis, sas.basis, 1e-10));
  CHECK((lp.importance - 5.0 * sas.importance).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("lp against naive pipeline") {
  std::mt19937_64 gen(8);
  const JacobianSet js = random_set(30, 3, 4, gen);
  Matrix a(30, 4);
  for (Eigen::Index col = 0; col < 4; ++col) {
    Matrix jj(30, 3);
    for (Eigen::Index k = 0; k < 3; ++k) jj.col(k) = js.gradients[static_cast<std::size_t>(k)].col(col);
    Vector w = oracle::eigvecs_desc(oracle::naive_mean_outer(jj)).col(0);
    Eigen::Index big = 0;
    w.cwiseAbs().maxCoeff(&big);
    if (w(big) < 0.0) w = -w;
    a.col(col) = jj * w;
  }
  const Matrix ref = oracle::eigvecs_desc(oracle::naive_mean_outer(a));
  CHECK(all_distances_small(method_lp(js).basis, ref, 1e-9));
}

TEST_CASE("lp warns on a zero input column") {
  JacobianSet js;
  js.gradients = {rows({{1, 0}, {2, 0}}), rows({{0, 0}, {1, 0}})};
  CHECK(has_warning(method_lp(js).warnings, WarningKind::kZeroColumn));
}

TEST_CASE("sspd cases") {
  std::mt19937_64 gen(9);
  const Matrix a = oracle::random_spd(4, gen);
  const Matrix b = oracle::random_spd(4, gen);
  CHECK(all_distances_small(method_sspd(collection({a})).basis, oracle::eigvecs_desc(a), 1e-10));
  CHECK(all_distances_small(method_sspd(collection({a, b})).basis, oracle::eigvecs_desc(a + b), 1e-10));

  const SharedBasis tie = method_sspd(collection({Matrix(rows({{3, 0}, {0, 1}})), Matrix(rows({{1, 0}, {0, 3}}))}));
  CHECK(tie.importance(0) == doctest::Approx(4.0));
  CHECK(tie.importance(1) == doctest::Approx(4.0));
  CHECK((tie.basis - Matrix::Identity(2, 2)).norm() < 1e-14);
  CHECK(has_warning(tie.warnings, WarningKind::kDegenerateSpectrum));
}

TEST_CASE("fg on diagonal inputs orders by the sum") {
  const SharedBasis b = method_fg(collection({Matrix(rows({{3, 0}, {0, 1}})), Matrix(rows({{2, 0}, {0, 5}}))}));
  CHECK(std::abs(b.basis(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(b.basis(0, 1)) == doctest::Approx(1.0));
  CHECK(b.importance(0) == doctest::Approx(6.0));
  CHECK(b.importance(1) == doctest::Approx(5.0));
}

TEST_CASE("fg diagonalizes commuting collections") {
  std::mt19937_64 gen(10);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix q = oracle::random_orthogonal(4, gen);
    const auto cs = commuting(q, 3, gen);
    const SpdCollection spd = collection(cs, 100.0);
    const SharedBasis b = method_fg(spd);
    for (const auto& c : cs) {
      Matrix t = b.basis.transpose() * c * b.basis;
      t.diagonal().setZero();
      CHECK(t.cwiseAbs().maxCoeff() < 1e-8);
    }
    CHECK(fg_deviation(spd, b.basis) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(orthonormality_defect(b.basis) < 1e-12);
  }
}

TEST_CASE("fg single matrix gives its eigenvectors") {
  std::mt19937_64 gen(11);
  const Matrix a = oracle::random_spd(5, gen);
  CHECK(all_distances_small(method_fg(collection({a})).basis, oracle::eigvecs_desc(a), 1e-8));
}

TEST_CASE("fg beats the angle grid on 2x2 pairs") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<Matrix> cs{oracle::random_spd(2, gen), oracle::random_spd(2, gen)};
    const std::vector<double> w{1.0, 1.0};
    const SharedBasis b = method_fg(collection(cs));
    double grid_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10000; ++s) {
      const double t = std::numbers::pi / 2.0 * s / 10000.0;
      Matrix r(2, 2);
      r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      grid_min = std::min(grid_min, oracle::fg_objective(cs, w, r));
    }
    CHECK(oracle::fg_objective(cs, w, b.basis) <= grid_min + 1e-6);
  }
}

TEST_CASE("fg deviation bounds") {
  std::mt19937_64 gen(13);
  const SpdCollection diag = collection({Matrix(rows({{2, 0}, {0, 7}})), Matrix(rows({{1, 0}, {0, 1}}))});
  CHECK(fg_deviation(diag, Matrix::Identity(2, 2)) == doctest::Approx(1.0));
  for (int trial = 0; trial < 10; ++trial) {
    const SpdCollection spd = collection({oracle::random_spd(3, gen), oracle::random_spd(3, gen)});
    CHECK(fg_deviation(spd, oracle::random_orthogonal(3, gen)) >= 1.0 - 1e-12);
  }
  // Large sample counts overflow the plain product but not the log form.
  const SpdCollection heavy = collection({oracle::random_spd(3, gen)}, 1e6);
  CHECK(std::isfinite(fg_log_deviation(heavy, Matrix::Identity(3, 3))));
  CHECK_THROWS_AS(fg_deviation(collection({Matrix(rows({{1, 1}, {1, 1}}))}), Matrix::Identity(2, 2)), SingularMatrix);
}

TEST_CASE("see reductions") {
  std::mt19937_64 gen(14);
  const Matrix a = oracle::random_spd(4, gen);
  CHECK(all_distances_small(method_see(collection({a})).basis, oracle::eigvecs_desc(a), 1e-6));
  CHECK(all_distances_small(method_see(collection({a, a, a})).basis, oracle::eigvecs_desc(a), 1e-6));
}

TEST_CASE("see matches fg on commuting collections") {
  std::mt19937_64 gen(15);
  const Matrix q = oracle::random_orthogonal(3, gen);
  const SpdCollection spd = collection(commuting(q, 2, gen), 10.0);
  const SharedBasis see = method_see(spd);
  const SharedBasis fg = method_fg(spd);
  for (Eigen::Index j = 0; j < 3; ++j) {
    // Each SEE column is one of the common eigenvectors.
    double best = 1e9;
    for (Eigen::Index i = 0; i < 3; ++i) {
      best = std::min(best, oracle::proj_distance(see.basis.col(j), fg.basis.col(i), 1));
    }
    CHECK(best < 1e-6);
  }
  for (Eigen::Index j = 0; j + 1 < 3; ++j) CHECK(see.importance(j) >= see.importance(j + 1));
}

TEST_CASE("see ascending variant still returns a sorted orthonormal basis") {
  std::mt19937_64 gen(16);
  SeeOptions opts;
  opts.ascending = true;
  const SharedBasis b = method_see(collection({oracle::random_spd(4, gen), oracle::random_spd(4, gen)}), opts);
  CHECK(orthonormality_defect(b.basis) < 1e-10);
  for (Eigen::Index j = 0; j + 1 < 4; ++j) CHECK(b.importance(j) >= b.importance(j + 1));
}

TEST_CASE("zahm examples") {
  std::mt19937_64 gen(17);
  const Matrix h = oracle::random_spd(3, gen);
  const RidgeProjector full = method_zahm(SymmetricMatrix(h), SymmetricMatrix::identity(3), 3);
  CHECK((full.projector - Matrix::Identity(3, 3)).norm() < 1e-12);
  for (Eigen::Index r = 1; r < 3; ++r) {
    const RidgeProjector p = method_zahm(SymmetricMatrix(h), SymmetricMatrix::identity(3), r);
    CHECK((p.projector - oracle::projector(oracle::eigvecs_desc(h), r)).norm() < 1e-8);
  }

  const RidgeProjector two =
      method_zahm(SymmetricMatrix(rows({{4, 0}, {0, 1}})), SymmetricMatrix(rows({{2, 0}, {0, 1}})), 1);
  // Generalized pair (H, Sigma^{-1}): v1 = (sqrt 2, 0), P1 = v1 v1^T Sigma^{-1} = diag(1, 0).
  CHECK(std::abs(two.vectors(0, 0)) == doctest::Approx(std::sqrt(2.0)));
  CHECK((two.projector - Matrix(rows({{1, 0}, {0, 0}}))).norm() < 1e-14);
  CHECK((two.projector * two.projector - two.projector).norm() < 1e-14);

  CHECK_THROWS_AS(method_zahm(SymmetricMatrix(h), SymmetricMatrix::identity(3), 0), ValidationError);
  CHECK_THROWS_AS(method_zahm(SymmetricMatrix(h), SymmetricMatrix::zero(3), 1), SingularCovariance);
}

TEST_CASE("zahm projector is idempotent for general covariance") {
  std::mt19937_64 gen(18);
  const Matrix h = oracle::random_spd(4, gen);
  const Matrix s = oracle::random_spd(4, gen) + 0.5 * Matrix::Identity(4, 4);
  for (Eigen::Index r = 1; r <= 4; ++r) {
    const Matrix p = method_zahm(SymmetricMatrix(h), SymmetricMatrix(s), r).projector;
    CHECK((p * p - p).norm() < 1e-9);
  }
}

TEST_CASE("empty and mismatched collections are rejected") {
  CHECK_THROWS_AS(method_sspd(SpdCollection{}), ValidationError);
  SpdCollection bad = collection({Matrix::Identity(2, 2)});
  bad.weights.clear();
  CHECK_THROWS_AS(method_fg(bad), ValidationError);
}
