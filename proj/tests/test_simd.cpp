#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sharedas/gradients.hpp"
#include "sharedas/simd/kernels.hpp"

using namespace sharedas;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  std::vector<double> v(n);
  for (double& x : v) x = nd(gen);
  return v;
}

double abs_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] * b[i]);
  return s;
}

}  // namespace

TEST_CASE("scalar kernels compute the textbook sums") {
  const auto& k = simd::scalar_kernels();
  const double a[] = {1, 2, 3};
  const double b[] = {4, -5, 6};
  CHECK(k.dot(a, b, 3) == 12.0);
  CHECK(k.sum_sq_diff(a, b, 3) == 9.0 + 49.0 + 9.0);
  CHECK(k.dot(a, b, 0) == 0.0);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const simd::KernelTable* fast = simd::avx2_kernels();
  if (!fast) {
    MESSAGE("AVX2 kernels unavailable on this machine; equivalence not exercised");
    return;
  }
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 gen(1);
  for (std::size_t n = 0; n < 70; ++n) {
    const auto a = random_vec(n, gen);
    const auto b = random_vec(n, gen);
    const double scale = 1.0 + abs_dot(a, b);
    CHECK(std::abs(fast->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * scale);
    double sq_scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) sq_scale += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK(std::abs(fast->sum_sq_diff(a.data(), b.data(), n) - ref.sum_sq_diff(a.data(), b.data(), n)) <=
          1e-14 * sq_scale);
  }
  const auto big_a = random_vec(100003, gen);
  const auto big_b = random_vec(100003, gen);
  CHECK(std::abs(fast->dot(big_a.data(), big_b.data(), big_a.size()) -
                 ref.dot(big_a.data(), big_b.data(), big_a.size())) <= 1e-13 * abs_dot(big_a, big_b));
}

TEST_CASE("dispatch can be pinned and released") {
  simd::force_isa(simd::Isa::kScalar);
  CHECK(simd::active().name == "scalar");
  simd::force_isa(simd::Isa::kAvx2);
  CHECK(simd::active().name == (simd::avx2_kernels() ? "avx2" : "scalar"));
  simd::reset_dispatch();
  CHECK((simd::active().name == "scalar" || simd::active().name == "avx2"));
}

TEST_CASE("SPD assembly is the same under both kernel sets") {
  std::mt19937_64 gen(2);
  JacobianSet js;
  for (int k = 0; k < 2; ++k) {
    Matrix g(1001, 3);
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = random_vec(1, gen)[0];
    js.gradients.push_back(g);
  }
  simd::force_isa(simd::Isa::kScalar);
  const SpdCollection a = assemble_spd(js);
  simd::force_isa(simd::Isa::kAvx2);
  const SpdCollection b = assemble_spd(js);
  simd::reset_dispatch();
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK((a.matrices[k].matrix() - b.matrices[k].matrix()).cwiseAbs().maxCoeff() < 1e-13);
  }
}
