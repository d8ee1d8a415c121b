#include "sharedas/simd/kernels.hpp"

namespace sharedas::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", &dot_scalar, &sum_sq_diff_scalar};
  return table;
}

}  // namespace sharedas::simd
