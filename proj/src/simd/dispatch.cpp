#include <atomic>
#include <cstdlib>
#include <string_view>

#include "sharedas/simd/kernels.hpp"

namespace sharedas::simd {

#if defined(SHAREDAS_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum_sq_diff(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#endif

namespace {

bool cpu_has_avx2() noexcept {
#if defined(SHAREDAS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("SHAREDAS_SIMD"); env && std::string_view(env) == "scalar") {
    return &scalar_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*> g_forced{nullptr};

}  // namespace

const KernelTable* avx2_kernels() noexcept {
#if defined(SHAREDAS_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  static const KernelTable table{"avx2", &avx2::dot, &avx2::sum_sq_diff};
  return ok ? &table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  if (const KernelTable* forced = g_forced.load(std::memory_order_acquire)) return *forced;
  static const KernelTable* detected = detect();
  return *detected;
}

void force_isa(Isa isa) noexcept {
  const KernelTable* t = &scalar_kernels();
  if (isa == Isa::kAvx2) {
    if (const KernelTable* a = avx2_kernels()) t = a;
  }
  g_forced.store(t, std::memory_order_release);
}

void reset_dispatch() noexcept { g_forced.store(nullptr, std::memory_order_release); }

}  // namespace sharedas::simd
