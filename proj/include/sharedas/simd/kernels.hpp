#pragma once

// Reduction kernels behind the SPD assembly and RMSE loops. A scalar
// reference implementation is always built; an AVX2/FMA variant is compiled
// on x86-64 and chosen at runtime when the CPU supports it.

#include <cstddef>
#include <string_view>

namespace sharedas::simd {

struct KernelTable {
  std::string_view name;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
};

enum class Isa { kScalar, kAvx2 };

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels() noexcept;

/// Best table for this CPU, unless overridden by force_isa() or the
/// SHAREDAS_SIMD=scalar environment variable.
const KernelTable& active() noexcept;

/// Pins the dispatch (tests, reproducible runs). Falls back to scalar when
/// the requested ISA is unavailable.
void force_isa(Isa isa) noexcept;
void reset_dispatch() noexcept;

}  // namespace sharedas::simd
