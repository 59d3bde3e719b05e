#pragma once

// Inner-loop arithmetic kernels with a portable scalar reference and
// ISA-specific variants (AVX2+FMA on x86-64, NEON on AArch64) selected at
// runtime. Set LESVOTE_SIMD=scalar in the environment to pin the reference.

#include <cstddef>
#include <span>

namespace lesvote::simd {

enum class Isa { scalar, avx2, neon };

const char* to_string(Isa isa) noexcept;

/// Function table for one instruction set. All kernels accept unaligned
/// pointers and any length.
struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a .* b
  void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
  // acc[k] += re[k]^2 + im[k]^2 for interleaved (re, im) pairs
  void (*accumulate_power)(const double* interleaved, double* acc, std::size_t n);
};

bool supported(Isa isa) noexcept;

/// Kernel table for a specific ISA; throws lesvote::Error when the ISA was
/// not compiled in or the CPU lacks it.
const KernelTable& kernels_for(Isa isa);

/// Table currently used by the dispatching wrappers below.
const KernelTable& active() noexcept;
Isa active_isa() noexcept;

/// Override the dispatch choice (tests, benchmarking). Returns false and
/// leaves the selection unchanged when the ISA is unavailable.
bool select(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  return active().squared_distance(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  active().multiply(a.data(), b.data(), out.data(), a.size());
}

inline void accumulate_power(std::span<const double> interleaved, std::span<double> acc) {
  active().accumulate_power(interleaved.data(), acc.data(), acc.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(LESVOTE_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
#if defined(LESVOTE_HAVE_NEON)
extern const KernelTable neon_table;
#endif
}  // namespace detail

}  // namespace lesvote::simd
