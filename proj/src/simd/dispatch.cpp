#include <atomic>
#include <cstdlib>
#include <string_view>

#include "lesvote/error.hpp"
#include "lesvote/simd/kernels.hpp"

namespace lesvote::simd {

const char* to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(LESVOTE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(LESVOTE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!supported(isa)) {
    fail(ErrorKind::parameter, std::string("SIMD variant not available: ") + to_string(isa));
  }
  switch (isa) {
#if defined(LESVOTE_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_table;
#endif
#if defined(LESVOTE_HAVE_NEON)
    case Isa::neon: return detail::neon_table;
#endif
    default: return detail::scalar_table;
  }
}

namespace {

const KernelTable* pick_default() noexcept {
  if (const char* env = std::getenv("LESVOTE_SIMD")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == to_string(isa) && supported(isa)) return &kernels_for(isa);
    }
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (supported(isa)) return &kernels_for(isa);
  }
  return &detail::scalar_table;
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& active() noexcept { return *current().load(std::memory_order_relaxed); }

Isa active_isa() noexcept { return active().isa; }

bool select(Isa isa) noexcept {
  if (!supported(isa)) return false;
  current().store(&kernels_for(isa), std::memory_order_relaxed);
  return true;
}

}  // namespace lesvote::simd
