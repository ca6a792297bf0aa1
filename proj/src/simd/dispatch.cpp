#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "exsp/simd/kernels.hpp"

namespace exsp::simd {

#if EXSP_HAVE_AVX2
const KernelTable& avx2_kernels();
#endif

namespace {

bool cpu_has_avx2() {
#if EXSP_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("EXSP_SIMD"); env != nullptr && std::string(env) == "scalar") {
    return &scalar_kernels();
  }
#if EXSP_HAVE_AVX2
  if (cpu_has_avx2()) return &avx2_kernels();
#endif
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
  return cpu_has_avx2();
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("SIMD variant not available: " + std::string(isa_name(isa)));
  }
#if EXSP_HAVE_AVX2
  if (isa == Isa::avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

const KernelTable& kernels() { return *active().load(std::memory_order_relaxed); }

Isa active_isa() { return kernels().isa; }

void select_isa(Isa isa) { active().store(&kernels_for(isa), std::memory_order_relaxed); }

}  // namespace exsp::simd
