#pragma once

// Dense double-precision inner loops used by every solver.
//
// Each kernel has a portable scalar reference and, on x86-64, an AVX2/FMA
// variant compiled in its own translation unit. The variant is chosen once at
// first use from CPUID; setting EXSP_SIMD=scalar in the environment (or calling
// select_isa) pins the reference path. Reductions in the vector path use a
// different summation order, so results agree with the reference to rounding,
// not bit-for-bit. Elementwise kernels agree exactly.

#include <cstddef>
#include <span>
#include <string_view>

namespace exsp::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*asum)(const double* a, std::size_t n);
  double (*amax)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = A x, A row-major rows x cols
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y = A^T x, A row-major rows x cols
  void (*gemv_t)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  // out_i = sgn(a_i) * max(0, |a_i| - tau)
  void (*soft_threshold)(const double* a, double tau, double* out, std::size_t n);
  // out_i = min(max(a_i, lo), hi)
  void (*clamp)(const double* a, double lo, double hi, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// True when the variant was compiled in and the CPU supports it.
bool isa_available(Isa isa);

// Table for a specific ISA; throws std::invalid_argument when unavailable.
const KernelTable& kernels_for(Isa isa);

// Currently selected table.
const KernelTable& kernels();
Isa active_isa();

// Overrides the automatic choice for the rest of the process. Not thread-safe
// with respect to concurrent kernel calls; call it during start-up.
void select_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return kernels().dot(a.data(), b.data(), a.size());
}
inline double asum(std::span<const double> a) { return kernels().asum(a.data(), a.size()); }
inline double amax(std::span<const double> a) { return kernels().amax(a.data(), a.size()); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  kernels().axpy(alpha, x.data(), y.data(), x.size());
}
inline void soft_threshold(std::span<const double> a, double tau, std::span<double> out) {
  kernels().soft_threshold(a.data(), tau, out.data(), a.size());
}
inline void clamp(std::span<const double> a, double lo, double hi, std::span<double> out) {
  kernels().clamp(a.data(), lo, hi, out.data(), a.size());
}

}  // namespace exsp::simd
