#include <doctest.h>

#include <cmath>

#include "exsp/simd/kernels.hpp"
#include "support.hpp"

using namespace exsp;
namespace simd = exsp::simd;

namespace {

void compare_tables(const simd::KernelTable& ref, const simd::KernelTable& alt) {
  Rng rng(11);
  for (std::size_t n = 0; n <= 67; ++n) {
    const Vector a = test::random_vector(n, rng);
    const Vector b = test::random_vector(n, rng);
    const double tol = 1e-12 * (1.0 + static_cast<double>(n));
    CHECK(std::fabs(ref.dot(a.data(), b.data(), n) - alt.dot(a.data(), b.data(), n)) <= tol);
    CHECK(std::fabs(ref.asum(a.data(), n) - alt.asum(a.data(), n)) <= tol);
    CHECK(ref.amax(a.data(), n) == alt.amax(a.data(), n));

    Vector y1 = b, y2 = b;
    ref.axpy(0.37, a.data(), y1.data(), n);
    alt.axpy(0.37, a.data(), y2.data(), n);
    CHECK(test::max_abs_diff(y1, y2) <= 1e-14);

    Vector o1(n), o2(n);
    ref.soft_threshold(a.data(), 0.4, o1.data(), n);
    alt.soft_threshold(a.data(), 0.4, o2.data(), n);
    CHECK(o1 == o2);
    ref.clamp(a.data(), -0.3, 0.5, o1.data(), n);
    alt.clamp(a.data(), -0.3, 0.5, o2.data(), n);
    CHECK(o1 == o2);

    const std::size_t rows = n / 3 + 1;
    const Matrix A = test::random_matrix(rows, n, rng);
    Vector g1(rows), g2(rows);
    ref.gemv(A.data(), rows, n, a.data(), g1.data());
    alt.gemv(A.data(), rows, n, a.data(), g2.data());
    CHECK(test::max_abs_diff(g1, g2) <= tol);
    const Vector r = test::random_vector(rows, rng);
    Vector t1(n), t2(n);
    ref.gemv_t(A.data(), rows, n, r.data(), t1.data());
    alt.gemv_t(A.data(), rows, n, r.data(), t2.data());
    CHECK(test::max_abs_diff(t1, t2) <= tol);
  }
}

}  // namespace

TEST_CASE("scalar table is always available") {
  CHECK(simd::isa_available(simd::Isa::scalar));
  CHECK(simd::kernels_for(simd::Isa::scalar).isa == simd::Isa::scalar);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  if (!simd::isa_available(simd::Isa::avx2)) {
    MESSAGE("AVX2 not available; comparing scalar with itself");
    compare_tables(simd::scalar_kernels(), simd::scalar_kernels());
    return;
  }
  compare_tables(simd::scalar_kernels(), simd::kernels_for(simd::Isa::avx2));
}

TEST_CASE("soft threshold kernel matches its definition") {
  const double a[] = {3.0, -1.0, 0.2, -0.2, 0.0};
  double out[5];
  simd::scalar_kernels().soft_threshold(a, 1.5, out, 5);
  CHECK(out[0] == 1.5);
  CHECK(out[1] == 0.0);
  CHECK(out[4] == 0.0);
}
