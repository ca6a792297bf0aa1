#include "exsp/linalg.hpp"

#include <cmath>

#include "exsp/errors.hpp"
#include "exsp/simd/kernels.hpp"

namespace exsp {

Matrix Matrix::identity(std::size_t n) {
  Matrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return {};
  Matrix M(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r].size() == M.cols(), "ragged matrix rows");
    std::copy(rows[r].begin(), rows[r].end(), M.row(r).begin());
  }
  return M;
}

Matrix Matrix::transposed() const {
  Matrix T(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) T(c, r) = (*this)(r, c);
  return T;
}

void matvec(const Matrix& A, std::span<const double> x, std::span<double> y) {
  require(x.size() == A.cols() && y.size() == A.rows(), "matvec: dimension mismatch");
  simd::kernels().gemv(A.data(), A.rows(), A.cols(), x.data(), y.data());
}

Vector matvec(const Matrix& A, std::span<const double> x) {
  Vector y(A.rows());
  matvec(A, x, y);
  return y;
}

void matvec_t(const Matrix& A, std::span<const double> x, std::span<double> y) {
  require(x.size() == A.rows() && y.size() == A.cols(), "matvec_t: dimension mismatch");
  simd::kernels().gemv_t(A.data(), A.rows(), A.cols(), x.data(), y.data());
}

Vector matvec_t(const Matrix& A, std::span<const double> x) {
  Vector y(A.cols());
  matvec_t(A, x, y);
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot: dimension mismatch");
  return simd::dot(a, b);
}

double norm2_sq(std::span<const double> a) { return simd::dot(a, a); }
double norm2(std::span<const double> a) { return std::sqrt(norm2_sq(a)); }
double norm1(std::span<const double> a) { return simd::asum(a); }
double norm_inf(std::span<const double> a) { return simd::amax(a); }

Vector add(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "add: dimension mismatch");
  Vector out(a.begin(), a.end());
  simd::axpy(1.0, b, out);
  return out;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "sub: dimension mismatch");
  Vector out(a.begin(), a.end());
  simd::axpy(-1.0, b, out);
  return out;
}

Vector scaled(std::span<const double> a, double s) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

double distance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace exsp
