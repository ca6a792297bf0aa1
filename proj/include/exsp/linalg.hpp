#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace exsp {

using Vector = std::vector<double>;

/// Dense row-major matrix. Rows are contiguous so each row is a span and the
/// matrix-vector kernels stream memory linearly.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transposed() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// y = A x
void matvec(const Matrix& A, std::span<const double> x, std::span<double> y);
Vector matvec(const Matrix& A, std::span<const double> x);
// y = A^T x
void matvec_t(const Matrix& A, std::span<const double> x, std::span<double> y);
Vector matvec_t(const Matrix& A, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm2_sq(std::span<const double> a);
double norm1(std::span<const double> a);
double norm_inf(std::span<const double> a);

Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scaled(std::span<const double> a, double s);
// Euclidean distance without a temporary.
double distance(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> a);

}  // namespace exsp
