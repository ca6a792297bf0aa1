#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

#include "exsp/linalg.hpp"
#include "exsp/rng.hpp"

namespace exsp::test {

inline Vector random_vector(std::size_t n, Rng& rng, double scale = 1.0) {
  Vector v(n);
  for (double& x : v) x = scale * rng.normal();
  return v;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix A(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) A(r, c) = rng.normal();
  return A;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

// Central differences with step h per coordinate.
inline Vector numeric_gradient(const std::function<double(std::span<const double>)>& f,
                               std::span<const double> x, double h = 1e-6) {
  Vector g(x.size());
  Vector xp(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = xp[i];
    xp[i] = xi + h;
    const double fp = f(xp);
    xp[i] = xi - h;
    const double fm = f(xp);
    xp[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// ||a - b|| / max(||b||, 1e-12).
inline double relative_error(std::span<const double> a, std::span<const double> b) {
  return distance(a, b) / std::max(norm2(b), 1e-12);
}

}  // namespace exsp::test
