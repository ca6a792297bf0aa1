#include "exsp/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "exsp/errors.hpp"
#include "exsp/groups.hpp"
#include "exsp/simd/kernels.hpp"

namespace exsp {
namespace {

void check_cone_args(std::size_t d, double zeta) {
  require(d >= 1, "cone projection: empty input");
  require(zeta > 0.0 && std::isfinite(zeta), "cone projection: zeta must be positive and finite");
}

}  // namespace

double cone_objective(std::span<const double> x, double y, std::span<const double> a, double b,
                      double zeta) {
  const double dy = y - b;
  return 0.5 * distance(x, a) * distance(x, a) + 0.5 * zeta * dy * dy;
}

double project_l1_cone_into(std::span<const double> a, double b, double zeta, std::span<double> x,
                            std::vector<double>& scratch) {
  const std::size_t d = a.size();
  check_cone_args(d, zeta);
  require(x.size() == d, "project_l1_cone: output size mismatch");

  const double l1 = simd::asum(a);
  if (l1 <= b) {
    std::copy(a.begin(), a.end(), x.begin());
    return b;
  }
  const double linf = simd::amax(a);
  if (b <= 0.0 && -zeta * b >= linf) {
    std::fill(x.begin(), x.end(), 0.0);
    return 0.0;
  }

  // Magnitudes are consumed largest first and the scan usually stops after a
  // few, so a heap replaces the full sort.
  auto& mag = scratch;
  mag.resize(d);
  for (std::size_t i = 0; i < d; ++i) mag[i] = std::fabs(a[i]);
  std::make_heap(mag.begin(), mag.end());

  const double inv_zeta = 1.0 / zeta;
  double t = 0.0;
  double delta = std::numeric_limits<double>::quiet_NaN();
  double best_violation = std::numeric_limits<double>::infinity();
  double best_delta = 0.0;
  std::size_t left = d;
  for (std::size_t j = 1; j <= d; ++j) {
    std::pop_heap(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(left));
    const double upper = mag[--left];
    t += upper;
    const double dj = (t - b) / (inv_zeta + static_cast<double>(j));
    const double lower = left > 0 ? mag[0] : 0.0;
    if (lower <= dj && dj <= upper) {
      delta = dj;
      break;
    }
    // Only reached if rounding pushes every candidate just outside its window.
    const double violation = std::max(lower - dj, dj - upper);
    if (violation < best_violation) {
      best_violation = violation;
      best_delta = dj;
    }
  }
  if (std::isnan(delta)) delta = best_delta;

  simd::soft_threshold(a, delta, x);
  return simd::asum(std::span<const double>(x.data(), d));
}

ConePoint project_l1_cone(std::span<const double> a, double b, double zeta) {
  ConePoint p{Vector(a.size()), 0.0};
  std::vector<double> scratch;
  p.y = project_l1_cone_into(a, b, zeta, p.x, scratch);
  return p;
}

double project_linf_cone_into(std::span<const double> a, double b, double zeta,
                              std::span<double> x, std::vector<double>& scratch) {
  const std::size_t d = a.size();
  check_cone_args(d, zeta);
  require(x.size() == d, "project_linf_cone: output size mismatch");

  const double l1 = simd::asum(a);
  if (zeta * b + l1 <= 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return 0.0;
  }
  const double linf = simd::amax(a);
  if (b >= linf) {
    std::copy(a.begin(), a.end(), x.begin());
    return b;
  }

  // Walks magnitudes from the largest down, popping them off a heap; after
  // taking the c largest the window is (next largest, last taken].
  auto& mag = scratch;
  mag.resize(d);
  for (std::size_t i = 0; i < d; ++i) mag[i] = std::fabs(a[i]);
  std::make_heap(mag.begin(), mag.end());

  double t = 0.0;
  double y = std::numeric_limits<double>::quiet_NaN();
  double best_violation = std::numeric_limits<double>::infinity();
  double best_y = 0.0;
  std::size_t left = d;
  for (std::size_t taken = 1; taken <= d; ++taken) {
    std::pop_heap(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(left));
    const double upper = mag[--left];
    t += upper;
    const double yj = (zeta * b + t) / (zeta + static_cast<double>(taken));
    const double lower = left > 0 ? mag[0] : 0.0;
    if (lower < yj && yj <= upper) {
      y = yj;
      break;
    }
    const double violation = std::max(lower - yj, yj - upper);
    if (violation < best_violation) {
      best_violation = violation;
      best_y = yj;
    }
  }
  if (std::isnan(y)) y = std::max(best_y, 0.0);

  simd::clamp(a, -y, y, x);
  return y;
}

ConePoint project_linf_cone(std::span<const double> a, double b, double zeta) {
  ConePoint p{Vector(a.size()), 0.0};
  std::vector<double> scratch;
  p.y = project_linf_cone_into(a, b, zeta, p.x, scratch);
  return p;
}

double l1_cone_kkt_residual(std::span<const double> a, double b, double zeta, const ConePoint& p) {
  require(p.x.size() == a.size(), "l1_cone_kkt_residual: dimension mismatch");
  const double l1x = norm1(p.x);
  const double infeasible = std::max(0.0, l1x - p.y);
  if (norm1(a) <= b) {
    return std::max(infeasible, std::max(distance(p.x, a), std::fabs(p.y - b)));
  }
  const double delta = zeta * (l1x - b);
  const Vector shrunk = soft_threshold(a, std::max(delta, 0.0));
  double worst = std::max(infeasible, std::max(0.0, -delta));
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(p.x[i] - shrunk[i]));
  return worst;
}

double linf_cone_kkt_residual(std::span<const double> a, double b, double zeta, const ConePoint& p) {
  require(p.x.size() == a.size(), "linf_cone_kkt_residual: dimension mismatch");
  double g = zeta * (p.y - b);
  double worst = std::max(0.0, -p.y);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double mag = std::fabs(a[i]);
    g += std::min(p.y - mag, 0.0);
    const double expect = std::copysign(std::min(mag, p.y), a[i]);
    worst = std::max(worst, std::fabs(p.x[i] - expect));
  }
  worst = std::max(worst, p.y > 0.0 ? std::fabs(g) : std::max(0.0, -g));
  return worst;
}

void prox_exclusive_sq_disjoint_into(std::span<const double> c, const GroupSet& groups,
                                     double gamma_lambda, std::span<double> out,
                                     std::vector<double>& scratch) {
  require(c.size() == groups.n() && out.size() == groups.n(),
          "prox_exclusive_sq_disjoint: dimension mismatch");
  if (!groups.is_disjoint()) {
    throw PreconditionError("prox_exclusive_sq_disjoint: groups overlap");
  }
  std::copy(c.begin(), c.end(), out.begin());
  thread_local std::vector<double> block_in;
  thread_local std::vector<double> block_out;
  for (const auto& g : groups.groups()) {
    block_in.resize(g.size());
    block_out.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) block_in[k] = c[g[k]];
    project_l1_cone_into(block_in, 0.0, gamma_lambda, block_out, scratch);
    for (std::size_t k = 0; k < g.size(); ++k) out[g[k]] = block_out[k];
  }
}

Vector prox_exclusive_sq_disjoint(std::span<const double> c, const GroupSet& groups,
                                  double gamma_lambda) {
  Vector out(c.size());
  std::vector<double> scratch;
  prox_exclusive_sq_disjoint_into(c, groups, gamma_lambda, out, scratch);
  return out;
}

Vector project_box(std::span<const double> c, double lo, double hi) {
  require(lo <= hi, "project_box: lo > hi");
  Vector out(c.size());
  simd::clamp(c, lo, hi, out);
  return out;
}

std::pair<Vector, Vector> project_nonneg_pair(std::span<const double> c_plus,
                                              std::span<const double> c_minus) {
  require(c_plus.size() == c_minus.size(), "project_nonneg_pair: dimension mismatch");
  constexpr double inf = std::numeric_limits<double>::infinity();
  Vector p(c_plus.size());
  Vector m(c_minus.size());
  simd::clamp(c_plus, 0.0, inf, p);
  simd::clamp(c_minus, 0.0, inf, m);
  return {std::move(p), std::move(m)};
}

Vector soft_threshold(std::span<const double> a, double tau) {
  require(tau >= 0.0, "soft_threshold: tau must be nonnegative");
  Vector out(a.size());
  simd::soft_threshold(a, tau, out);
  return out;
}

}  // namespace exsp
