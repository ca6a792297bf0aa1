#pragma once

#include <span>
#include <utility>
#include <vector>

#include "exsp/linalg.hpp"

namespace exsp {

class GroupSet;

/// Point (x, y) returned by the weighted cone projections.
struct ConePoint {
  Vector x;
  double y = 0.0;
};

/// 1/2 ||x - a||^2 + zeta/2 (y - b)^2, the objective both cone projections minimize.
double cone_objective(std::span<const double> x, double y, std::span<const double> a, double b,
                      double zeta);

/// Weighted projection onto the l1-norm cone {(x, y) : ||x||_1 <= y}:
///   argmin 1/2 ||x - a||^2 + zeta/2 (y - b)^2  s.t. ||x||_1 <= y.
///
/// Takes |a| in decreasing order (popped from a heap) and stops at the
/// watershed index j whose
/// threshold delta_j = (sum_{i<=j} |a|_(i) - b) / (1/zeta + j) falls inside
/// [|a|_(j+1), |a|_(j)]; then x = soft_threshold(a, delta_j), y = ||x||_1.
/// Returns (a, b) when ||a||_1 <= b, and (0, 0) when b <= 0 and
/// -zeta b >= ||a||_inf. O(d + j log d).
ConePoint project_l1_cone(std::span<const double> a, double b, double zeta);

/// Weighted projection onto the l-infinity-norm cone {(x, y) : ||x||_inf <= y}.
///
/// Returns (0, 0) when zeta b + ||a||_1 <= 0 and (a, b) when b >= ||a||_inf.
/// Otherwise, with |a| sorted increasingly, scans j = d-1 .. 0 (largest first,
/// popped from a heap) for
/// y = (zeta b + sum_{i>j} |a|_(i)) / (zeta + d - j) inside (|a|_(j), |a|_(j+1)],
/// then x_i = sgn(a_i) min(|a_i|, y). O(d + (d - j) log d).
ConePoint project_linf_cone(std::span<const double> a, double b, double zeta);

/// In-place forms used by the solvers' per-group loops. `scratch` is resized
/// as needed and may be reused across calls. Return y.
double project_l1_cone_into(std::span<const double> a, double b, double zeta,
                            std::span<double> x, std::vector<double>& scratch);
double project_linf_cone_into(std::span<const double> a, double b, double zeta,
                              std::span<double> x, std::vector<double>& scratch);

/// Optimality residual of an l1-cone output: zero for the pass-through case,
/// otherwise the largest of ||x - soft_threshold(a, delta)||_inf with
/// delta = zeta (||x||_1 - b), max(0, -delta) and the cone infeasibility.
double l1_cone_kkt_residual(std::span<const double> a, double b, double zeta, const ConePoint& p);

/// Residual of the scalar stationarity condition
///   zeta (y - b) + sum_i min(y - |a_i|, 0) = 0  (y > 0),   >= 0  (y = 0)
/// together with ||x - sgn(a) min(|a|, y)||_inf.
double linf_cone_kkt_residual(std::span<const double> a, double b, double zeta, const ConePoint& p);

/// argmin_w 1/2 ||w - c||^2 + (gamma_lambda / 2) sum_g ||w_g||_1^2 for disjoint
/// groups: each block is the x-part of project_l1_cone(c_g, 0, gamma_lambda);
/// ungrouped coordinates pass through. Throws PreconditionError on overlap.
Vector prox_exclusive_sq_disjoint(std::span<const double> c, const GroupSet& groups,
                                  double gamma_lambda);
void prox_exclusive_sq_disjoint_into(std::span<const double> c, const GroupSet& groups,
                                     double gamma_lambda, std::span<double> out,
                                     std::vector<double>& scratch);

Vector project_box(std::span<const double> c, double lo, double hi);

std::pair<Vector, Vector> project_nonneg_pair(std::span<const double> c_plus,
                                              std::span<const double> c_minus);

/// sgn(a_i) max(0, |a_i| - tau).
Vector soft_threshold(std::span<const double> a, double tau);

}  // namespace exsp
