#pragma once

#include "exsp/fista.hpp"
#include "exsp/groups.hpp"
#include "exsp/linalg.hpp"

namespace exsp {

/// Least squares with the squared exclusive norm:
///   1/2 ||X w - y||^2 + (lambda / 2) sum_g ||w_g||_1^2
/// X is N x n (row = sample).
struct ElassoProblem {
  Matrix X;
  Vector y;
  GroupSet groups;
  double lambda = 0.0;

  std::size_t features() const { return X.cols(); }
  std::size_t samples() const { return X.rows(); }

  /// Throws InvalidArgument unless dimensions agree and lambda > 0.
  void validate() const;
};

double elasso_objective(const ElassoProblem& p, std::span<const double> w);

/// Positive/negative split w = w_plus - w_minus used by FISTA-PCP.
struct PcpState {
  Vector w_plus;
  Vector w_minus;

  static PcpState from_stacked(std::span<const double> z);
  static PcpState split(std::span<const double> w);  // complementary supports
  Vector stacked() const;
  Vector w() const;
};

struct PcpGradient {
  Vector plus;
  Vector minus;
};

/// F(w+, w-) = 1/2 ||X(w+ - w-) - y||^2 + (lambda/2) (w+ + w-)^T Q (w+ + w-).
double pcp_smooth_value(const ElassoProblem& p, const PcpState& s);

/// grad+ =  X^T (X w - y) + lambda Q (w+ + w-)
/// grad- = -X^T (X w - y) + lambda Q (w+ + w-)
PcpGradient pcp_smooth_gradient(const ElassoProblem& p, const PcpState& s);

/// Engine adapters. Returned parts reference `p`, which must outlive them.
SmoothPart pcp_smooth_part(const ElassoProblem& p);
ProxPart pcp_prox_part();
SmoothPart least_squares_part(const ElassoProblem& p);
ProxPart locp_prox_part(const ElassoProblem& p);

/// ||X^T X|| by power iteration.
double gram_norm(const ElassoProblem& p, std::size_t iters = 200);
/// 2 (||X^T X|| + lambda ||Q||): bounds the Hessian of the split objective.
double pcp_lipschitz(const ElassoProblem& p, std::size_t iters = 200);

struct ElassoResult {
  Vector w;
  SolveHistory history;
};

/// FISTA on the positive/negative split with H the nonnegative-orthant
/// indicator. Any group structure, overlaps included. x0 = 0.
ElassoResult solve_fista_pcp(const ElassoProblem& p, const SolveConfig& cfg);

/// FISTA with the exclusive prox of disjoint groups. Throws
/// PreconditionError when groups overlap. x0 = 0.
ElassoResult solve_fista_locp(const ElassoProblem& p, const SolveConfig& cfg);

/// ||w - prox_{gamma H}(w - gamma grad f(w))|| for disjoint groups.
double locp_fixed_point_residual(const ElassoProblem& p, std::span<const double> w, double gamma);

}  // namespace exsp
