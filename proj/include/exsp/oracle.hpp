#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "exsp/esvm.hpp"
#include "exsp/fista.hpp"
#include "exsp/linalg.hpp"

namespace exsp {

/// Result of a brute-force reference computation, with the budget it used.
struct OracleReport {
  double objective = 0.0;
  Vector argmin;
  double scalar = 0.0;      // y-part for the cone oracles
  double resolution = 0.0;  // grid step of the scan (cone oracles)
  std::size_t budget = 0;   // grid points or iterations allowed
  std::size_t used = 0;     // grid points evaluated or iterations run
  std::vector<double> trace;  // per-iteration objective, when requested
};

/// Scans delta over [0, 1.1 max|a_i|] with x = soft_threshold(a, delta) and
/// y = max(||x||_1, b), resolution * interval apart, then refines around the
/// best cell by golden section to 1e-9 of the interval. `budget` counts grid
/// and refinement evaluations. Requires d <= 16.
OracleReport oracle_l1_cone(std::span<const double> a, double b, double zeta,
                            double grid_resolution = 1e-4);

/// Scans y over [0, 1.1 max(||a||_inf, b)] with x = clip(a, -y, y), then
/// refines the same way. Requires d <= 16.
OracleReport oracle_linf_cone(std::span<const double> a, double b, double zeta,
                              double grid_resolution = 1e-4);

struct IstaOptions {
  bool record_trace = false;
  /// Stop before `iters` once ||x_k - x_{k-1}|| <= stall_tol * max(1, ||x_k||).
  /// 0 stops only at an exact fixed point.
  double stall_tol = 0.0;
};

/// Plain proximal gradient x <- prox_{gamma H}(x - gamma grad F(x)) from x0.
/// Throws NumericalError on a non-finite iterate.
OracleReport oracle_ista(const SmoothPart& F, const ProxPart& H, Vector x0, double gamma,
                         std::size_t iters, const IstaOptions& opts = {});

enum class StepKind {
  diminishing,      // c / sqrt(k)
  strongly_convex,  // 1 / (alpha k), ignores c
  polyak_level,     // (f_k - level) / ||g_k||^2 with level = best - delta
};

/// For polyak_level, delta starts at f(0) / 2 and is multiplied by `shrink`
/// (returning to the best point) after `patience` iterations without a
/// decrease of delta / 2 below the best value.
struct StepRule {
  StepKind kind = StepKind::diminishing;
  double c = 1.0;
  std::size_t patience = 500;
  double shrink = 0.7;
};

/// Subgradient descent on the primal E-SVM objective from w = 0, keeping the
/// best iterate. Hinge subgradient is 0 at the kink; the exclusive term uses
/// beta ||w_g||_1 sgn(w_g) per group with sgn(0) = 0.
OracleReport oracle_esvm_subgradient(const EsvmProblem& p, std::size_t iters,
                                     const StepRule& rule);

/// Best of the diminishing rule at c in {0.1, 1, 10} / ||Z||, the strongly
/// convex rule and the level rule, each with `iters` iterations.
OracleReport oracle_esvm_best(const EsvmProblem& p, std::size_t iters);

/// Primal objective without sharing the solver's code path.
double oracle_esvm_primal(const EsvmProblem& p, std::span<const double> w);

/// Largest singular value by dense SVD. Requires both dimensions <= 500 and
/// finite entries.
double dense_spectral_norm(const Matrix& A);

}  // namespace exsp
