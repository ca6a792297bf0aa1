#pragma once

#include <vector>

#include "exsp/fista.hpp"
#include "exsp/groups.hpp"
#include "exsp/linalg.hpp"

namespace exsp {

/// Label-scaled samples: column i of Z is label_i * X_i.
struct SignedSamples {
  Matrix Z;  // n x N
};

/// Throws InvalidArgument for a label other than +1 / -1 or a size mismatch.
SignedSamples build_signed(const Matrix& X, std::span<const double> labels);

/// Hinge-loss SVM with an l2 and a squared exclusive penalty:
///   sum_i max(1 - Z_i^T w, 0) + alpha/2 ||w||^2 + beta/2 sum_g ||w_g||_1^2
/// Samples are columns (X is n features x N samples). No intercept.
class EsvmProblem {
 public:
  EsvmProblem(Matrix X, Vector labels, GroupSet groups, double alpha, double beta);

  const Matrix& X() const { return X_; }
  const Vector& labels() const { return labels_; }
  const GroupSet& groups() const { return groups_; }
  const Matrix& Z() const { return signed_.Z; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  std::size_t features() const { return X_.rows(); }
  std::size_t samples() const { return X_.cols(); }

 private:
  Matrix X_;
  Vector labels_;
  GroupSet groups_;
  SignedSamples signed_;
  double alpha_;
  double beta_;
};

/// Dual variables: u per sample, v^g per group (length |g|).
struct EsvmDualState {
  Vector u;
  std::vector<Vector> v;

  static EsvmDualState zero(const EsvmProblem& p);
  /// Layout for the engine: u first, then each v^g in group order.
  static EsvmDualState from_stacked(std::span<const double> z, const EsvmProblem& p);
  Vector stacked() const;
};

/// Z u - sum_g vbar^g, with vbar^g the zero-extension of v^g to n entries.
Vector dual_residual(const EsvmProblem& p, const EsvmDualState& s);

/// 1/(2 alpha) ||Z u - sum_g vbar^g||^2 - 1^T u + 1/(2 beta) sum_g ||v^g||_inf^2.
/// The box indicator on u is checked, not added: throws InvalidArgument when u
/// leaves [0, 1] by more than 1e-12.
double dual_objective(const EsvmProblem& p, const EsvmDualState& s);

/// Gradient of the smooth part, r = Z u - sum_g vbar^g:
///   d/du = Z^T r / alpha - 1,   d/dv^g = -r_g / alpha.
EsvmDualState dual_gradient(const EsvmProblem& p, const EsvmDualState& s);

/// Prox of gamma * H: u = clamp(c, 0, 1) and
/// v^g = x-part of project_linf_cone(d^g, 0, gamma / beta).
EsvmDualState dual_prox(const EsvmDualState& candidate, double gamma, double beta);

/// w = (Z u - sum_g vbar^g) / alpha.
Vector recover_primal(const EsvmProblem& p, const EsvmDualState& s);

double primal_objective(const EsvmProblem& p, std::span<const double> w);

/// primal_objective(recover_primal(s)) + dual_objective(s); >= 0 by weak duality.
double duality_gap(const EsvmProblem& p, const EsvmDualState& s);

/// Engine adapters over the stacked dual layout. They reference `p`.
SmoothPart esvm_dual_smooth_part(const EsvmProblem& p);
ProxPart esvm_dual_prox_part(const EsvmProblem& p);

/// lambda_max(Z Z^T + E E^T) / alpha, with E E^T = diag(group membership);
/// bounds the Hessian of the dual smooth part.
double esvm_dual_lipschitz(const EsvmProblem& p, std::size_t iters = 200);

struct EsvmSolveOptions {
  double gap_tol = 1e-4;  // stop when gap <= gap_tol * (1 + |primal|)
  std::size_t gap_check_every = 10;
};

struct EsvmResult {
  Vector w;
  EsvmDualState dual;
  SolveHistory history;
  double primal = 0.0;
  double gap = 0.0;
};

/// FISTA on the dual with box/l-infinity-cone prox steps; overlapping groups allowed.
EsvmResult solve_fista_licp(const EsvmProblem& p, const SolveConfig& cfg,
                            const EsvmSolveOptions& opts = {});

/// sign(w^T X_i) per column, with sign(0) = +1.
Vector predict(std::span<const double> w, const Matrix& X);
double accuracy(std::span<const double> predicted, std::span<const double> labels);

}  // namespace exsp
