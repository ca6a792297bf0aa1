#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "exsp/linalg.hpp"

namespace exsp {

/// Smooth part F of a composite objective F + H.
struct SmoothPart {
  std::function<double(std::span<const double> x)> value;
  /// Writes grad F(x) into `grad` and returns F(x).
  std::function<double(std::span<const double> x, std::span<double> grad)> value_and_gradient;
  /// Upper bound on the Lipschitz constant of grad F, when known.
  std::optional<double> lipschitz_hint;

  Vector gradient(std::span<const double> x) const;
};

/// Prox-friendly part H.
struct ProxPart {
  /// out = argmin_x 1/2 ||x - c||^2 + gamma H(x)
  std::function<void(std::span<const double> c, double gamma, std::span<double> out)> prox;
  /// H(x); +inf outside the domain of an indicator.
  std::function<double(std::span<const double> x)> value;
};

/// gamma fixed for the whole run.
struct FixedStep {
  double gamma = 0.0;
};

/// Backtracking on the local Lipschitz estimate L: trial L_j = eta^j L until
/// the quadratic upper bound holds at the prox point. The accepted L seeds the
/// next iteration after multiplication by `decrease`.
struct Backtracking {
  double L0 = 0.0;  // <= 0: 1.1 x SmoothPart::lipschitz_hint (1.0 without a hint)
  double eta = 2.0;
  double decrease = 0.9;
};

enum class MomentumRule {
  standard,  // t+ = (1 + sqrt(1 + 4 t^2)) / 2
  printed,   // t+ = (1 + sqrt(1 + 4 t)) / 2, kept for comparison runs only
};

struct SolveConfig {
  std::size_t max_iters = 100000;
  double rel_tol = 1e-8;
  std::variant<FixedStep, Backtracking> step = Backtracking{};
  MomentumRule momentum = MomentumRule::standard;
  std::optional<std::uint64_t> seed;  // power-iteration start vector
  bool record_history = true;

  void validate() const;
};

/// Copy of `cfg` where a FixedStep with gamma <= 0 becomes gamma = 1 / lipschitz.
SolveConfig resolve_fixed_step(SolveConfig cfg, double lipschitz);

enum class Termination { converged, max_iters, stopped };

std::string_view termination_name(Termination t);

struct IterationRecord {
  std::size_t k = 0;
  double objective = 0.0;  // F + H at the accepted iterate
  double step = 0.0;       // gamma_k
  double momentum = 0.0;   // t_k after the update
  double rel_change = 0.0;  // ||x_k - x_{k-1}|| / max(1, ||x_{k-1}||)
  double wall_seconds = 0.0;
};

struct SolveHistory {
  std::vector<IterationRecord> records;
  Termination reason = Termination::max_iters;
  std::size_t iterations = 0;
  double final_objective = 0.0;

  /// Running minimum of the recorded objectives.
  std::vector<double> best_so_far() const;
};

/// Columns: k,objective,step,momentum,rel_change,wall_seconds (header row first).
void write_history_csv(std::ostream& os, const SolveHistory& history);

struct SolveResult {
  Vector x;
  SolveHistory history;
};

/// Optional early-exit test evaluated on the current iterate.
using StopCheck = std::function<bool(std::span<const double> x, std::size_t k)>;

/// Accelerated proximal gradient:
///   x_k     = prox_{gamma H}(xbar - gamma grad F(xbar))
///   t_k     = (1 + sqrt(1 + 4 t_{k-1}^2)) / 2
///   xbar    = x_k + ((t_{k-1} - 1) / t_k) (x_k - x_{k-1})
/// from t_0 = 1, xbar = x_0. Stops when the relative iterate change drops to
/// rel_tol, when `stop` returns true (checked every `check_every` iterations),
/// or after max_iters. Throws NumericalError on a non-finite objective or
/// gradient.
SolveResult fista_solve(const SmoothPart& F, const ProxPart& H, Vector x0, const SolveConfig& cfg,
                        const StopCheck& stop = {}, std::size_t check_every = 1);

/// One momentum update from t.
double next_momentum(double t, MomentumRule rule = MomentumRule::standard);

struct BacktrackResult {
  double gamma = 0.0;  // 1 / L_accepted
  double L = 0.0;
  Vector point;        // prox_{gamma H}(xbar - gamma grad F(xbar))
  double smooth_value = 0.0;  // F(point)
  std::size_t trials = 0;
};

/// Smallest j >= 0 such that, with L_j = eta^j L and
/// p = prox_{H/L_j}(xbar - grad F(xbar) / L_j),
///   F(p) <= F(xbar) + <grad F(xbar), p - xbar> + L_j/2 ||p - xbar||^2.
/// When the left and right sides differ by rounding noise only, the test falls
/// back to <grad F(p) - grad F(xbar), p - xbar> <= L_j ||p - xbar||^2.
/// Throws NumericalError after `max_trials` rejections.
BacktrackResult backtracking_step(const SmoothPart& F, const ProxPart& H,
                                  std::span<const double> xbar, double f_xbar,
                                  std::span<const double> grad_xbar, double L, double eta,
                                  std::size_t max_trials = 100);

/// Largest eigenvalue of a symmetric PSD operator by power iteration from a
/// seeded Gaussian start. Returns the final Rayleigh quotient; 0 for the zero
/// operator.
double power_iteration_lipschitz(
    const std::function<void(std::span<const double>, std::span<double>)>& apply, std::size_t dim,
    std::size_t iters, std::uint64_t seed = 0x5eed);

}  // namespace exsp
