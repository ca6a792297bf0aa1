#include "exsp/fista.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "exsp/errors.hpp"
#include "exsp/rng.hpp"
#include "exsp/simd/kernels.hpp"

namespace exsp {
namespace {

// Below this size the remainder F(p) - F(xbar) - <g, d> is rounding noise and
// cannot decide the majorization test either way.
double remainder_noise(double f) { return 1e-12 * std::max(1.0, std::fabs(f)); }

}  // namespace

Vector SmoothPart::gradient(std::span<const double> x) const {
  Vector g(x.size());
  value_and_gradient(x, g);
  return g;
}

void SolveConfig::validate() const {
  require(max_iters >= 1, "SolveConfig: max_iters must be at least 1");
  require(rel_tol > 0.0, "SolveConfig: rel_tol must be positive");
  if (const auto* fixed = std::get_if<FixedStep>(&step)) {
    require(fixed->gamma > 0.0, "SolveConfig: fixed step must be positive");
  } else {
    const auto& bt = std::get<Backtracking>(step);
    require(bt.eta > 1.0, "SolveConfig: backtracking eta must exceed 1");
    require(bt.decrease > 0.0 && bt.decrease <= 1.0, "SolveConfig: decrease must be in (0, 1]");
  }
}

SolveConfig resolve_fixed_step(SolveConfig cfg, double lipschitz) {
  if (auto* fixed = std::get_if<FixedStep>(&cfg.step); fixed != nullptr && !(fixed->gamma > 0.0)) {
    require(lipschitz > 0.0, "resolve_fixed_step: Lipschitz constant must be positive");
    fixed->gamma = 1.0 / lipschitz;
  }
  return cfg;
}

std::string_view termination_name(Termination t) {
  switch (t) {
    case Termination::converged:
      return "converged";
    case Termination::max_iters:
      return "max_iters";
    case Termination::stopped:
      return "stopped";
  }
  return "unknown";
}

std::vector<double> SolveHistory::best_so_far() const {
  std::vector<double> out;
  out.reserve(records.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    best = std::min(best, r.objective);
    out.push_back(best);
  }
  return out;
}

void write_history_csv(std::ostream& os, const SolveHistory& history) {
  const auto old_precision = os.precision(17);
  os << "k,objective,step,momentum,rel_change,wall_seconds\n";
  for (const auto& r : history.records) {
    os << r.k << ',' << r.objective << ',' << r.step << ',' << r.momentum << ',' << r.rel_change
       << ',' << r.wall_seconds << '\n';
  }
  os.precision(old_precision);
}

double next_momentum(double t, MomentumRule rule) {
  const double inner = rule == MomentumRule::standard ? t * t : t;
  return 0.5 + 0.5 * std::sqrt(1.0 + 4.0 * inner);
}

BacktrackResult backtracking_step(const SmoothPart& F, const ProxPart& H,
                                  std::span<const double> xbar, double f_xbar,
                                  std::span<const double> grad_xbar, double L, double eta,
                                  std::size_t max_trials) {
  require(L > 0.0, "backtracking_step: L must be positive");
  require(eta > 1.0, "backtracking_step: eta must exceed 1");
  const std::size_t n = xbar.size();
  Vector c(n);
  Vector grad_p;
  BacktrackResult res;
  res.point.resize(n);
  for (std::size_t trial = 0; trial < max_trials; ++trial) {
    const double gamma = 1.0 / L;
    for (std::size_t i = 0; i < n; ++i) c[i] = xbar[i] - gamma * grad_xbar[i];
    H.prox(c, gamma, res.point);
    const double f_p = F.value(res.point);
    double lin = 0.0;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = res.point[i] - xbar[i];
      lin += grad_xbar[i] * d;
      sq += d * d;
    }
    if (!std::isfinite(f_p)) {
      throw NumericalError("backtracking_step: non-finite objective at trial point");
    }
    const double remainder = f_p - f_xbar - lin;
    bool accept = false;
    if (std::fabs(remainder) > remainder_noise(f_xbar)) {
      accept = remainder <= 0.5 * L * sq;
    } else {
      // Curvature along d from gradients, which keeps its precision near a
      // minimizer: <grad F(p) - grad F(xbar), d> <= L ||d||^2.
      grad_p.resize(n);
      F.value_and_gradient(res.point, grad_p);
      double curv = 0.0;
      for (std::size_t i = 0; i < n; ++i) curv += (grad_p[i] - grad_xbar[i]) * (res.point[i] - xbar[i]);
      accept = curv <= L * sq;
    }
    if (accept) {
      res.gamma = gamma;
      res.L = L;
      res.smooth_value = f_p;
      res.trials = trial + 1;
      return res;
    }
    L *= eta;
  }
  throw NumericalError("backtracking_step: no acceptable step within the trial cap");
}

SolveResult fista_solve(const SmoothPart& F, const ProxPart& H, Vector x0, const SolveConfig& cfg,
                        const StopCheck& stop, std::size_t check_every) {
  cfg.validate();
  const std::size_t n = x0.size();
  const auto start = std::chrono::steady_clock::now();

  SolveResult out;
  auto& hist = out.history;
  Vector x_old = std::move(x0);
  Vector x_new(n);
  Vector xbar = x_old;
  Vector grad(n);
  Vector c(n);

  const auto* fixed = std::get_if<FixedStep>(&cfg.step);
  const auto* bt = std::get_if<Backtracking>(&cfg.step);
  double L = 0.0;
  if (bt != nullptr) {
    L = bt->L0 > 0.0 ? bt->L0 : 1.1 * F.lipschitz_hint.value_or(1.0 / 1.1);
    if (!(L > 0.0)) L = 1.0;
  }

  double t_old = 1.0;
  hist.reason = Termination::max_iters;
  if (check_every == 0) check_every = 1;

  for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
    const double f_bar = F.value_and_gradient(xbar, grad);
    if (!std::isfinite(f_bar) || !all_finite(grad)) {
      throw NumericalError("fista_solve: non-finite smooth value or gradient at iteration " +
                           std::to_string(k));
    }

    double gamma = 0.0;
    double f_new = 0.0;
    if (fixed != nullptr) {
      gamma = fixed->gamma;
      for (std::size_t i = 0; i < n; ++i) c[i] = xbar[i] - gamma * grad[i];
      H.prox(c, gamma, x_new);
      f_new = F.value(x_new);
    } else {
      auto res = backtracking_step(F, H, xbar, f_bar, grad, L, bt->eta);
      gamma = res.gamma;
      f_new = res.smooth_value;
      x_new = std::move(res.point);
      L = res.L * bt->decrease;
    }

    const double objective = f_new + H.value(x_new);
    if (!std::isfinite(objective)) {
      throw NumericalError("fista_solve: non-finite objective at iteration " + std::to_string(k) +
                           " (step size too large?)");
    }

    const double t_new = next_momentum(t_old, cfg.momentum);
    const double beta = (t_old - 1.0) / t_new;
    double diff_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x_new[i] - x_old[i];
      diff_sq += d * d;
      xbar[i] = x_new[i] + beta * d;
    }
    const double rel_change = std::sqrt(diff_sq) / std::max(1.0, norm2(x_old));

    hist.iterations = k;
    hist.final_objective = objective;
    if (cfg.record_history) {
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      hist.records.push_back({k, objective, gamma, t_new, rel_change, wall});
    }

    std::swap(x_old, x_new);
    t_old = t_new;

    if (rel_change <= cfg.rel_tol) {
      hist.reason = Termination::converged;
      break;
    }
    if (stop && k % check_every == 0 && stop(x_old, k)) {
      hist.reason = Termination::stopped;
      break;
    }
  }

  out.x = std::move(x_old);
  return out;
}

double power_iteration_lipschitz(
    const std::function<void(std::span<const double>, std::span<double>)>& apply, std::size_t dim,
    std::size_t iters, std::uint64_t seed) {
  require(dim >= 1, "power_iteration_lipschitz: dim must be positive");
  Rng rng(seed);
  Vector x(dim);
  for (auto& v : x) v = rng.normal();
  double nx = norm2(x);
  for (auto& v : x) v /= nx;
  Vector y(dim);
  double lambda = 0.0;
  for (std::size_t it = 0; it < std::max<std::size_t>(iters, 1); ++it) {
    apply(x, y);
    lambda = simd::dot(x, y);
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    for (std::size_t i = 0; i < dim; ++i) x[i] = y[i] / ny;
  }
  // Rayleigh quotient at the final normalized iterate.
  apply(x, y);
  lambda = simd::dot(x, y);
  return std::max(lambda, 0.0);
}

}  // namespace exsp
