#include "exsp/elasso.hpp"

#include <cmath>
#include <limits>

#include "exsp/errors.hpp"
#include "exsp/prox.hpp"
#include "exsp/simd/kernels.hpp"

namespace exsp {
namespace {

void check_dims(const ElassoProblem& p) {
  require(p.X.rows() == p.y.size(), "ElassoProblem: X rows must equal length of y");
  require(p.groups.n() == p.X.cols(), "ElassoProblem: groups.n must equal X columns");
  require(std::isfinite(p.lambda) && p.lambda >= 0.0, "ElassoProblem: lambda must be finite and >= 0");
}

// r = X w - y
Vector residual(const ElassoProblem& p, std::span<const double> w) {
  Vector r = matvec(p.X, w);
  simd::axpy(-1.0, p.y, r);
  return r;
}

}  // namespace

void ElassoProblem::validate() const {
  check_dims(*this);
  require(lambda > 0.0, "ElassoProblem: lambda must be positive");
}

double elasso_objective(const ElassoProblem& p, std::span<const double> w) {
  check_dims(p);
  require(w.size() == p.features(), "elasso_objective: dimension mismatch");
  const Vector r = residual(p, w);
  return 0.5 * norm2_sq(r) + 0.5 * p.lambda * exclusive_norm_sq(w, p.groups);
}

PcpState PcpState::from_stacked(std::span<const double> z) {
  require(z.size() % 2 == 0, "PcpState: stacked vector must have even length");
  const std::size_t n = z.size() / 2;
  return {Vector(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n)),
          Vector(z.begin() + static_cast<std::ptrdiff_t>(n), z.end())};
}

PcpState PcpState::split(std::span<const double> w) {
  PcpState s{Vector(w.size(), 0.0), Vector(w.size(), 0.0)};
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) s.w_plus[i] = w[i];
    if (w[i] < 0.0) s.w_minus[i] = -w[i];
  }
  return s;
}

Vector PcpState::stacked() const {
  Vector z(w_plus);
  z.insert(z.end(), w_minus.begin(), w_minus.end());
  return z;
}

Vector PcpState::w() const { return sub(w_plus, w_minus); }

double pcp_smooth_value(const ElassoProblem& p, const PcpState& s) {
  check_dims(p);
  require(s.w_plus.size() == p.features() && s.w_minus.size() == p.features(),
          "pcp_smooth_value: dimension mismatch");
  const Vector r = residual(p, s.w());
  const Vector total = add(s.w_plus, s.w_minus);
  return 0.5 * norm2_sq(r) + 0.5 * p.lambda * overlap_quadratic(p.groups, total);
}

PcpGradient pcp_smooth_gradient(const ElassoProblem& p, const PcpState& s) {
  const Vector g = pcp_smooth_part(p).gradient(s.stacked());
  const std::size_t n = p.features();
  return {Vector(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n)),
          Vector(g.begin() + static_cast<std::ptrdiff_t>(n), g.end())};
}

SmoothPart pcp_smooth_part(const ElassoProblem& p) {
  check_dims(p);
  const std::size_t n = p.features();
  SmoothPart F;
  F.value = [&p, n](std::span<const double> z) {
    require(z.size() == 2 * n, "pcp smooth part: dimension mismatch");
    Vector w(n), total(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = z[i] - z[n + i];
      total[i] = z[i] + z[n + i];
    }
    const Vector r = residual(p, w);
    return 0.5 * norm2_sq(r) + 0.5 * p.lambda * overlap_quadratic(p.groups, total);
  };
  F.value_and_gradient = [&p, n](std::span<const double> z, std::span<double> grad) {
    require(z.size() == 2 * n && grad.size() == 2 * n, "pcp smooth part: dimension mismatch");
    Vector w(n), total(n), qs(n), xtr(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = z[i] - z[n + i];
      total[i] = z[i] + z[n + i];
    }
    const Vector r = residual(p, w);
    matvec_t(p.X, r, xtr);
    apply_overlap(p.groups, total, qs);
    for (std::size_t i = 0; i < n; ++i) {
      const double reg = p.lambda * qs[i];
      grad[i] = xtr[i] + reg;
      grad[n + i] = -xtr[i] + reg;
    }
    return 0.5 * norm2_sq(r) + 0.5 * p.lambda * simd::dot(total, qs);
  };
  return F;
}

ProxPart pcp_prox_part() {
  ProxPart H;
  H.prox = [](std::span<const double> c, double, std::span<double> out) {
    simd::clamp(c, 0.0, std::numeric_limits<double>::infinity(), out);
  };
  H.value = [](std::span<const double> z) {
    for (double v : z)
      if (v < 0.0) return std::numeric_limits<double>::infinity();
    return 0.0;
  };
  return H;
}

SmoothPart least_squares_part(const ElassoProblem& p) {
  check_dims(p);
  SmoothPart F;
  F.value = [&p](std::span<const double> w) { return 0.5 * norm2_sq(residual(p, w)); };
  F.value_and_gradient = [&p](std::span<const double> w, std::span<double> grad) {
    const Vector r = residual(p, w);
    matvec_t(p.X, r, grad);
    return 0.5 * norm2_sq(r);
  };
  return F;
}

ProxPart locp_prox_part(const ElassoProblem& p) {
  if (!p.groups.is_disjoint()) {
    throw PreconditionError("FISTA-LOCP requires disjoint groups; use the PCP solver for overlaps");
  }
  ProxPart H;
  H.prox = [&p](std::span<const double> c, double gamma, std::span<double> out) {
    std::vector<double> scratch;
    prox_exclusive_sq_disjoint_into(c, p.groups, gamma * p.lambda, out, scratch);
  };
  H.value = [&p](std::span<const double> w) {
    return 0.5 * p.lambda * exclusive_norm_sq(w, p.groups);
  };
  return H;
}

double gram_norm(const ElassoProblem& p, std::size_t iters) {
  Vector tmp(p.samples());
  return power_iteration_lipschitz(
      [&](std::span<const double> x, std::span<double> out) {
        matvec(p.X, x, tmp);
        matvec_t(p.X, tmp, out);
      },
      p.features(), iters);
}

double pcp_lipschitz(const ElassoProblem& p, std::size_t iters) {
  const double q_norm = power_iteration_lipschitz(
      [&](std::span<const double> x, std::span<double> out) { apply_overlap(p.groups, x, out); },
      p.features(), iters);
  return 2.0 * (gram_norm(p, iters) + p.lambda * q_norm);
}

ElassoResult solve_fista_pcp(const ElassoProblem& p, const SolveConfig& cfg) {
  p.validate();
  SmoothPart F = pcp_smooth_part(p);
  F.lipschitz_hint = pcp_lipschitz(p);
  const ProxPart H = pcp_prox_part();
  SolveResult res =
      fista_solve(F, H, Vector(2 * p.features(), 0.0), resolve_fixed_step(cfg, *F.lipschitz_hint));
  return {PcpState::from_stacked(res.x).w(), std::move(res.history)};
}

ElassoResult solve_fista_locp(const ElassoProblem& p, const SolveConfig& cfg) {
  p.validate();
  const ProxPart H = locp_prox_part(p);
  SmoothPart F = least_squares_part(p);
  F.lipschitz_hint = gram_norm(p);
  SolveResult res =
      fista_solve(F, H, Vector(p.features(), 0.0), resolve_fixed_step(cfg, *F.lipschitz_hint));
  return {std::move(res.x), std::move(res.history)};
}

double locp_fixed_point_residual(const ElassoProblem& p, std::span<const double> w, double gamma) {
  const SmoothPart F = least_squares_part(p);
  const ProxPart H = locp_prox_part(p);
  const Vector g = F.gradient(w);
  Vector c(w.size()), out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) c[i] = w[i] - gamma * g[i];
  H.prox(c, gamma, out);
  return distance(w, out);
}

}  // namespace exsp
