#include "exsp/esvm.hpp"

#include <cmath>
#include <limits>

#include "exsp/errors.hpp"
#include "exsp/prox.hpp"
#include "exsp/simd/kernels.hpp"

namespace exsp {
namespace {

constexpr double kBoxTol = 1e-12;

void check_box(std::span<const double> u) {
  for (double v : u) {
    require(v >= -kBoxTol && v <= 1.0 + kBoxTol, "dual state: u outside [0, 1]");
  }
}

void check_shape(const EsvmProblem& p, const EsvmDualState& s) {
  require(s.u.size() == p.samples(), "dual state: u must have one entry per sample");
  require(s.v.size() == p.groups().size(), "dual state: one v^g per group required");
  for (std::size_t j = 0; j < s.v.size(); ++j) {
    require(s.v[j].size() == p.groups().group(j).size(), "dual state: v^g length must equal |g|");
  }
}

// r = Z u - sum_g vbar^g over the stacked layout [u; v^1; ...; v^m].
Vector stacked_residual(const EsvmProblem& p, std::span<const double> z) {
  const std::size_t N = p.samples();
  Vector r = matvec(p.Z(), z.subspan(0, N));
  std::size_t pos = N;
  for (const auto& g : p.groups().groups()) {
    for (std::size_t i : g) r[i] -= z[pos++];
  }
  return r;
}

double hinge_sum(const EsvmProblem& p, std::span<const double> w) {
  const Vector margins = matvec_t(p.Z(), w);
  double s = 0.0;
  for (double m : margins) s += std::max(1.0 - m, 0.0);
  return s;
}

}  // namespace

SignedSamples build_signed(const Matrix& X, std::span<const double> labels) {
  require(labels.size() == X.cols(), "build_signed: one label per sample column required");
  SignedSamples s{X};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] == 1.0 || labels[i] == -1.0, "build_signed: labels must be +1 or -1");
  }
  for (std::size_t r = 0; r < X.rows(); ++r) {
    auto row = s.Z.row(r);
    for (std::size_t i = 0; i < labels.size(); ++i) row[i] *= labels[i];
  }
  return s;
}

EsvmProblem::EsvmProblem(Matrix X, Vector labels, GroupSet groups, double alpha, double beta)
    : X_(std::move(X)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      signed_(build_signed(X_, labels_)),
      alpha_(alpha),
      beta_(beta) {
  require(alpha_ > 0.0 && std::isfinite(alpha_), "EsvmProblem: alpha must be positive");
  require(beta_ > 0.0 && std::isfinite(beta_), "EsvmProblem: beta must be positive");
  require(groups_.n() == X_.rows(), "EsvmProblem: groups.n must equal the feature count");
  require(X_.cols() >= 1, "EsvmProblem: at least one sample is required");
}

EsvmDualState EsvmDualState::zero(const EsvmProblem& p) {
  EsvmDualState s;
  s.u.assign(p.samples(), 0.0);
  s.v.reserve(p.groups().size());
  for (const auto& g : p.groups().groups()) s.v.emplace_back(g.size(), 0.0);
  return s;
}

EsvmDualState EsvmDualState::from_stacked(std::span<const double> z, const EsvmProblem& p) {
  require(z.size() == p.samples() + p.groups().total_size(), "dual state: stacked length mismatch");
  EsvmDualState s;
  s.u.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(p.samples()));
  std::size_t pos = p.samples();
  for (const auto& g : p.groups().groups()) {
    s.v.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(pos),
                     z.begin() + static_cast<std::ptrdiff_t>(pos + g.size()));
    pos += g.size();
  }
  return s;
}

Vector EsvmDualState::stacked() const {
  Vector z(u);
  for (const auto& vg : v) z.insert(z.end(), vg.begin(), vg.end());
  return z;
}

Vector dual_residual(const EsvmProblem& p, const EsvmDualState& s) {
  check_shape(p, s);
  return stacked_residual(p, s.stacked());
}

double dual_objective(const EsvmProblem& p, const EsvmDualState& s) {
  check_shape(p, s);
  check_box(s.u);
  const Vector r = stacked_residual(p, s.stacked());
  double value = 0.5 / p.alpha() * norm2_sq(r);
  for (double ui : s.u) value -= ui;
  double vsum = 0.0;
  for (const auto& vg : s.v) {
    const double m = norm_inf(vg);
    vsum += m * m;
  }
  return value + 0.5 / p.beta() * vsum;
}

EsvmDualState dual_gradient(const EsvmProblem& p, const EsvmDualState& s) {
  check_shape(p, s);
  const Vector g = esvm_dual_smooth_part(p).gradient(s.stacked());
  return EsvmDualState::from_stacked(g, p);
}

EsvmDualState dual_prox(const EsvmDualState& candidate, double gamma, double beta) {
  require(gamma > 0.0 && beta > 0.0, "dual_prox: gamma and beta must be positive");
  EsvmDualState out;
  out.u = project_box(candidate.u, 0.0, 1.0);
  out.v.reserve(candidate.v.size());
  for (const auto& d : candidate.v) out.v.push_back(project_linf_cone(d, 0.0, gamma / beta).x);
  return out;
}

Vector recover_primal(const EsvmProblem& p, const EsvmDualState& s) {
  return scaled(dual_residual(p, s), 1.0 / p.alpha());
}

double primal_objective(const EsvmProblem& p, std::span<const double> w) {
  require(w.size() == p.features(), "primal_objective: dimension mismatch");
  return hinge_sum(p, w) + 0.5 * p.alpha() * norm2_sq(w) +
         0.5 * p.beta() * exclusive_norm_sq(w, p.groups());
}

double duality_gap(const EsvmProblem& p, const EsvmDualState& s) {
  const double dual = dual_objective(p, s);
  return primal_objective(p, recover_primal(p, s)) + dual;
}

SmoothPart esvm_dual_smooth_part(const EsvmProblem& p) {
  const std::size_t N = p.samples();
  const std::size_t dim = N + p.groups().total_size();
  SmoothPart F;
  F.value = [&p, N, dim](std::span<const double> z) {
    require(z.size() == dim, "esvm dual: dimension mismatch");
    const Vector r = stacked_residual(p, z);
    double value = 0.5 / p.alpha() * norm2_sq(r);
    for (std::size_t i = 0; i < N; ++i) value -= z[i];
    return value;
  };
  F.value_and_gradient = [&p, N, dim](std::span<const double> z, std::span<double> grad) {
    require(z.size() == dim && grad.size() == dim, "esvm dual: dimension mismatch");
    const Vector r = stacked_residual(p, z);
    const double inv_alpha = 1.0 / p.alpha();
    matvec_t(p.Z(), r, grad.subspan(0, N));
    double value = 0.5 * inv_alpha * norm2_sq(r);
    for (std::size_t i = 0; i < N; ++i) {
      grad[i] = grad[i] * inv_alpha - 1.0;
      value -= z[i];
    }
    std::size_t pos = N;
    for (const auto& g : p.groups().groups()) {
      for (std::size_t i : g) grad[pos++] = -r[i] * inv_alpha;
    }
    return value;
  };
  return F;
}

ProxPart esvm_dual_prox_part(const EsvmProblem& p) {
  const std::size_t N = p.samples();
  ProxPart H;
  H.prox = [&p, N](std::span<const double> c, double gamma, std::span<double> out) {
    simd::clamp(c.subspan(0, N), 0.0, 1.0, out.subspan(0, N));
    std::vector<double> scratch;
    const double zeta = gamma / p.beta();
    std::size_t pos = N;
    for (const auto& g : p.groups().groups()) {
      project_linf_cone_into(c.subspan(pos, g.size()), 0.0, zeta, out.subspan(pos, g.size()),
                             scratch);
      pos += g.size();
    }
  };
  H.value = [&p, N](std::span<const double> z) {
    for (std::size_t i = 0; i < N; ++i) {
      if (z[i] < 0.0 || z[i] > 1.0) return std::numeric_limits<double>::infinity();
    }
    double vsum = 0.0;
    std::size_t pos = N;
    for (const auto& g : p.groups().groups()) {
      const double m = simd::amax(z.subspan(pos, g.size()));
      vsum += m * m;
      pos += g.size();
    }
    return 0.5 / p.beta() * vsum;
  };
  return H;
}

double esvm_dual_lipschitz(const EsvmProblem& p, std::size_t iters) {
  const auto& membership = p.groups().membership();
  Vector tmp(p.samples());
  const double lmax = power_iteration_lipschitz(
      [&](std::span<const double> x, std::span<double> out) {
        matvec_t(p.Z(), x, tmp);
        matvec(p.Z(), tmp, out);
        for (std::size_t i = 0; i < x.size(); ++i) {
          out[i] += static_cast<double>(membership[i]) * x[i];
        }
      },
      p.features(), iters);
  return lmax / p.alpha();
}

EsvmResult solve_fista_licp(const EsvmProblem& p, const SolveConfig& cfg,
                            const EsvmSolveOptions& opts) {
  require(opts.gap_tol > 0.0, "solve_fista_licp: gap_tol must be positive");
  SmoothPart F = esvm_dual_smooth_part(p);
  F.lipschitz_hint = esvm_dual_lipschitz(p);
  const ProxPart H = esvm_dual_prox_part(p);

  double last_gap = std::numeric_limits<double>::infinity();
  const StopCheck certified = [&](std::span<const double> z, std::size_t) {
    const EsvmDualState s = EsvmDualState::from_stacked(z, p);
    const double primal = primal_objective(p, recover_primal(p, s));
    last_gap = primal + dual_objective(p, s);
    return last_gap <= opts.gap_tol * (1.0 + std::fabs(primal));
  };

  const Vector z0(p.samples() + p.groups().total_size(), 0.0);
  SolveResult res = fista_solve(F, H, z0, resolve_fixed_step(cfg, *F.lipschitz_hint), certified,
                                opts.gap_check_every);

  EsvmResult out;
  out.dual = EsvmDualState::from_stacked(res.x, p);
  out.w = recover_primal(p, out.dual);
  out.primal = primal_objective(p, out.w);
  out.gap = out.primal + dual_objective(p, out.dual);
  out.history = std::move(res.history);
  return out;
}

Vector predict(std::span<const double> w, const Matrix& X) {
  require(w.size() == X.rows(), "predict: w length must equal the feature count");
  Vector scores = matvec_t(X, w);
  for (double& s : scores) s = s >= 0.0 ? 1.0 : -1.0;
  return scores;
}

double accuracy(std::span<const double> predicted, std::span<const double> labels) {
  require(predicted.size() == labels.size() && !labels.empty(), "accuracy: size mismatch");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace exsp
