#include "exsp/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "exsp/errors.hpp"

namespace exsp {
namespace {

constexpr double kGridMargin = 0.1;
constexpr double kRefineTol = 1e-9;
constexpr std::size_t kMaxConeDim = 16;

double sq_dist(std::span<const double> x, std::span<const double> a) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - a[i]) * (x[i] - a[i]);
  return s;
}

struct Scan {
  double t = 0.0;
  double value = 0.0;
  std::size_t points = 0;
};

// Grid over [0, T] followed by golden section inside the best grid cell's
// neighbourhood. Keeps whichever of the two is lower.
Scan scan_then_refine(const std::function<double(double)>& phi, double T, double resolution) {
  Scan best{0.0, phi(0.0), 1};
  if (!(T > 0.0)) return best;
  const auto cells = static_cast<std::size_t>(std::ceil(1.0 / resolution));
  const double h = T / static_cast<double>(cells);
  for (std::size_t i = 1; i <= cells; ++i) {
    const double t = h * static_cast<double>(i);
    const double v = phi(t);
    if (v < best.value) best = {t, v, best.points};
  }
  best.points = cells + 1;

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::max(0.0, best.t - h);
  double hi = std::min(T, best.t + h);
  double c = hi - invphi * (hi - lo);
  double d = lo + invphi * (hi - lo);
  double fc = phi(c);
  double fd = phi(d);
  best.points += 2;
  while (hi - lo > kRefineTol * T) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - invphi * (hi - lo);
      fc = phi(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + invphi * (hi - lo);
      fd = phi(d);
    }
    ++best.points;
  }
  const double t = 0.5 * (lo + hi);
  const double v = phi(t);
  ++best.points;
  if (v < best.value) {
    best.t = t;
    best.value = v;
  }
  return best;
}

// Evaluations scan_then_refine may spend: the grid, then a bracket of two grid
// cells shrunk by the golden ratio down to kRefineTol.
std::size_t scan_budget(double resolution) {
  const auto cells = static_cast<std::size_t>(std::ceil(1.0 / resolution));
  const double shrink = std::log(2.0 * resolution / kRefineTol) / std::log((1.0 + std::sqrt(5.0)) / 2.0);
  return cells + 1 + 3 + static_cast<std::size_t>(std::ceil(std::max(shrink, 0.0))) + 1;
}

void soft(std::span<const double> a, double delta, std::span<double> x) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double m = std::fabs(a[i]) - delta;
    x[i] = m > 0.0 ? std::copysign(m, a[i]) : 0.0;
  }
}

void clip(std::span<const double> a, double y, std::span<double> x) {
  for (std::size_t i = 0; i < a.size(); ++i) x[i] = std::clamp(a[i], -y, y);
}

double l1_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::fabs(v);
  return s;
}

void check_cone_input(std::span<const double> a, double b, double zeta, double resolution) {
  require(a.size() <= kMaxConeDim, "cone oracle: dimension must be <= 16");
  require(zeta > 0.0 && std::isfinite(zeta), "cone oracle: zeta must be positive");
  require(std::isfinite(b), "cone oracle: b must be finite");
  require(resolution > 0.0 && resolution < 1.0, "cone oracle: resolution must lie in (0, 1)");
  for (double v : a) require(std::isfinite(v), "cone oracle: a must be finite");
}

double spectral_norm_by_power(const Matrix& Z) {
  Vector v(Z.cols(), 1.0), zv(Z.rows()), next(Z.cols());
  double sigma_sq = 0.0;
  for (int it = 0; it < 300; ++it) {
    const double nv = norm2(v);
    if (nv == 0.0) return 0.0;
    for (double& x : v) x /= nv;
    matvec(Z, v, zv);
    matvec_t(Z, zv, next);
    sigma_sq = dot(v, next);
    v.swap(next);
  }
  return std::sqrt(std::max(sigma_sq, 0.0));
}

}  // namespace

OracleReport oracle_l1_cone(std::span<const double> a, double b, double zeta,
                            double grid_resolution) {
  check_cone_input(a, b, zeta, grid_resolution);
  Vector x(a.size());
  const auto phi = [&](double delta) {
    soft(a, delta, x);
    const double y = std::max(l1_of(x), b);
    return 0.5 * sq_dist(x, a) + 0.5 * zeta * (y - b) * (y - b);
  };
  double amax = 0.0;
  for (double v : a) amax = std::max(amax, std::fabs(v));
  const double T = amax * (1.0 + kGridMargin);
  const Scan s = scan_then_refine(phi, T, grid_resolution);

  OracleReport r;
  r.argmin.resize(a.size());
  soft(a, s.t, r.argmin);
  r.scalar = std::max(l1_of(r.argmin), b);
  r.objective = s.value;
  r.resolution = grid_resolution * T;
  r.budget = scan_budget(grid_resolution);
  r.used = s.points;
  return r;
}

OracleReport oracle_linf_cone(std::span<const double> a, double b, double zeta,
                              double grid_resolution) {
  check_cone_input(a, b, zeta, grid_resolution);
  Vector x(a.size());
  const auto phi = [&](double y) {
    clip(a, y, x);
    return 0.5 * sq_dist(x, a) + 0.5 * zeta * (y - b) * (y - b);
  };
  double amax = 0.0;
  for (double v : a) amax = std::max(amax, std::fabs(v));
  const double T = std::max(amax, b) * (1.0 + kGridMargin);
  const Scan s = scan_then_refine(phi, T, grid_resolution);

  OracleReport r;
  r.argmin.resize(a.size());
  clip(a, s.t, r.argmin);
  r.scalar = s.t;
  r.objective = s.value;
  r.resolution = grid_resolution * std::max(T, 0.0);
  r.budget = scan_budget(grid_resolution);
  r.used = s.points;
  return r;
}

OracleReport oracle_ista(const SmoothPart& F, const ProxPart& H, Vector x0, double gamma,
                         std::size_t iters, const IstaOptions& opts) {
  require(gamma > 0.0 && std::isfinite(gamma), "oracle_ista: gamma must be positive");
  require(opts.stall_tol >= 0.0, "oracle_ista: stall_tol must be >= 0");
  const std::size_t dim = x0.size();
  Vector x = std::move(x0), grad(dim), c(dim), next(dim);
  OracleReport r;
  r.budget = iters;
  if (opts.record_trace) r.trace.reserve(iters);
  for (std::size_t k = 1; k <= iters; ++k) {
    F.value_and_gradient(x, grad);
    for (std::size_t i = 0; i < dim; ++i) c[i] = x[i] - gamma * grad[i];
    H.prox(c, gamma, next);
    double change = 0.0, size = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      if (!std::isfinite(next[i])) throw NumericalError("oracle_ista: iterate became non-finite");
      change += (next[i] - x[i]) * (next[i] - x[i]);
      size += next[i] * next[i];
    }
    x.swap(next);
    r.used = k;
    if (opts.record_trace) r.trace.push_back(F.value(x) + H.value(x));
    const double limit = opts.stall_tol * std::max(1.0, std::sqrt(size));
    if (change == 0.0 || std::sqrt(change) <= limit) break;
  }
  r.objective = F.value(x) + H.value(x);
  if (!std::isfinite(r.objective)) throw NumericalError("oracle_ista: objective is non-finite");
  r.argmin = std::move(x);
  return r;
}

double oracle_esvm_primal(const EsvmProblem& p, std::span<const double> w) {
  require(w.size() == p.features(), "oracle_esvm_primal: dimension mismatch");
  const Vector margins = matvec_t(p.Z(), w);
  double hinge = 0.0;
  for (double m : margins) hinge += std::max(1.0 - m, 0.0);
  double sq = 0.0;
  for (double v : w) sq += v * v;
  double excl = 0.0;
  for (const auto& g : p.groups().groups()) {
    double s = 0.0;
    for (std::size_t i : g) s += std::fabs(w[i]);
    excl += s * s;
  }
  return hinge + 0.5 * p.alpha() * sq + 0.5 * p.beta() * excl;
}

OracleReport oracle_esvm_subgradient(const EsvmProblem& p, std::size_t iters,
                                     const StepRule& rule) {
  require(rule.kind != StepKind::diminishing || (rule.c > 0.0 && std::isfinite(rule.c)),
          "oracle_esvm_subgradient: step constant must be positive");
  require(rule.kind != StepKind::polyak_level ||
              (rule.patience >= 1 && rule.shrink > 0.0 && rule.shrink < 1.0),
          "oracle_esvm_subgradient: level rule needs patience >= 1 and shrink in (0, 1)");
  const std::size_t n = p.features();
  const std::size_t N = p.samples();
  const Matrix& Z = p.Z();
  Vector w(n, 0.0), g(n), active(N), margins(N), pull(n);

  OracleReport r;
  r.budget = iters;
  r.objective = oracle_esvm_primal(p, w);
  r.argmin = w;
  double delta = 0.5 * r.objective;
  double level_best = r.objective;
  std::size_t stall = 0;
  for (std::size_t k = 1; k <= iters; ++k) {
    r.used = k;
    matvec_t(Z, w, margins);
    double hinge = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double slack = 1.0 - margins[i];
      active[i] = slack > 0.0 ? 1.0 : 0.0;
      hinge += std::max(slack, 0.0);
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = p.alpha() * w[i];
      sq += w[i] * w[i];
    }
    double excl = 0.0;
    for (const auto& grp : p.groups().groups()) {
      double s = 0.0;
      for (std::size_t i : grp) s += std::fabs(w[i]);
      excl += s * s;
      for (std::size_t i : grp) {
        if (w[i] != 0.0) g[i] += p.beta() * s * (w[i] > 0.0 ? 1.0 : -1.0);
      }
    }
    const double value = hinge + 0.5 * p.alpha() * sq + 0.5 * p.beta() * excl;
    if (!std::isfinite(value)) throw NumericalError("oracle_esvm_subgradient: diverged");

    if (rule.kind == StepKind::polyak_level) {
      if (value < level_best - 0.5 * delta) {
        stall = 0;
      } else if (++stall > rule.patience) {
        delta *= rule.shrink;
        stall = 0;
        w = r.argmin;
        continue;
      }
      level_best = std::min(level_best, value);
    }
    if (value < r.objective) {
      r.objective = value;
      r.argmin = w;
    }

    matvec(Z, active, pull);
    double gg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] -= pull[i];
      gg += g[i] * g[i];
    }
    if (gg == 0.0) break;  // 0 is a subgradient: w is optimal
    double eta = 0.0;
    const double kk = static_cast<double>(k);
    switch (rule.kind) {
      case StepKind::diminishing:
        eta = rule.c / std::sqrt(kk);
        break;
      case StepKind::strongly_convex:
        eta = 1.0 / (p.alpha() * kk);
        break;
      case StepKind::polyak_level:
        eta = (value - (level_best - delta)) / gg;
        break;
    }
    for (std::size_t i = 0; i < n; ++i) w[i] -= eta * g[i];
  }
  const double last = oracle_esvm_primal(p, w);
  if (last < r.objective) {
    r.objective = last;
    r.argmin = w;
  }
  return r;
}

OracleReport oracle_esvm_best(const EsvmProblem& p, std::size_t iters) {
  const double znorm = spectral_norm_by_power(p.Z());
  const double scale = znorm > 0.0 ? 1.0 / znorm : 1.0;
  std::vector<StepRule> rules = {{StepKind::strongly_convex, 0.0}, {StepKind::polyak_level, 0.0}};
  for (double c : {0.1, 1.0, 10.0}) rules.push_back({StepKind::diminishing, c * scale});
  OracleReport best;
  best.objective = std::numeric_limits<double>::infinity();
  for (const StepRule& rule : rules) {
    OracleReport r = oracle_esvm_subgradient(p, iters, rule);
    if (r.objective < best.objective) best = std::move(r);
  }
  best.budget = rules.size() * iters;
  return best;
}

double dense_spectral_norm(const Matrix& A) {
  require(A.rows() <= 500 && A.cols() <= 500, "dense_spectral_norm: dimensions must be <= 500");
  if (A.empty()) return 0.0;
  for (std::size_t i = 0; i < A.rows() * A.cols(); ++i) {
    require(std::isfinite(A.data()[i]), "dense_spectral_norm: entries must be finite");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> M(A.data(), static_cast<Eigen::Index>(A.rows()),
                                     static_cast<Eigen::Index>(A.cols()));
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

}  // namespace exsp
