#include "exsp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "exsp/elasso.hpp"
#include "exsp/errors.hpp"
#include "exsp/esvm.hpp"
#include "exsp/groups.hpp"
#include "exsp/oracle.hpp"
#include "exsp/prox.hpp"
#include "exsp/rng.hpp"
#include "exsp/simd/kernels.hpp"
#include "exsp/synth.hpp"

namespace exsp {
namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << v;
  return ss.str();
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

Vector normals(Rng& rng, std::size_t d) {
  Vector v(d);
  for (double& x : v) x = rng.normal();
  return v;
}

void check_prox(std::vector<VerifyCheck>& out, std::uint64_t seed) {
  Rng rng(seed);
  double worst_l1 = -1e300, worst_linf = -1e300, kkt = 0.0;
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = 1 + rng.below(8);
    const Vector a = normals(rng, d);
    const double b = rng.below(2) ? 0.0 : std::fabs(rng.normal());
    const double zeta = std::array{0.1, 1.0, 10.0}[rng.below(3)];
    const ConePoint p1 = project_l1_cone(a, b, zeta);
    const ConePoint pi = project_linf_cone(a, b, zeta);
    worst_l1 = std::max(worst_l1, cone_objective(p1.x, p1.y, a, b, zeta) -
                                      oracle_l1_cone(a, b, zeta).objective);
    worst_linf = std::max(worst_linf, cone_objective(pi.x, pi.y, a, b, zeta) -
                                          oracle_linf_cone(a, b, zeta).objective);
    kkt = std::max({kkt, l1_cone_kkt_residual(a, b, zeta, p1), linf_cone_kkt_residual(a, b, zeta, pi)});
  }
  out.push_back({"prox", "l1 cone vs grid oracle (500)", worst_l1 <= 1e-8,
                 "max excess " + fmt(worst_l1)});
  out.push_back({"prox", "linf cone vs grid oracle (500)", worst_linf <= 1e-8,
                 "max excess " + fmt(worst_linf)});
  out.push_back({"prox", "KKT residuals", kkt <= 1e-9, "max " + fmt(kkt)});
}

void check_simd(std::vector<VerifyCheck>& out, std::uint64_t seed) {
  if (!simd::isa_available(simd::Isa::avx2)) {
    out.push_back({"simd", "avx2 vs scalar", true, "avx2 unavailable; scalar only"});
    return;
  }
  const auto& s = simd::kernels_for(simd::Isa::scalar);
  const auto& v = simd::kernels_for(simd::Isa::avx2);
  Rng rng(seed);
  double worst = 0.0;
  bool exact = true;
  for (std::size_t n : {1u, 3u, 4u, 7u, 16u, 33u, 100u}) {
    const Vector a = normals(rng, n), b = normals(rng, n);
    worst = std::max(worst, rel(v.dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n)));
    worst = std::max(worst, rel(v.asum(a.data(), n), s.asum(a.data(), n)));
    exact = exact && v.amax(a.data(), n) == s.amax(a.data(), n);
    Vector o1(n), o2(n);
    s.soft_threshold(a.data(), 0.3, o1.data(), n);
    v.soft_threshold(a.data(), 0.3, o2.data(), n);
    exact = exact && o1 == o2;
    s.clamp(a.data(), -0.5, 0.5, o1.data(), n);
    v.clamp(a.data(), -0.5, 0.5, o2.data(), n);
    exact = exact && o1 == o2;
    const std::size_t rows = 5;
    const Vector A = normals(rng, rows * n);
    Vector y1(rows), y2(rows), z1(n), z2(n);
    s.gemv(A.data(), rows, n, a.data(), y1.data());
    v.gemv(A.data(), rows, n, a.data(), y2.data());
    for (std::size_t i = 0; i < rows; ++i) worst = std::max(worst, rel(y2[i], y1[i]));
    const Vector x = normals(rng, rows);
    s.gemv_t(A.data(), rows, n, x.data(), z1.data());
    v.gemv_t(A.data(), rows, n, x.data(), z2.data());
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, rel(z2[i], z1[i]));
  }
  out.push_back({"simd", "avx2 reductions vs scalar", worst <= 1e-12, "max rel " + fmt(worst)});
  out.push_back({"simd", "avx2 elementwise bit-identical", exact, exact ? "identical" : "differs"});
}

void check_groups(std::vector<VerifyCheck>& out, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng.below(20);
    std::vector<IndexList> g(1 + rng.below(5));
    for (auto& grp : g) grp = rng.sample(n, 1 + rng.below(n));
    const GroupSet gs = GroupSet::from_zero_based(g, n);
    const Vector u = normals(rng, n);
    const Matrix Q = overlap_matrix(gs);
    const double dense = dot(u, matvec(Q, u));
    worst = std::max(worst, std::fabs(dense - overlap_quadratic(gs, u)) / std::max(1e-300, std::fabs(dense)));
  }
  out.push_back({"groups", "u^T Q u identity (50)", worst <= 1e-10, "max rel " + fmt(worst)});
}

void check_fista(std::vector<VerifyCheck>& out, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 30;
  Matrix B(n, n);
  for (std::size_t i = 0; i < n * n; ++i) B.data()[i] = rng.normal();
  Matrix A(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += B(k, i) * B(k, j);
      A(i, j) = s;
    }
  const double power = power_iteration_lipschitz(
      [&](std::span<const double> x, std::span<double> y) { matvec(A, x, y); }, n, 2000);
  const double exact = dense_spectral_norm(A);
  out.push_back({"fista", "power iteration vs dense SVD", rel(power, exact) <= 1e-4 * std::max(1.0, exact),
                 "rel " + fmt(std::fabs(power - exact) / exact)});

  // 1/2 x^T (A + I) x - c^T x with known minimizer.
  const Vector c = normals(rng, n);
  SmoothPart F;
  F.value = [&](std::span<const double> x) {
    const Vector Ax = matvec(A, x);
    return 0.5 * dot(x, Ax) + 0.5 * norm2_sq(x) - dot(c, x);
  };
  F.value_and_gradient = [&](std::span<const double> x, std::span<double> g) {
    matvec(A, x, g);
    double v = 0.5 * dot(x, g) + 0.5 * norm2_sq(x) - dot(c, x);
    for (std::size_t i = 0; i < n; ++i) g[i] += x[i] - c[i];
    return v;
  };
  F.lipschitz_hint = exact + 1.0;
  ProxPart H;
  H.prox = [](std::span<const double> x, double, std::span<double> o) { std::copy(x.begin(), x.end(), o.begin()); };
  H.value = [](std::span<const double>) { return 0.0; };
  SolveConfig cfg;
  cfg.rel_tol = 1e-13;
  const SolveResult res = fista_solve(F, H, Vector(n, 0.0), cfg);
  const OracleReport ista = oracle_ista(F, H, Vector(n, 0.0), 1.0 / (exact + 1.0), 200000, {false, 1e-15});
  out.push_back({"fista", "quadratic vs ISTA", distance(res.x, ista.argmin) <= 1e-6,
                 "distance " + fmt(distance(res.x, ista.argmin))});
}

void check_elasso(std::vector<VerifyCheck>& out, std::uint64_t seed) {
  const ElassoDataset ds = gen_elasso_disjoint(40, 20, 5, 2, 0.01, seed);
  ElassoProblem p{ds.X, ds.y, ds.groups, ds.solver_lambda()};
  SolveConfig cfg;
  cfg.rel_tol = 1e-12;
  const ElassoResult pcp = solve_fista_pcp(p, cfg);
  const ElassoResult locp = solve_fista_locp(p, cfg);
  const double fp = elasso_objective(p, pcp.w);
  const double fl = elasso_objective(p, locp.w);
  out.push_back({"elasso", "PCP vs LOCP objective", rel(fp, fl) <= 1e-5, "rel " + fmt(rel(fp, fl))});

  const SmoothPart F = pcp_smooth_part(p);
  ProxPart H;
  H.prox = [](std::span<const double> x, double, std::span<double> o) {
    for (std::size_t i = 0; i < x.size(); ++i) o[i] = x[i] > 0.0 ? x[i] : 0.0;
  };
  H.value = [](std::span<const double>) { return 0.0; };
  const OracleReport ista =
      oracle_ista(F, H, Vector(2 * p.features(), 0.0), 1.0 / pcp_lipschitz(p), 1000000, {false, 1e-15});
  out.push_back({"elasso", "PCP vs ISTA oracle", rel(fp, ista.objective) <= 1e-6,
                 "rel " + fmt(rel(fp, ista.objective))});
}

void check_esvm(std::vector<VerifyCheck>& out, std::uint64_t seed) {
  const EsvmDataset ds = gen_esvm(60, 12, 0.5, seed);
  const EsvmProblem p(ds.X, ds.labels, ds.groups, 1.0, 1.0);
  const EsvmResult res = solve_fista_licp(p, SolveConfig{}, {1e-6, 10});
  const bool gap_ok = res.gap <= 1e-6 * (1.0 + std::fabs(res.primal)) && res.gap >= -1e-9;
  out.push_back({"esvm", "duality gap certificate", gap_ok, "gap " + fmt(res.gap)});
  const OracleReport sub = oracle_esvm_best(p, 20000);
  const double r = (sub.objective - res.primal) / std::max(1.0, std::fabs(res.primal));
  out.push_back({"esvm", "LICP vs subgradient oracle", r >= -1e-6 && r <= 1e-3, "rel " + fmt(r)});
}

void check_synth(std::vector<VerifyCheck>& out, std::uint64_t seed) {
  const MarginTuning t = tune_margin_scale(504, 72, 0.10, seed);
  out.push_back({"synth", "margin tuning hits 10%", std::fabs(t.holdout_error - 0.10) <= 0.01,
                 "holdout " + fmt(t.holdout_error)});
  out.push_back({"synth", "holdout vs Gaussian formula", std::fabs(t.holdout_error - t.analytic_error) <= 0.01,
                 "analytic " + fmt(t.analytic_error)});
}

using Runner = std::function<void(std::vector<VerifyCheck>&, std::uint64_t)>;

const std::vector<std::pair<std::string, Runner>>& runners() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"prox", check_prox},     {"simd", check_simd}, {"groups", check_groups},
      {"fista", check_fista},   {"elasso", check_elasso}, {"esvm", check_esvm},
      {"synth", check_synth},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& verify_modules() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, run] : runners()) v.push_back(name);
    return v;
  }();
  return names;
}

std::vector<VerifyCheck> run_verify(const std::set<std::string>& only, std::uint64_t seed) {
  for (const auto& name : only) {
    const auto& mods = verify_modules();
    require(std::find(mods.begin(), mods.end(), name) != mods.end(),
            "verify: unknown module '" + name + "'");
  }
  std::vector<VerifyCheck> out;
  std::uint64_t stream = 0;
  for (const auto& [name, run] : runners()) {
    ++stream;
    if (!only.empty() && !only.count(name)) continue;
    try {
      run(out, derive_seed(seed, stream));
    } catch (const std::exception& e) {
      out.push_back({name, "exception", false, e.what()});
    }
  }
  return out;
}

}  // namespace exsp
