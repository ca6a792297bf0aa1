#include <doctest.h>

#include <cmath>

#include "exsp/elasso.hpp"
#include "exsp/errors.hpp"
#include "exsp/oracle.hpp"
#include "exsp/synth.hpp"
#include "support.hpp"

using namespace exsp;

namespace {

ElassoProblem random_problem(std::size_t N, std::size_t n, const GroupSet& G, double lambda,
                             Rng& rng) {
  return {test::random_matrix(N, n, rng), test::random_vector(N, rng), G, lambda};
}

// Normal equations by Gaussian elimination with partial pivoting.
Vector least_squares(const Matrix& X, const Vector& y) {
  const std::size_t n = X.cols();
  std::vector<Vector> A(n, Vector(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t r = 0; r < X.rows(); ++r) A[i][j] += X(r, i) * X(r, j);
    for (std::size_t r = 0; r < X.rows(); ++r) A[i][n] += X(r, i) * y[r];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
    }
  }
  Vector w(n);
  for (std::size_t c = n; c-- > 0;) {
    double s = A[c][n];
    for (std::size_t k = c + 1; k < n; ++k) s -= A[c][k] * w[k];
    w[c] = s / A[c][c];
  }
  return w;
}

SolveConfig tight() {
  SolveConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.max_iters = 200000;
  return cfg;
}

}  // namespace

TEST_CASE("objective examples") {
  Rng rng(51);
  const auto G = GroupSet::from_one_based({{1, 2}, {3}}, 3);
  const auto p = random_problem(4, 3, G, 0.7, rng);
  CHECK(elasso_objective(p, Vector{0, 0, 0}) == doctest::Approx(0.5 * norm2_sq(p.y)));

  const ElassoProblem q{Matrix::identity(2), {1, 0}, GroupSet::from_one_based({{1}, {2}}, 2), 2.0};
  CHECK(elasso_objective(q, Vector{1, 0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(elasso_objective(q, Vector{1}), InvalidArgument);
}

TEST_CASE("problem validation") {
  const auto G = GroupSet::from_one_based({{1, 2}}, 2);
  CHECK_THROWS_AS((ElassoProblem{Matrix(3, 2), Vector(2), G, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ElassoProblem{Matrix(3, 3), Vector(3), G, 1.0}.validate()), InvalidArgument);
  CHECK_THROWS_AS((ElassoProblem{Matrix(3, 2), Vector(3), G, 0.0}.validate()), InvalidArgument);
}

TEST_CASE("split objective equals the original on complementary splits") {
  Rng rng(52);
  const auto G = GroupSet::from_one_based({{1, 2, 3}, {3, 4}, {5, 6}}, 6);
  const auto p = random_problem(8, 6, G, 1.3, rng);
  for (int t = 0; t < 200; ++t) {
    const Vector w = test::random_vector(6, rng);
    const double a = pcp_smooth_value(p, PcpState::split(w));
    const double b = elasso_objective(p, w);
    CHECK(std::fabs(a - b) <= 1e-10 * std::fabs(b));
  }
}

TEST_CASE("split gradient") {
  Rng rng(53);
  const auto G = GroupSet::from_one_based({{1, 2}, {2, 3, 4}, {5}}, 5);
  auto p = random_problem(7, 5, G, 0.8, rng);

  SUBCASE("zero at the origin when y = 0") {
    p.y.assign(7, 0.0);
    const auto g = pcp_smooth_gradient(p, PcpState{Vector(5, 0.0), Vector(5, 0.0)});
    CHECK(norm_inf(g.plus) == 0.0);
    CHECK(norm_inf(g.minus) == 0.0);
  }
  SUBCASE("matches central differences") {
    const auto F = pcp_smooth_part(p);
    for (int t = 0; t < 20; ++t) {
      Vector z = test::random_vector(10, rng);
      for (double& x : z) x = std::fabs(x);
      const Vector g = F.gradient(z);
      const Vector fd = test::numeric_gradient(F.value, z);
      CHECK(test::relative_error(g, fd) <= 1e-5);
      const auto pg = pcp_smooth_gradient(p, PcpState::from_stacked(z));
      CHECK(test::max_abs_diff(pg.plus, std::span<const double>(g).first(5)) <= 1e-12);
    }
  }
  SUBCASE("lambda = 0 decouples into the loss gradient") {
    p.lambda = 0.0;
    const PcpState s{{0.1, 0.0, 0.3, 0.0, 1.0}, {0.0, 0.2, 0.0, 0.4, 0.0}};
    const auto g = pcp_smooth_gradient(p, s);
    const Vector r = sub(matvec(p.X, s.w()), p.y);
    const Vector expect = matvec_t(p.X, r);
    CHECK(test::max_abs_diff(g.plus, expect) <= 1e-12);
    CHECK(test::max_abs_diff(g.minus, scaled(expect, -1.0)) <= 1e-12);
  }
}

TEST_CASE("split prox keeps both parts nonnegative") {
  Rng rng(54);
  const auto H = pcp_prox_part();
  for (int t = 0; t < 50; ++t) {
    const Vector c = test::random_vector(12, rng);
    Vector out(12);
    H.prox(c, 0.3, out);
    for (double v : out) CHECK(v >= 0.0);
    CHECK(H.value(out) == 0.0);
  }
}

TEST_CASE("heavy regularization collapses to zero") {
  Rng rng(55);
  const auto G = GroupSet::from_one_based({{1, 2, 3}, {3, 4, 5}}, 5);
  auto p = random_problem(10, 5, G, 1.0, rng);
  const Vector g = matvec_t(p.X, p.y);
  const double f0 = 0.5 * norm2_sq(p.y);
  // With every feature grouped, ||w||_e^2 >= ||w||^2, so the best decrease
  // below f0 is at most ||X^T y||^2 / (2 lambda).
  for (double scale : {1e3 * norm_inf(g), 1e3 * norm2_sq(g) / (2e-6 * f0)}) {
    p.lambda = scale;
    const auto r = solve_fista_pcp(p, tight());
    const double f = elasso_objective(p, r.w);
    const double bound = norm2_sq(g) / (2.0 * p.lambda);
    CHECK(f <= f0);
    CHECK(f0 - f <= bound);
    const auto ref = oracle_ista(pcp_smooth_part(p), pcp_prox_part(), Vector(10, 0.0),
                                 1.0 / pcp_lipschitz(p), 1000000, {false, 1e-13});
    CHECK(std::fabs(f - ref.objective) <= 1e-9 * f0);
  }
  // At the second scale the decrease bound is below 1e-6 relative.
  CHECK(std::fabs(elasso_objective(p, solve_fista_pcp(p, tight()).w) - f0) <= 1e-6 * f0);
}

TEST_CASE("both solvers agree on disjoint groups") {
  Rng rng(56);
  for (int t = 0; t < 5; ++t) {
    const auto G = random_grouping(20, 4, rng);
    const auto p = random_problem(15, 20, G, 0.5 + rng.uniform(), rng);
    const double a = elasso_objective(p, solve_fista_pcp(p, tight()).w);
    const double b = elasso_objective(p, solve_fista_locp(p, tight()).w);
    CHECK(std::fabs(a - b) <= 1e-5 * std::fabs(b));
  }
}

TEST_CASE("identity design with singleton groups halves y") {
  const Vector y{1.0, -3.0, 0.5, 2.0};
  const ElassoProblem p{Matrix::identity(4), y,
                        GroupSet::from_one_based({{1}, {2}, {3}, {4}}, 4), 1.0};
  for (const auto& w : {solve_fista_pcp(p, tight()).w, solve_fista_locp(p, tight()).w}) {
    for (std::size_t i = 0; i < 4; ++i) CHECK(w[i] == doctest::Approx(y[i] / 2).epsilon(1e-7));
  }
}

TEST_CASE("LOCP rejects overlapping groups") {
  const ElassoProblem p{Matrix::identity(2), {1, 1}, GroupSet::from_one_based({{1, 2}, {2}}, 2),
                        1.0};
  CHECK_THROWS_AS(solve_fista_locp(p, {}), PreconditionError);
}

TEST_CASE("vanishing lambda recovers least squares") {
  Rng rng(57);
  const auto G = GroupSet::from_one_based({{1, 2}, {3, 4, 5}}, 5);
  auto p = random_problem(30, 5, G, 1e-9, rng);
  const Vector ls = least_squares(p.X, p.y);
  CHECK(test::max_abs_diff(solve_fista_locp(p, tight()).w, ls) <= 1e-4);
}

TEST_CASE("single group instance against ISTA") {
  const ElassoProblem p{Matrix::identity(2), {1, 1}, GroupSet::from_one_based({{1, 2}}, 2), 1.0};
  const auto w = solve_fista_locp(p, tight()).w;
  const auto ref = oracle_ista(least_squares_part(p), locp_prox_part(p), Vector{0, 0}, 1.0,
                               100000, {false, 1e-14});
  CHECK(elasso_objective(p, w) <= ref.objective + 1e-8);
  // By symmetry w = (1/3, 1/3): minimize (1 - a)^2 + 2 a^2.
  CHECK(w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("returned point is a prox fixed point") {
  Rng rng(58);
  const auto G = random_grouping(30, 5, rng);
  const auto p = random_problem(20, 30, G, 0.3, rng);
  const auto w = solve_fista_locp(p, tight()).w;
  const double gamma = 1.0 / gram_norm(p);
  CHECK(locp_fixed_point_residual(p, w, gamma) <= 1e-6 * (1.0 + norm2(w)));
}

TEST_CASE("recovered support touches every planted group") {
  const auto ds = gen_elasso_disjoint(200, 60, 10, 2, 0.01, 7);
  const ElassoProblem p{ds.X, ds.y, ds.groups, ds.solver_lambda()};
  const auto w = solve_fista_locp(p, {}).w;
  for (const auto& g : ds.groups.groups()) {
    bool planted = false, recovered = false;
    for (std::size_t i : g) {
      planted = planted || ds.w_star[i] != 0.0;
      recovered = recovered || std::fabs(w[i]) > 1e-8;
    }
    if (planted) CHECK(recovered);
  }
}

TEST_CASE("PCP handles overlapping groups and reaches the ISTA optimum") {
  const auto ds = gen_elasso_overlap(40, 30, 6, 5, 10, 2, 0.01, 3);
  CHECK_FALSE(ds.groups.is_disjoint());
  const ElassoProblem p{ds.X, ds.y, ds.groups, ds.solver_lambda()};
  const auto w = solve_fista_pcp(p, tight()).w;
  const double L = pcp_lipschitz(p);
  const auto ref = oracle_ista(pcp_smooth_part(p), pcp_prox_part(), Vector(80, 0.0), 1.9 / L,
                               1000000, {false, 1e-12});
  const double f = elasso_objective(p, w);
  CHECK(f <= ref.objective * (1 + 1e-6));
}
