#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "exsp/errors.hpp"
#include "exsp/groups.hpp"
#include "exsp/oracle.hpp"
#include "exsp/prox.hpp"
#include "support.hpp"

using namespace exsp;

namespace {

struct Instance {
  Vector a;
  double b;
  double zeta;
};

Instance random_instance(Rng& rng, std::size_t max_d = 8) {
  static const double zetas[] = {0.1, 1.0, 10.0};
  Instance in{test::random_vector(1 + rng.below(max_d), rng), 0.0, zetas[rng.below(3)]};
  if (rng.below(2) == 1) in.b = rng.normal();
  return in;
}

}  // namespace

TEST_CASE("l1 cone examples") {
  auto p = project_l1_cone(Vector{1, 1}, 4, 1);
  CHECK(p.x == Vector{1, 1});
  CHECK(p.y == 4.0);

  p = project_l1_cone(Vector{3, 1}, 0, 1);
  CHECK(p.x[0] == doctest::Approx(1.5));
  CHECK(p.x[1] == 0.0);
  CHECK(p.y == doctest::Approx(1.5));

  p = project_l1_cone(Vector{-2, 2}, 1, 2);
  CHECK(p.x[0] == doctest::Approx(-0.8));
  CHECK(p.x[1] == doctest::Approx(0.8));
  CHECK(p.y == doctest::Approx(1.6));
}

TEST_CASE("linf cone examples") {
  auto p = project_linf_cone(Vector{1, -2}, 3, 1);
  CHECK(p.x == Vector{1, -2});
  CHECK(p.y == 3.0);

  p = project_linf_cone(Vector{2, -1}, 0, 1);
  CHECK(p.x[0] == doctest::Approx(1.0));
  CHECK(p.x[1] == doctest::Approx(-1.0));
  CHECK(p.y == doctest::Approx(1.0));

  p = project_linf_cone(Vector{4}, 0, 1);
  CHECK(p.x[0] == doctest::Approx(2.0));
  CHECK(p.y == doctest::Approx(2.0));
}

TEST_CASE("cone projections reject bad arguments") {
  CHECK_THROWS_AS(project_l1_cone(Vector{1}, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(project_l1_cone(Vector{}, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(project_linf_cone(Vector{1}, 0, -1), InvalidArgument);
  CHECK_THROWS_AS(project_linf_cone(Vector{}, 0, 1), InvalidArgument);
}

TEST_CASE("negative b reaches the apex when the pull is strong") {
  auto p = project_l1_cone(Vector{0.5, -0.2}, -1.0, 1.0);
  CHECK(p.y == 0.0);
  CHECK(p.x == Vector{0, 0});
  auto q = project_linf_cone(Vector{0.5, -0.2}, -1.0, 1.0);
  CHECK(q.y == 0.0);
  CHECK(q.x == Vector{0, 0});
}

TEST_CASE("feasibility and KKT witnesses on random instances") {
  Rng rng(31);
  for (int t = 0; t < 3000; ++t) {
    const auto in = random_instance(rng);
    const auto p1 = project_l1_cone(in.a, in.b, in.zeta);
    CHECK(norm1(p1.x) <= p1.y + 1e-9);
    CHECK(l1_cone_kkt_residual(in.a, in.b, in.zeta, p1) <= 1e-9);
    const auto pi = project_linf_cone(in.a, in.b, in.zeta);
    CHECK(norm_inf(pi.x) <= pi.y + 1e-9);
    CHECK(pi.y >= 0.0);
    CHECK(linf_cone_kkt_residual(in.a, in.b, in.zeta, pi) <= 1e-9);
  }
}

TEST_CASE("l1 cone output preserves the magnitude order") {
  Rng rng(32);
  for (int t = 0; t < 500; ++t) {
    const auto in = random_instance(rng);
    const auto p = project_l1_cone(in.a, in.b, in.zeta);
    for (std::size_t i = 0; i < in.a.size(); ++i)
      for (std::size_t j = 0; j < in.a.size(); ++j)
        if (std::fabs(in.a[i]) >= std::fabs(in.a[j])) CHECK(std::fabs(p.x[i]) >= std::fabs(p.x[j]));
  }
}

TEST_CASE("permutation and sign equivariance") {
  Rng rng(33);
  for (int t = 0; t < 300; ++t) {
    const auto in = random_instance(rng);
    const std::size_t d = in.a.size();
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    const std::size_t flip = rng.below(d);
    Vector a2(d);
    for (std::size_t i = 0; i < d; ++i) a2[i] = in.a[perm[i]] * (perm[i] == flip ? -1.0 : 1.0);

    const auto p = project_l1_cone(in.a, in.b, in.zeta);
    const auto q = project_l1_cone(a2, in.b, in.zeta);
    const auto r = project_linf_cone(in.a, in.b, in.zeta);
    const auto s = project_linf_cone(a2, in.b, in.zeta);
    CHECK(q.y == doctest::Approx(p.y).epsilon(1e-12));
    CHECK(s.y == doctest::Approx(r.y).epsilon(1e-12));
    for (std::size_t i = 0; i < d; ++i) {
      const double sign = perm[i] == flip ? -1.0 : 1.0;
      CHECK(std::fabs(q.x[i] - sign * p.x[perm[i]]) <= 1e-12);
      CHECK(std::fabs(s.x[i] - sign * r.x[perm[i]]) <= 1e-12);
    }
  }
}

TEST_CASE("tied magnitudes give order-independent output") {
  const Vector a{1.0, -2.0, 2.0, 1.0, -2.0};
  const Vector b{-2.0, 1.0, 2.0, -2.0, 1.0};  // same multiset, ties reordered
  for (double zeta : {0.1, 1.0, 10.0}) {
    const auto p = project_l1_cone(a, 0.3, zeta);
    const auto q = project_l1_cone(b, 0.3, zeta);
    CHECK(p.y == q.y);
    CHECK(std::fabs(p.x[1]) == std::fabs(q.x[0]));
    CHECK(std::fabs(p.x[0]) == std::fabs(q.x[1]));
    const auto r = project_linf_cone(a, 0.3, zeta);
    const auto s = project_linf_cone(b, 0.3, zeta);
    CHECK(r.y == s.y);
  }
}

TEST_CASE("objective is no worse than the grid oracle") {
  Rng rng(34);
  for (int t = 0; t < 1000; ++t) {
    const auto in = random_instance(rng);
    const auto p1 = project_l1_cone(in.a, in.b, in.zeta);
    const auto o1 = oracle_l1_cone(in.a, in.b, in.zeta);
    CHECK(cone_objective(p1.x, p1.y, in.a, in.b, in.zeta) <= o1.objective + 1e-8);
    const auto pi = project_linf_cone(in.a, in.b, in.zeta);
    const auto oi = oracle_linf_cone(in.a, in.b, in.zeta);
    CHECK(cone_objective(pi.x, pi.y, in.a, in.b, in.zeta) <= oi.objective + 1e-8);
  }
}

TEST_CASE("argmin matches the fine-grid oracle") {
  Rng rng(35);
  for (int t = 0; t < 20; ++t) {
    const auto in = random_instance(rng, 4);
    const auto p1 = project_l1_cone(in.a, in.b, in.zeta);
    const auto o1 = oracle_l1_cone(in.a, in.b, in.zeta, 1e-6);
    CHECK(test::max_abs_diff(p1.x, o1.argmin) <= 1e-5);
    CHECK(std::fabs(p1.y - o1.scalar) <= 1e-5);
    const auto pi = project_linf_cone(in.a, in.b, in.zeta);
    const auto oi = oracle_linf_cone(in.a, in.b, in.zeta, 1e-6);
    CHECK(test::max_abs_diff(pi.x, oi.argmin) <= 1e-5);
    CHECK(std::fabs(pi.y - oi.scalar) <= 1e-5);
  }
}

TEST_CASE("in-place forms match the allocating forms") {
  Rng rng(36);
  std::vector<double> scratch;
  for (int t = 0; t < 200; ++t) {
    const auto in = random_instance(rng);
    Vector x(in.a.size());
    const double y1 = project_l1_cone_into(in.a, in.b, in.zeta, x, scratch);
    const auto p = project_l1_cone(in.a, in.b, in.zeta);
    CHECK(y1 == p.y);
    CHECK(x == p.x);
    const double y2 = project_linf_cone_into(in.a, in.b, in.zeta, x, scratch);
    const auto q = project_linf_cone(in.a, in.b, in.zeta);
    CHECK(y2 == q.y);
    CHECK(x == q.x);
  }
}

TEST_CASE("exclusive prox for disjoint groups") {
  const auto single = GroupSet::from_one_based({{1}}, 1);
  CHECK(prox_exclusive_sq_disjoint(Vector{0.0}, single, 1.0) == Vector{0.0});
  CHECK(prox_exclusive_sq_disjoint(Vector{2.0}, single, 1.0)[0] == doctest::Approx(1.0));
  const auto pair = GroupSet::from_one_based({{1, 2}}, 2);
  const auto w = prox_exclusive_sq_disjoint(Vector{3.0, 1.0}, pair, 1.0);
  CHECK(w[0] == doctest::Approx(1.5));
  CHECK(w[1] == 0.0);
  // Coordinate 3 is in no group and passes through.
  const auto partial = GroupSet::from_one_based({{1, 2}}, 3);
  CHECK(prox_exclusive_sq_disjoint(Vector{3.0, 1.0, -7.0}, partial, 1.0)[2] == -7.0);
  const auto overlap = GroupSet::from_one_based({{1, 2}, {2}}, 2);
  CHECK_THROWS_AS(prox_exclusive_sq_disjoint(Vector{1.0, 1.0}, overlap, 1.0), PreconditionError);
}

TEST_CASE("exclusive prox minimizes its objective") {
  Rng rng(37);
  const auto G = GroupSet::from_one_based({{1, 2, 3}, {4, 5}, {6}}, 6);
  auto obj = [&](std::span<const double> w, std::span<const double> c, double gl) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += 0.5 * (w[i] - c[i]) * (w[i] - c[i]);
    return s + 0.5 * gl * exclusive_norm_sq(w, G);
  };
  for (int t = 0; t < 100; ++t) {
    const Vector c = test::random_vector(6, rng, 2.0);
    const double gl = 0.1 + rng.uniform() * 3;
    const Vector w = prox_exclusive_sq_disjoint(c, G, gl);
    const double f = obj(w, c, gl);
    for (int k = 0; k < 20; ++k) {
      Vector v = w;
      for (double& x : v) x += 1e-3 * rng.normal();
      CHECK(obj(v, c, gl) >= f - 1e-12);
    }
  }
}

TEST_CASE("box, positive part and soft threshold") {
  CHECK(project_box(Vector{-1, 0.5, 2}, 0, 1) == Vector{0, 0.5, 1});
  CHECK(project_box(Vector{0.2, 0.7}, 0, 1) == Vector{0.2, 0.7});
  CHECK(project_box(Vector{0, 1}, 0, 1) == Vector{0, 1});
  CHECK_THROWS_AS(project_box(Vector{0}, 1, 0), InvalidArgument);

  auto [p, m] = project_nonneg_pair(Vector{-1, 2}, Vector{3, -4});
  CHECK(p == Vector{0, 2});
  CHECK(m == Vector{3, 0});
  auto [p2, m2] = project_nonneg_pair(Vector{1, 2}, Vector{0, 0});
  CHECK(p2 == Vector{1, 2});
  CHECK(m2 == Vector{0, 0});
  CHECK_THROWS_AS(project_nonneg_pair(Vector{1}, Vector{1, 2}), InvalidArgument);

  CHECK(soft_threshold(Vector{3, -1}, 1.5) == Vector{1.5, 0});
  CHECK(soft_threshold(Vector{3, -1}, 0) == Vector{3, -1});
  CHECK(soft_threshold(Vector{3, -1}, 3) == Vector{0, 0});
  CHECK_THROWS_AS(soft_threshold(Vector{1}, -0.1), InvalidArgument);
}
