#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "exsp/rng.hpp"

using exsp::Rng;

TEST_CASE("engine output follows the standard mt19937_64 sequence") {
  // The standard fixes the 10000th output for the default seed.
  Rng rng(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  CHECK(v == 9981545732273789042ull);
}

TEST_CASE("same seed gives the same stream, different seeds differ") {
  Rng a(42), b(42), c(43);
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    any_diff = any_diff || x != c.normal();
  }
  CHECK(any_diff);
}

TEST_CASE("uniform lies in [0, 1) with mean near 1/2") {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal has unit variance") {
  Rng rng(2);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::fabs(s / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("below stays in range and hits every value") {
  Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::size_t k = rng.below(7);
    REQUIRE(k < 7);
    ++hits[k];
  }
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("sample returns distinct values") {
  Rng rng(4);
  const auto s = rng.sample(50, 20);
  CHECK(s.size() == 20);
  std::set<std::size_t> uniq(s.begin(), s.end());
  CHECK(uniq.size() == 20);
  CHECK(*uniq.rbegin() < 50);
  CHECK(rng.sample(5, 5).size() == 5);
}

TEST_CASE("shuffle is a permutation") {
  Rng rng(5);
  std::vector<int> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  rng.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 10; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("derive_seed separates streams") {
  CHECK(exsp::derive_seed(1, 0) != exsp::derive_seed(1, 1));
  CHECK(exsp::derive_seed(1, 0) != exsp::derive_seed(2, 0));
  CHECK(exsp::derive_seed(9, 3) == exsp::derive_seed(9, 3));
}
