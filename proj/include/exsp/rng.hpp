#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace exsp {

/// Seeded generator with a fully specified draw procedure so that datasets
/// are reproducible from (seed, parameters) on any conforming platform.
///
/// Bits come from std::mt19937_64 (the C++ standard fixes its output
/// sequence). Everything layered on top is implemented here rather than with
/// the <random> distributions, whose algorithms are implementation-defined:
///   uniform()        (bits >> 11) * 2^-53, in [0, 1)
///   normal()         Box-Muller on u1 = 1 - uniform(), u2 = uniform();
///                    returns r cos(2 pi u2) then caches r sin(2 pi u2)
///   below(k)         rejection sampling on 64-bit words, then modulo
///   shuffle          Fisher-Yates from the last position downward
///   sample(n, k)     first k slots of a forward partial Fisher-Yates
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  double normal();
  std::size_t below(std::size_t bound);

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  // k distinct values from {0..n-1}, in draw order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Independent stream seed derived from (seed, stream) by SplitMix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace exsp
