#include "exsp/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "exsp/errors.hpp"
#include "exsp/rng.hpp"

namespace exsp {

GroupSet GroupSet::from_zero_based(std::vector<IndexList> groups, std::size_t n) {
  require(n >= 1, "GroupSet: n must be positive");
  require(!groups.empty(), "GroupSet: at least one group is required");
  GroupSet gs;
  gs.n_ = n;
  gs.membership_.assign(n, 0);
  for (std::size_t j = 0; j < groups.size(); ++j) {
    auto& g = groups[j];
    require(!g.empty(), "GroupSet: group " + std::to_string(j + 1) + " is empty");
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    require(g.back() < n, "GroupSet: index out of range in group " + std::to_string(j + 1));
    for (std::size_t i : g) ++gs.membership_[i];
    gs.total_size_ += g.size();
  }
  gs.groups_ = std::move(groups);
  gs.disjoint_ = std::all_of(gs.membership_.begin(), gs.membership_.end(),
                             [](std::size_t c) { return c <= 1; });
  gs.covers_all_ = std::all_of(gs.membership_.begin(), gs.membership_.end(),
                               [](std::size_t c) { return c >= 1; });
  return gs;
}

GroupSet GroupSet::from_one_based(const std::vector<IndexList>& groups, std::size_t n) {
  std::vector<IndexList> zero(groups.size());
  for (std::size_t j = 0; j < groups.size(); ++j) {
    zero[j].reserve(groups[j].size());
    for (std::size_t i : groups[j]) {
      require(i >= 1 && i <= n, "GroupSet: index " + std::to_string(i) + " outside [1, " +
                                    std::to_string(n) + "]");
      zero[j].push_back(i - 1);
    }
  }
  return from_zero_based(std::move(zero), n);
}

std::vector<IndexList> GroupSet::one_based() const {
  std::vector<IndexList> out = groups_;
  for (auto& g : out)
    for (auto& i : g) ++i;
  return out;
}

double exclusive_norm_sq(std::span<const double> w, const GroupSet& groups) {
  require(w.size() == groups.n(), "exclusive_norm_sq: dimension mismatch");
  double total = 0.0;
  for (const auto& g : groups.groups()) {
    double s = 0.0;
    for (std::size_t i : g) s += std::fabs(w[i]);
    total += s * s;
  }
  return total;
}

Matrix overlap_matrix(const GroupSet& groups) {
  Matrix Q(groups.n(), groups.n());
  for (const auto& g : groups.groups())
    for (std::size_t i : g)
      for (std::size_t j : g) Q(i, j) += 1.0;
  return Q;
}

void apply_overlap(const GroupSet& groups, std::span<const double> u, std::span<double> out) {
  require(u.size() == groups.n() && out.size() == groups.n(), "apply_overlap: dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& g : groups.groups()) {
    double s = 0.0;
    for (std::size_t i : g) s += u[i];
    for (std::size_t i : g) out[i] += s;
  }
}

double overlap_quadratic(const GroupSet& groups, std::span<const double> u) {
  require(u.size() == groups.n(), "overlap_quadratic: dimension mismatch");
  double total = 0.0;
  for (const auto& g : groups.groups()) {
    double s = 0.0;
    for (std::size_t i : g) s += u[i];
    total += s * s;
  }
  return total;
}

GroupSet random_grouping(std::size_t n, std::size_t m, Rng& rng) {
  require(m >= 1 && m <= n, "random_grouping: need 1 <= m <= n");
  IndexList perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);
  const std::size_t base = n / m;
  const std::size_t extra = n % m;
  std::vector<IndexList> groups(m);
  std::size_t pos = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t len = base + (j < extra ? 1 : 0);
    groups[j].assign(perm.begin() + static_cast<std::ptrdiff_t>(pos),
                     perm.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  return GroupSet::from_zero_based(std::move(groups), n);
}

GroupSet random_grouping(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  return random_grouping(n, m, rng);
}

Support Support::from_zero_based(IndexList indices, std::size_t n) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  require(indices.empty() || indices.back() < n, "Support: index out of range");
  return Support{n, std::move(indices)};
}

std::optional<double> group_balance_ratio(const GroupSet& groups, const Support& support) {
  require(support.n == groups.n(), "group_balance_ratio: support over a different n");
  std::vector<char> is_true(groups.n(), 0);
  for (std::size_t i : support.indices) is_true[i] = 1;
  std::size_t lo = SIZE_MAX;
  std::size_t hi = 0;
  for (const auto& g : groups.groups()) {
    std::size_t count = 0;
    for (std::size_t i : g) count += is_true[i];
    lo = std::min(lo, count);
    hi = std::max(hi, count);
  }
  if (lo == 0) return std::nullopt;
  return static_cast<double>(hi) / static_cast<double>(lo);
}

std::size_t suggest_group_count(std::size_t s, double c) {
  require(s >= 2, "suggest_group_count: s must be at least 2");
  require(c >= 0.0, "suggest_group_count: c must be nonnegative");
  const double raw = std::round(c * static_cast<double>(s) / std::log(static_cast<double>(s)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(raw));
}

double BalanceSimulation::success_fraction() const {
  return trials ? static_cast<double>(within_bound) / static_cast<double>(trials) : 0.0;
}

double BalanceSimulation::unbalanced_fraction() const {
  return trials ? static_cast<double>(unbalanced) / static_cast<double>(trials) : 0.0;
}

BalanceSimulation simulate_balance(std::size_t n, std::size_t s, std::size_t m, double t,
                                   std::size_t trials, std::uint64_t seed) {
  require(s >= 1 && s <= n, "simulate_balance: need 1 <= s <= n");
  require(m >= 1 && m <= n, "simulate_balance: need 1 <= m <= n");
  require(t >= 0.0 && t < 1.0, "simulate_balance: t must lie in [0, 1)");
  require(trials >= 1, "simulate_balance: trials must be positive");
  BalanceSimulation sim;
  sim.trials = trials;
  sim.bound = (1.0 + t) / (1.0 - t);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, trial));
    Support support = Support::from_zero_based(rng.sample(n, s), n);
    const GroupSet groups = random_grouping(n, m, rng);
    const auto ratio = group_balance_ratio(groups, support);
    if (!ratio) {
      ++sim.unbalanced;
      continue;
    }
    sim.worst_ratio = std::max(sim.worst_ratio, *ratio);
    if (*ratio <= sim.bound) ++sim.within_bound;
  }
  return sim;
}

}  // namespace exsp
