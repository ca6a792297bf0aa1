#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "exsp/linalg.hpp"

namespace exsp {

class Rng;

using IndexList = std::vector<std::size_t>;

/// Validated collection of feature-index groups over n features.
///
/// Indices are 0-based inside the library; the one-based factory and the JSON
/// format use 1-based indices. Each group is stored sorted and deduplicated.
class GroupSet {
 public:
  /// Throws InvalidArgument for n == 0, no groups, an empty group, or an
  /// index outside [1, n].
  static GroupSet from_one_based(const std::vector<IndexList>& groups, std::size_t n);
  /// Same checks with indices in [0, n).
  static GroupSet from_zero_based(std::vector<IndexList> groups, std::size_t n);

  std::size_t n() const { return n_; }
  std::size_t size() const { return groups_.size(); }
  const IndexList& group(std::size_t j) const { return groups_[j]; }
  const std::vector<IndexList>& groups() const { return groups_; }

  bool is_disjoint() const { return disjoint_; }
  bool covers_all() const { return covers_all_; }

  /// Sum of group sizes (length of the stacked per-group dual vector).
  std::size_t total_size() const { return total_size_; }
  /// Number of groups containing each feature; the diagonal of the overlap matrix.
  const std::vector<std::size_t>& membership() const { return membership_; }

  std::vector<IndexList> one_based() const;

  friend bool operator==(const GroupSet& a, const GroupSet& b) {
    return a.n_ == b.n_ && a.groups_ == b.groups_;
  }

 private:
  GroupSet() = default;

  std::size_t n_ = 0;
  std::vector<IndexList> groups_;
  std::vector<std::size_t> membership_;
  std::size_t total_size_ = 0;
  bool disjoint_ = false;
  bool covers_all_ = false;
};

/// Sum over groups of ||w_g||_1^2. Coordinates in no group contribute nothing.
double exclusive_norm_sq(std::span<const double> w, const GroupSet& groups);

/// Dense overlap matrix: Q_ij counts the groups holding both i and j, Q_ii the
/// groups holding i. u^T Q u equals the sum over groups of (sum_{i in g} u_i)^2.
Matrix overlap_matrix(const GroupSet& groups);

/// out = Q u computed group by group (per-group sums scattered back), without
/// forming Q. Matches overlap_matrix(groups) * u up to rounding.
void apply_overlap(const GroupSet& groups, std::span<const double> u, std::span<double> out);

/// Sum over groups of (sum_{i in g} u_i)^2, i.e. u^T Q u.
double overlap_quadratic(const GroupSet& groups, std::span<const double> u);

/// Uniform random partition of {0..n-1} into m groups whose sizes differ by at
/// most one: Fisher-Yates shuffle, then contiguous chunks with the first
/// n mod m chunks one larger.
GroupSet random_grouping(std::size_t n, std::size_t m, std::uint64_t seed);
GroupSet random_grouping(std::size_t n, std::size_t m, Rng& rng);

/// Set of "true" features.
struct Support {
  std::size_t n = 0;
  IndexList indices;  // 0-based, sorted, unique

  static Support from_zero_based(IndexList indices, std::size_t n);
  std::size_t size() const { return indices.size(); }
};

/// max_j |support ∩ g_j| / min_j |support ∩ g_j|. std::nullopt is the
/// "unbalanced" outcome: some group received no true feature.
std::optional<double> group_balance_ratio(const GroupSet& groups, const Support& support);

/// Monte-Carlo tally of the random grouping's balance over seeded trials.
struct BalanceSimulation {
  std::size_t trials = 0;
  std::size_t within_bound = 0;  // ratio <= bound
  std::size_t unbalanced = 0;    // some group received no true feature
  double bound = 0.0;            // (1 + t) / (1 - t)
  double worst_ratio = 0.0;      // over balanced trials

  double success_fraction() const;
  double unbalanced_fraction() const;
};

/// Each trial draws a uniform support of size s from {0..n-1}, then a
/// random_grouping(n, m), both from Rng(derive_seed(seed, trial)). Requires
/// 1 <= s <= n, 1 <= m <= n, 0 <= t < 1 and trials >= 1.
BalanceSimulation simulate_balance(std::size_t n, std::size_t s, std::size_t m, double t,
                                   std::size_t trials, std::uint64_t seed);

/// max(1, round(c * s / ln s)); requires s >= 2 and c >= 0.
std::size_t suggest_group_count(std::size_t s, double c = 1.0);

}  // namespace exsp
