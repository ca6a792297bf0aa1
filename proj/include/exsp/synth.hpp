#pragma once

#include <cstddef>
#include <cstdint>

#include "exsp/groups.hpp"
#include "exsp/linalg.hpp"

namespace exsp {

/// Planted sparse regression data, y = X w* + sigma * noise.
struct ElassoDataset {
  Matrix X;  // N x n, iid N(0, 1)
  Vector w_star;
  Vector y;
  GroupSet groups;
  double sigma = 0.0;
  /// 0.4 / ||w*||_1, for the penalty written as lambda ||w||_e^2.
  double lambda_suggested = 0.0;

  /// The same weight for the (lambda / 2) ||w||_e^2 convention the solvers use.
  double solver_lambda() const { return 2.0 * lambda_suggested; }
};

/// Contiguous disjoint groups (sizes differ by at most one), k_per_group
/// planted N(0, 1) entries at uniform positions within each group.
/// Draw order: X column by column, within-group positions, values, noise.
ElassoDataset gen_elasso_disjoint(std::size_t n, std::size_t N, std::size_t m,
                                  std::size_t k_per_group, double sigma, std::uint64_t seed);

/// m random groups, each a uniform subset of {0..n-1} with size uniform in
/// [size_min, size_max]. Per group, up to k_per_group positions are drawn from
/// its members that are still zero, so shared indices are planted once.
/// Draw order: X, group sizes and members, positions, values, noise.
ElassoDataset gen_elasso_overlap(std::size_t n, std::size_t N, std::size_t m, std::size_t size_min,
                                 std::size_t size_max, std::size_t k_per_group, double sigma,
                                 std::uint64_t seed);

/// Two-class data around a planted classifier with one N(0, 1) nonzero per
/// group: sample columns are X0 + d w* (label +1, first half) and X0 - d w*
/// (label -1, second half).
struct EsvmDataset {
  Matrix X;  // n x samples
  Vector labels;
  Vector w_star;
  GroupSet groups;
  double d = 0.0;
};

/// n features split uniformly at random into m groups; m samples (m even).
/// Draw order: grouping shuffle, one position per group, values, then X0
/// column by column. The classifier depends only on (n, m, seed).
EsvmDataset gen_esvm(std::size_t n, std::size_t m, double d, std::uint64_t seed);

/// Fresh samples around an existing classifier: first ceil(count / 2) are +1.
struct LabeledSamples {
  Matrix X;  // n x count
  Vector labels;
};
LabeledSamples draw_esvm_samples(std::span<const double> w_star, double d, std::size_t count,
                                 std::uint64_t seed);

/// Misclassification rate of sign(w^T x) on the sample columns.
double misclassification_rate(std::span<const double> w, const LabeledSamples& samples);

/// Phi(-d ||w*||): error of w* when its margin is N(d ||w*||^2, ||w*||^2).
double analytic_error(double d, double w_norm);

struct MarginTuning {
  double d = 0.0;
  double holdout_error = 0.0;
  double analytic_error = 0.0;
  std::size_t holdout_size = 0;
};

/// Bisection on d so that the planted classifier of gen_esvm(n, m, ., seed)
/// misclassifies target_error of a fresh holdout with max(10 m, 10000)
/// samples. Throws NumericalError when no d brackets the target.
MarginTuning tune_margin_scale(std::size_t n, std::size_t m, double target_error,
                               std::uint64_t seed);

}  // namespace exsp
