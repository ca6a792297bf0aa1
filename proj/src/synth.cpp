#include "exsp/synth.hpp"

#include <algorithm>
#include <cmath>

#include "exsp/errors.hpp"
#include "exsp/rng.hpp"

namespace exsp {
namespace {

Matrix gaussian_columns(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix X(rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) X(r, c) = rng.normal();
  }
  return X;
}

GroupSet contiguous_groups(std::size_t n, std::size_t m) {
  std::vector<IndexList> groups(m);
  const std::size_t base = n / m;
  const std::size_t extra = n % m;
  std::size_t next = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t size = base + (j < extra ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) groups[j].push_back(next++);
  }
  return GroupSet::from_zero_based(std::move(groups), n);
}

// Values for `positions` in order, then noise; fills w*, y and lambda.
ElassoDataset finish_elasso(Matrix X, GroupSet groups, const IndexList& positions, double sigma,
                            Rng& rng) {
  Vector w_star(X.cols(), 0.0);
  for (std::size_t i : positions) w_star[i] = rng.normal();
  Vector y = matvec(X, w_star);
  for (double& yi : y) yi += sigma * rng.normal();
  const double l1 = norm1(w_star);
  return {std::move(X), std::move(w_star), std::move(y), std::move(groups), sigma,
          l1 > 0.0 ? 0.4 / l1 : 0.0};
}

struct PlantedClassifier {
  GroupSet groups;
  Vector w_star;
};

PlantedClassifier draw_classifier(std::size_t n, std::size_t m, Rng& rng) {
  require(m >= 2 && m % 2 == 0, "gen_esvm: m must be even and positive");
  require(n >= m, "gen_esvm: need at least one feature per group (n >= m)");
  PlantedClassifier pc{random_grouping(n, m, rng), Vector(n, 0.0)};
  IndexList positions;
  positions.reserve(m);
  for (const auto& g : pc.groups.groups()) positions.push_back(g[rng.below(g.size())]);
  for (std::size_t i : positions) pc.w_star[i] = rng.normal();
  return pc;
}

// w*^T x0 for `count` fresh N(0, I) samples; each x0 is drawn as one column.
Vector holdout_projections(std::span<const double> w_star, std::size_t count, Rng& rng) {
  Vector p(count, 0.0);
  for (std::size_t c = 0; c < count; ++c) {
    double s = 0.0;
    for (double wi : w_star) s += wi * rng.normal();
    p[c] = s;
  }
  return p;
}

double label_for(std::size_t i, std::size_t count) { return i < (count + 1) / 2 ? 1.0 : -1.0; }

// Error of w* when sample i has margin p_i + label_i * d * ||w*||^2.
double holdout_error(const Vector& proj, double d, double w_sq) {
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    const double label = label_for(i, proj.size());
    const double score = proj[i] + label * d * w_sq;
    const double predicted = score >= 0.0 ? 1.0 : -1.0;
    wrong += predicted != label ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(proj.size());
}

}  // namespace

ElassoDataset gen_elasso_disjoint(std::size_t n, std::size_t N, std::size_t m,
                                  std::size_t k_per_group, double sigma, std::uint64_t seed) {
  require(n >= 1 && N >= 1, "gen_elasso_disjoint: n and N must be positive");
  require(m >= 1 && m <= n, "gen_elasso_disjoint: need 1 <= m <= n");
  require(k_per_group <= n / m, "gen_elasso_disjoint: k_per_group exceeds the group size");
  require(sigma >= 0.0 && std::isfinite(sigma), "gen_elasso_disjoint: sigma must be >= 0");
  Rng rng(seed);
  Matrix X = gaussian_columns(N, n, rng);
  GroupSet groups = contiguous_groups(n, m);
  IndexList positions;
  for (const auto& g : groups.groups()) {
    for (std::size_t local : rng.sample(g.size(), k_per_group)) positions.push_back(g[local]);
  }
  return finish_elasso(std::move(X), std::move(groups), positions, sigma, rng);
}

ElassoDataset gen_elasso_overlap(std::size_t n, std::size_t N, std::size_t m, std::size_t size_min,
                                 std::size_t size_max, std::size_t k_per_group, double sigma,
                                 std::uint64_t seed) {
  require(n >= 1 && N >= 1 && m >= 1, "gen_elasso_overlap: n, N and m must be positive");
  require(size_min >= 1 && size_min <= size_max && size_max <= n,
          "gen_elasso_overlap: need 1 <= size_min <= size_max <= n");
  require(sigma >= 0.0 && std::isfinite(sigma), "gen_elasso_overlap: sigma must be >= 0");
  Rng rng(seed);
  Matrix X = gaussian_columns(N, n, rng);
  std::vector<IndexList> members(m);
  for (auto& g : members) {
    const std::size_t size = size_min + rng.below(size_max - size_min + 1);
    g = rng.sample(n, size);
  }
  GroupSet groups = GroupSet::from_zero_based(members, n);

  std::vector<bool> planted(n, false);
  IndexList positions;
  for (const auto& g : groups.groups()) {
    IndexList free;
    for (std::size_t i : g)
      if (!planted[i]) free.push_back(i);
    const std::size_t k = std::min(k_per_group, free.size());
    for (std::size_t local : rng.sample(free.size(), k)) {
      planted[free[local]] = true;
      positions.push_back(free[local]);
    }
  }
  return finish_elasso(std::move(X), std::move(groups), positions, sigma, rng);
}

EsvmDataset gen_esvm(std::size_t n, std::size_t m, double d, std::uint64_t seed) {
  require(std::isfinite(d), "gen_esvm: d must be finite");
  Rng rng(seed);
  PlantedClassifier pc = draw_classifier(n, m, rng);
  Matrix X = gaussian_columns(n, m, rng);
  Vector labels(m);
  for (std::size_t c = 0; c < m; ++c) {
    labels[c] = c < m / 2 ? 1.0 : -1.0;
    for (std::size_t r = 0; r < n; ++r) X(r, c) += labels[c] * d * pc.w_star[r];
  }
  return {std::move(X), std::move(labels), std::move(pc.w_star), std::move(pc.groups), d};
}

LabeledSamples draw_esvm_samples(std::span<const double> w_star, double d, std::size_t count,
                                 std::uint64_t seed) {
  require(count >= 1, "draw_esvm_samples: count must be positive");
  require(std::isfinite(d), "draw_esvm_samples: d must be finite");
  Rng rng(seed);
  LabeledSamples s{gaussian_columns(w_star.size(), count, rng), Vector(count)};
  for (std::size_t c = 0; c < count; ++c) {
    s.labels[c] = label_for(c, count);
    for (std::size_t r = 0; r < w_star.size(); ++r) s.X(r, c) += s.labels[c] * d * w_star[r];
  }
  return s;
}

double misclassification_rate(std::span<const double> w, const LabeledSamples& samples) {
  require(w.size() == samples.X.rows(), "misclassification_rate: dimension mismatch");
  require(samples.labels.size() == samples.X.cols() && !samples.labels.empty(),
          "misclassification_rate: one label per sample required");
  const Vector scores = matvec_t(samples.X, w);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double predicted = scores[i] >= 0.0 ? 1.0 : -1.0;
    wrong += predicted != samples.labels[i] ? 1 : 0;
  }
  return static_cast<double>(wrong) / static_cast<double>(scores.size());
}

double analytic_error(double d, double w_norm) {
  return 0.5 * std::erfc(d * w_norm / std::sqrt(2.0));
}

MarginTuning tune_margin_scale(std::size_t n, std::size_t m, double target_error,
                               std::uint64_t seed) {
  require(target_error > 0.0 && target_error < 0.5,
          "tune_margin_scale: target_error must lie in (0, 0.5)");
  Rng rng(seed);
  const PlantedClassifier pc = draw_classifier(n, m, rng);
  const double w_sq = norm2_sq(pc.w_star);
  const double w_norm = std::sqrt(w_sq);
  if (!(w_norm > 0.0) || !std::isfinite(w_norm)) {
    throw NumericalError("tune_margin_scale: planted classifier is zero; cannot bracket");
  }

  MarginTuning out;
  out.holdout_size = std::max<std::size_t>(10 * m, 10000);
  Rng holdout_rng(derive_seed(seed, 1));
  const Vector proj = holdout_projections(pc.w_star, out.holdout_size, holdout_rng);

  double lo = 0.0;
  double hi = 1.0 / w_norm;
  int doublings = 0;
  while (holdout_error(proj, hi, w_sq) > target_error) {
    if (++doublings > 60) throw NumericalError("tune_margin_scale: bisection failed to bracket");
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (holdout_error(proj, mid, w_sq) > target_error) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.d = hi;
  out.holdout_error = holdout_error(proj, hi, w_sq);
  out.analytic_error = analytic_error(hi, w_norm);
  if (std::fabs(out.holdout_error - target_error) > 0.01) {
    throw NumericalError("tune_margin_scale: holdout error cannot reach the target within 1 point");
  }
  return out;
}

}  // namespace exsp
