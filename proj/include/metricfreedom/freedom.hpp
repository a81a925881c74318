#pragma once

#include "metricfreedom/distance.hpp"
#include "metricfreedom/error.hpp"
#include "metricfreedom/records.hpp"
#include "metricfreedom/stats.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace mf {

/// Average ranks (1-based); tied values share the mean of the positions they cover.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> fractional_ranks(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index m = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ranks(m);
  Eigen::Index start = 0;
  while (start < m) {
    Eigen::Index stop = start + 1;
    while (stop < m && values(order[stop]) == values(order[start])) ++stop;
    // positions start+1 .. stop share their average
    const Scalar avg = Scalar(start + 1 + stop) / Scalar(2);
    for (Eigen::Index k = start; k < stop; ++k) ranks(order[k]) = avg;
    start = stop;
  }
  return ranks;
}

template <typename Derived>
bool all_equal(const Eigen::DenseBase<Derived>& values) {
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) != values(0)) return false;
  }
  return true;
}

/// Spearman rank correlation: Pearson correlation of the fractional ranks.
/// Throws ConstantSeries when either side is fully tied.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar spearman_rho(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "spearman_rho needs equal-length inputs");
  if (all_equal(a) || all_equal(b)) throw Error(ErrorCode::ConstantSeries, "spearman_rho of a constant series");
  return stats::pearson(fractional_ranks(a), fractional_ranks(b));
}

/// Mantel statistic: Spearman correlation between the upper triangles of a
/// behavioral and a score distance matrix.
template <typename Scalar>
Scalar mantel_spearman(const BasicDistanceMatrix<Scalar>& behavior, const BasicDistanceMatrix<Scalar>& score) {
  if (behavior.n() != score.n()) {
    throw Error(ErrorCode::DimMismatch, "behavior matrix is " + std::to_string(behavior.n()) + "x" +
                                            std::to_string(behavior.n()) + ", score matrix is " +
                                            std::to_string(score.n()) + "x" + std::to_string(score.n()));
  }
  if (behavior.n() < 3) {
    throw Error(ErrorCode::NTooSmall, "Mantel statistic needs n >= 3 runs, got " + std::to_string(behavior.n()));
  }
  const auto ub = behavior.upper_triangle();
  const auto us = score.upper_triangle();
  if (all_equal(us)) throw Error(ErrorCode::DegenerateScores, "all score distances tie; freedom is undefined");
  if (all_equal(ub)) throw Error(ErrorCode::DegenerateBehavior, "all behavioral distances tie; freedom is undefined");
  return stats::pearson(fractional_ranks(ub), fractional_ranks(us));
}

enum class Aggregation { PerDataset, PerQuestionMedian };

const char* to_string(Aggregation aggregation) noexcept;

struct FreedomEstimate {
  double F = 0.0;
  double r_M = 0.0;
  long n_runs = 0;
  long n_pairs = 0;
  Aggregation aggregation = Aggregation::PerDataset;
  std::optional<double> sigma_F;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  int questions_used = 0;
  int questions_excluded = 0;
  int resamples_used = 0;
  int resamples_skipped = 0;
};

/// F = 1 - r_M for a single pair of matrices (PER_DATASET aggregation).
FreedomEstimate metric_freedom(const DistanceMatrix& behavior, const DistanceMatrix& score);

/// F over every run of one dataset. For COSINE, runs without a trace vector are
/// dropped; MissingTrace is raised only if fewer than three remain.
FreedomEstimate per_dataset_freedom(std::span<const RunRecord> runs, const DistanceSpec& spec);

/// Median F over the mixed questions. Questions that are too small or
/// degenerate are skipped and counted in questions_excluded.
FreedomEstimate per_question_freedom(std::span<const QuestionGroup> groups, const DistanceSpec& spec,
                                     double score_tolerance = kMixedScoreTolerance);

/// Two-sided Mantel permutation p-value. Each permutation relabels the
/// behavioral matrix (rows and columns jointly); permutation i draws from
/// substream i of the seed.
double mantel_permutation_p(const DistanceMatrix& behavior, const DistanceMatrix& score, int n_perm,
                            std::uint64_t seed);

}  // namespace mf
