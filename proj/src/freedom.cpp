#include "metricfreedom/freedom.hpp"

#include "metricfreedom/random.hpp"

#include <algorithm>
#include <cmath>

namespace mf {

const char* to_string(Aggregation aggregation) noexcept {
  return aggregation == Aggregation::PerDataset ? "dataset" : "question-median";
}

FreedomEstimate metric_freedom(const DistanceMatrix& behavior, const DistanceMatrix& score) {
  FreedomEstimate est;
  est.r_M = mantel_spearman(behavior, score);
  est.F = 1.0 - est.r_M;
  est.n_runs = behavior.n();
  est.n_pairs = est.n_runs * (est.n_runs - 1) / 2;
  est.aggregation = Aggregation::PerDataset;
  return est;
}

FreedomEstimate per_dataset_freedom(std::span<const RunRecord> runs, const DistanceSpec& spec) {
  if (!runs.empty()) {
    const auto& first = runs.front().dataset_id;
    for (const auto& r : runs) {
      if (r.dataset_id != first) {
        throw Error(ErrorCode::MixedDatasets, "per-dataset freedom given runs from '" + first + "' and '" +
                                                  r.dataset_id + "'");
      }
    }
  }

  std::vector<RunRecord> kept;
  if (spec.kind == DistanceKind::Cosine) {
    std::copy_if(runs.begin(), runs.end(), std::back_inserter(kept),
                 [](const RunRecord& r) { return r.trace_vector.has_value(); });
    if (kept.size() < 3 && kept.size() < runs.size()) {
      throw Error(ErrorCode::MissingTrace, std::to_string(kept.size()) + " of " + std::to_string(runs.size()) +
                                               " runs carry a trace vector; need at least 3");
    }
    runs = kept;
  }
  if (runs.size() < 3) {
    throw Error(ErrorCode::NTooSmall, "freedom needs at least 3 runs, got " + std::to_string(runs.size()));
  }
  return metric_freedom(build_distance_matrix(runs, spec), score_distance_matrix(runs));
}

FreedomEstimate per_question_freedom(std::span<const QuestionGroup> groups, const DistanceSpec& spec,
                                     double score_tolerance) {
  const auto mixed = filter_mixed_questions(groups, score_tolerance);
  if (mixed.empty()) {
    throw Error(ErrorCode::NoMixedQuestions,
                "no mixed questions remain after excluding all-success/all-failure questions (" +
                    std::to_string(groups.size()) + " questions examined)");
  }

  FreedomEstimate out;
  out.aggregation = Aggregation::PerQuestionMedian;
  out.questions_excluded = static_cast<int>(groups.size() - mixed.size());

  std::vector<double> freedoms;
  for (const auto& g : mixed) {
    try {
      const auto est = per_dataset_freedom(g.runs, spec);
      freedoms.push_back(est.F);
      out.n_runs += est.n_runs;
      out.n_pairs += est.n_pairs;
    } catch (const Error& e) {
      if (!is_degenerate(e.code())) throw;
      ++out.questions_excluded;
    }
  }
  if (freedoms.empty()) {
    throw Error(ErrorCode::NoUsableQuestions, std::to_string(mixed.size()) +
                                                  " mixed questions, none with >= 3 runs and non-degenerate distances");
  }
  out.questions_used = static_cast<int>(freedoms.size());
  out.F = stats::median(std::move(freedoms));
  out.r_M = 1.0 - out.F;
  return out;
}

double mantel_permutation_p(const DistanceMatrix& behavior, const DistanceMatrix& score, int n_perm,
                            std::uint64_t seed) {
  if (n_perm < 99) throw Error(ErrorCode::InvalidArgument, "n_perm must be >= 99");
  const double observed = mantel_spearman(behavior, score);
  const Eigen::Index n = behavior.n();

  // Ranks travel with their matrix cells, so a relabelling only reorders the
  // behavioral ranks; the score side and the denominator stay fixed.
  const Eigen::VectorXd rb = fractional_ranks(behavior.upper_triangle());
  const Eigen::VectorXd rs = fractional_ranks(score.upper_triangle());
  const Eigen::VectorXd cs = rs.array() - rs.mean();
  const double rb_mean = rb.mean();
  const double denom = std::sqrt((rb.array() - rb_mean).matrix().squaredNorm() * cs.squaredNorm());

  Eigen::MatrixXd rank_matrix = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0, k = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j, ++k) {
      rank_matrix(i, j) = rb(k) - rb_mean;
      rank_matrix(j, i) = rank_matrix(i, j);
    }
  }

  const double threshold = std::abs(observed) - 1e-12;
  std::vector<Eigen::Index> labels(static_cast<std::size_t>(n));
  long extreme = 0;
  for (int t = 0; t < n_perm; ++t) {
    std::iota(labels.begin(), labels.end(), Eigen::Index{0});
    Rng rng = substream(seed, static_cast<std::uint64_t>(t));
    std::shuffle(labels.begin(), labels.end(), rng);
    double num = 0.0;
    for (Eigen::Index i = 0, k = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j, ++k) num += rank_matrix(labels[i], labels[j]) * cs(k);
    }
    if (std::abs(num / denom) >= threshold) ++extreme;
  }
  return static_cast<double>(1 + extreme) / static_cast<double>(n_perm + 1);
}

}  // namespace mf
