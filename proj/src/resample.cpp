#include "metricfreedom/resample.hpp"

#include "metricfreedom/io.hpp"
#include "metricfreedom/random.hpp"
#include "metricfreedom/stats.hpp"
#include "metricfreedom/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace mf {

namespace {

void check(const BootstrapConfig& config) {
  if (config.B < 100) throw Error(ErrorCode::InvalidArgument, "bootstrap needs B >= 100");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "ci_level must lie in (0, 1)");
  }
}

/// Fills dispersion fields from the non-degenerate resampled values.
void summarize(FreedomEstimate& est, std::vector<double> values, int skipped, const BootstrapConfig& config) {
  if (skipped * 2 > config.B) {
    throw Error(ErrorCode::BootstrapCollapse,
                std::to_string(skipped) + " of " + std::to_string(config.B) + " resamples were degenerate");
  }
  est.resamples_used = static_cast<int>(values.size());
  est.resamples_skipped = skipped;
  est.sigma_F = stats::sample_sd(values);
  std::sort(values.begin(), values.end());
  const double tail = (1.0 - config.ci_level) / 2.0;
  // Percentile interval, widened when needed so it always covers the point estimate.
  est.ci_low = std::min(stats::quantile_sorted(values, tail), est.F);
  est.ci_high = std::max(stats::quantile_sorted(values, 1.0 - tail), est.F);
}

std::vector<RunRecord> usable_runs(std::span<const RunRecord> runs, const DistanceSpec& spec) {
  std::vector<RunRecord> kept;
  for (const auto& r : runs) {
    if (spec.kind != DistanceKind::Cosine || r.trace_vector) kept.push_back(r);
  }
  return kept;
}

/// M-of-N draw without replacement; returns the chosen indices.
std::vector<std::size_t> draw_without_replacement(std::size_t population, std::size_t count, Rng& rng) {
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(count);
  return idx;
}

}  // namespace

FreedomEstimate bootstrap_freedom(std::span<const RunRecord> runs, const DistanceSpec& spec,
                                  const BootstrapConfig& config) {
  check(config);
  FreedomEstimate est = per_dataset_freedom(runs, spec);
  const auto kept = usable_runs(runs, spec);
  const DistanceMatrix behavior = build_distance_matrix(kept, spec);
  const DistanceMatrix score = score_distance_matrix(kept);
  const auto n = static_cast<Eigen::Index>(kept.size());

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(config.B));
  int skipped = 0;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (int b = 0; b < config.B; ++b) {
    Rng rng = substream(config.seed, static_cast<std::uint64_t>(b));
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    for (auto& i : idx) i = pick(rng);
    try {
      values.push_back(metric_freedom(behavior.select(idx), score.select(idx)).F);
    } catch (const Error& e) {
      if (!is_degenerate(e.code())) throw;
      ++skipped;
    }
  }
  summarize(est, std::move(values), skipped, config);
  return est;
}

FreedomEstimate bootstrap_freedom(std::span<const QuestionGroup> groups, const DistanceSpec& spec,
                                  const BootstrapConfig& config, double score_tolerance) {
  check(config);
  FreedomEstimate est = per_question_freedom(groups, spec, score_tolerance);

  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(config.B));
  int skipped = 0;
  std::vector<QuestionGroup> sample;
  for (int b = 0; b < config.B; ++b) {
    Rng rng = substream(config.seed, static_cast<std::uint64_t>(b));
    std::uniform_int_distribution<std::size_t> pick(0, groups.size() - 1);
    sample.clear();
    for (std::size_t k = 0; k < groups.size(); ++k) sample.push_back(groups[pick(rng)]);
    try {
      values.push_back(per_question_freedom(sample, spec, score_tolerance).F);
    } catch (const Error& e) {
      if (!is_degenerate(e.code())) throw;
      ++skipped;
    }
  }
  summarize(est, std::move(values), skipped, config);
  return est;
}

std::vector<StabilityPoint> subsample_stability(std::span<const RunRecord> runs, const DistanceSpec& spec,
                                                std::span<const int> n_grid, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  const double full = per_dataset_freedom(runs, spec).F;
  const auto kept = usable_runs(runs, spec);
  const DistanceMatrix behavior = build_distance_matrix(kept, spec);
  const DistanceMatrix score = score_distance_matrix(kept);

  std::vector<StabilityPoint> out;
  for (std::size_t g = 0; g < n_grid.size(); ++g) {
    const int n = n_grid[g];
    if (n < 3) throw Error(ErrorCode::NTooSmall, "subsample size must be >= 3, got " + std::to_string(n));
    if (static_cast<std::size_t>(n) > kept.size()) {
      throw Error(ErrorCode::InvalidArgument, "subsample size " + std::to_string(n) + " exceeds the " +
                                                  std::to_string(kept.size()) + " available runs");
    }
    std::vector<double> values;
    std::vector<double> errors;
    std::optional<Error> last_error;
    for (int t = 0; t < trials; ++t) {
      Rng rng = substream(substream_seed(seed, g), static_cast<std::uint64_t>(t));
      const auto chosen = draw_without_replacement(kept.size(), static_cast<std::size_t>(n), rng);
      const std::vector<Eigen::Index> idx(chosen.begin(), chosen.end());
      try {
        const double F = metric_freedom(behavior.select(idx), score.select(idx)).F;
        values.push_back(F);
        errors.push_back(std::abs(F - full));
      } catch (const Error& e) {
        if (!is_degenerate(e.code())) throw;
        last_error = e;
      }
    }
    if (values.empty()) throw *last_error;
    StabilityPoint p;
    p.n = n;
    p.mean_abs_error = stats::mean(errors);
    p.sd = stats::sample_sd(values);
    p.mcdiarmid = theory::mcdiarmid_envelope(n, p.mean_abs_error);
    p.trials_used = static_cast<int>(values.size());
    out.push_back(p);
  }
  return out;
}

const char* to_string(CellStatus status) noexcept {
  switch (status) {
    case CellStatus::Ok: return "OK";
    case CellStatus::TooFewRuns: return "TOO_FEW_RUNS";
    case CellStatus::Degenerate: return "DEGENERATE";
  }
  return "?";
}

std::vector<SweepCell> budget_sweep(const RunSet& grid, const DistanceSpec& spec, const SweepConfig& config) {
  if (config.M_list.empty() || config.N_list.empty()) {
    throw Error(ErrorCode::InvalidArgument, "M and N lists must be non-empty");
  }
  if (config.trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
  if (!(config.cost_per_run >= 0.0)) throw Error(ErrorCode::InvalidArgument, "cost per run must be >= 0");
  const int max_M = *std::max_element(config.M_list.begin(), config.M_list.end());
  const int max_N = *std::max_element(config.N_list.begin(), config.N_list.end());
  for (int v : config.M_list) {
    if (v < 1) throw Error(ErrorCode::InvalidArgument, "M values must be >= 1");
  }
  for (int v : config.N_list) {
    if (v < 1) throw Error(ErrorCode::InvalidArgument, "N values must be >= 1");
  }

  std::vector<QuestionGroup> eligible;
  for (auto& g : group_by_question(grid)) {
    if (g.runs.size() >= static_cast<std::size_t>(max_N)) eligible.push_back(std::move(g));
  }
  if (eligible.size() < static_cast<std::size_t>(max_M)) {
    throw Error(ErrorCode::GridUnderfull, "grid has " + std::to_string(eligible.size()) + " questions with >= " +
                                              std::to_string(max_N) + " runs; the sweep needs " +
                                              std::to_string(max_M));
  }

  std::vector<SweepCell> cells;
  std::uint64_t cell_index = 0;
  for (int M : config.M_list) {
    for (int N : config.N_list) {
      SweepCell cell;
      cell.M = M;
      cell.N = N;
      cell.cost = config.cost_per_run * static_cast<double>(M * N);
      const std::uint64_t cell_seed = substream_seed(config.seed, cell_index++);
      if (N < 3) {
        cell.status = CellStatus::TooFewRuns;
        cells.push_back(std::move(cell));
        continue;
      }
      std::vector<QuestionGroup> sample(static_cast<std::size_t>(M));
      for (int t = 0; t < config.trials; ++t) {
        Rng rng = substream(cell_seed, static_cast<std::uint64_t>(t));
        const auto questions =
            draw_without_replacement(eligible.size(), static_cast<std::size_t>(M), rng);
        for (std::size_t q = 0; q < questions.size(); ++q) {
          const QuestionGroup& src = eligible[questions[q]];
          sample[q].dataset_id = src.dataset_id;
          sample[q].question_id = src.question_id;
          sample[q].runs.clear();
          for (std::size_t r : draw_without_replacement(src.runs.size(), static_cast<std::size_t>(N), rng)) {
            sample[q].runs.push_back(src.runs[r]);
          }
        }
        try {
          cell.trial_F.push_back(per_question_freedom(sample, spec, config.score_tolerance).F);
        } catch (const Error& e) {
          if (!is_degenerate(e.code())) throw;
        }
      }
      if (cell.trial_F.empty()) {
        cell.status = CellStatus::Degenerate;
      } else {
        cell.F_hat = stats::mean(cell.trial_F);
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells) {
  out << "M,N,F_hat,cost,status\n";
  for (const auto& c : cells) {
    out << c.M << ',' << c.N << ',' << io::format_optional(c.F_hat) << ',' << io::format_double(c.cost) << ','
        << to_string(c.status) << '\n';
  }
}

}  // namespace mf
