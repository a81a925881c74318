#pragma once

#include "metricfreedom/distance.hpp"
#include "metricfreedom/freedom.hpp"
#include "metricfreedom/records.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace mf {

struct BootstrapConfig {
  int B = 1000;
  std::uint64_t seed = 42;
  double ci_level = 0.95;
};

/// Run-level bootstrap of per-dataset freedom. Fills sigma_F (standard
/// deviation of the resampled F) and a percentile interval at ci_level;
/// degenerate resamples are skipped and counted. Throws BootstrapCollapse
/// when more than half of the resamples are degenerate.
FreedomEstimate bootstrap_freedom(std::span<const RunRecord> runs, const DistanceSpec& spec,
                                  const BootstrapConfig& config);

/// Question-level bootstrap of the per-question median freedom.
FreedomEstimate bootstrap_freedom(std::span<const QuestionGroup> groups, const DistanceSpec& spec,
                                  const BootstrapConfig& config, double score_tolerance = kMixedScoreTolerance);

struct StabilityPoint {
  int n = 0;
  double mean_abs_error = 0.0;  // mean |F_n - F_full|
  double sd = 0.0;              // standard deviation of F_n
  double mcdiarmid = 0.0;       // 2 exp(-n t^2 / 8) at t = mean_abs_error, unclamped
  int trials_used = 0;
};

/// Subsampling without replacement at each size in n_grid.
std::vector<StabilityPoint> subsample_stability(std::span<const RunRecord> runs, const DistanceSpec& spec,
                                                std::span<const int> n_grid, int trials, std::uint64_t seed);

enum class CellStatus { Ok, TooFewRuns, Degenerate };

const char* to_string(CellStatus status) noexcept;

struct SweepCell {
  int M = 0;
  int N = 0;
  std::optional<double> F_hat;
  double cost = 0.0;
  CellStatus status = CellStatus::Ok;
  std::vector<double> trial_F;  // per-trial estimates, in trial order
};

struct SweepConfig {
  std::vector<int> M_list;
  std::vector<int> N_list;
  double cost_per_run = 0.17;
  int trials = 20;
  std::uint64_t seed = 42;
  double score_tolerance = kMixedScoreTolerance;
};

/// Evaluation-budget sweep over (M questions, N runs) cells. Each trial draws
/// M questions and N runs per question without replacement and takes the
/// per-question median freedom. Cells are returned M-major in list order.
std::vector<SweepCell> budget_sweep(const RunSet& grid, const DistanceSpec& spec, const SweepConfig& config);

/// CSV with header M,N,F_hat,cost,status.
void write_sweep_csv(std::ostream& out, std::span<const SweepCell> cells);

}  // namespace mf
