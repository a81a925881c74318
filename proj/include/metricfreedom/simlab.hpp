#pragma once

// Synthetic validation lab: the extremal scoring landscape used to probe the
// lift bounds, and a greedy-fix model of iterative refinement.

#include "metricfreedom/freedom.hpp"
#include "metricfreedom/random.hpp"
#include "metricfreedom/records.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace mf::simlab {

/// Distance from x to the nearest multiple of 1/k: a 1-Lipschitz triangle
/// wave with period 1/k and range [0, 1/(2k)].
template <typename Scalar>
Scalar scrambler_g(Scalar x, long k) {
  const Scalar y = x * static_cast<Scalar>(k);
  return std::abs(y - std::round(y)) / static_cast<Scalar>(k);
}

enum class SupportConvention {
  EqualWidth,   // P0 = Unif[0, w], Ppi = Unif[W, W + w], w = 1/2 - W; W1 = W exactly
  ProofLiteral  // P0 = Unif[0, 1/2], Ppi = Unif[1/2, 1/2 + W]
};

struct LandscapeConfig {
  double L0 = 1.0;
  double beta = 1.0;
  long k = 10;
  double W = 0.2;
  int n_runs = 200;
  int n_eval = 50000;
  std::uint64_t seed = 42;
  SupportConvention support = SupportConvention::EqualWidth;
};

void check(const LandscapeConfig& cfg);

/// s(x) = beta x + (L0 - beta) g(x); L0-Lipschitz.
template <typename Scalar>
Scalar score_beta(Scalar x, const LandscapeConfig& cfg) {
  return static_cast<Scalar>(cfg.beta) * x +
         static_cast<Scalar>(cfg.L0 - cfg.beta) * scrambler_g(x, cfg.k);
}

/// Freedom of the landscape from n_runs uniform positions. The positions come
/// from a fixed substream of the seed, so every beta sees the same sample.
FreedomEstimate landscape_freedom(const LandscapeConfig& cfg);

/// n_runs landscape samples as run records: a one-element vector output
/// holding the position, and the landscape score (requires L0 <= 1).
std::vector<RunRecord> sample_landscape_runs(const LandscapeConfig& cfg);

struct Calibration {
  double beta = 0.0;
  double achieved_F = 0.0;
  int steps = 0;
};

/// Bisection on beta in (0, L0] until |F(beta) - target_F| <= tol. Throws
/// CalibrationFailed after 60 steps.
Calibration calibrate_beta(double target_F, LandscapeConfig cfg, double tol);

struct LandscapeResult {
  double beta = 0.0;
  long k = 0;
  double F_hat = 0.0;
  double lift_hat = 0.0;
  double W1_hat = 0.0;
  double lower_bound = 0.0;           // (L0 / 4) (1 - F_hat) W1_hat
  double upper_bound_appendix = 0.0;  // appendix form with delta_n = 0
  bool within_bounds = false;
};

inline constexpr double kLandscapeTolerance = 0.02;

LandscapeResult simulate_landscape(const LandscapeConfig& cfg, double tol = kLandscapeTolerance);

/// Smallest frequency meeting k >= 4 L0 / (beta W^2).
long required_frequency(double L0, double beta, double W);

struct LandscapeCell {
  double target_F = 0.0;
  Calibration calibration;
  LandscapeResult result;
};

struct LandscapeGridOptions {
  double calibration_tol = 0.02;
  double bound_tol = kLandscapeTolerance;
  bool enforce_frequency_rule = true;  // raise k to required_frequency after calibrating
};

/// Calibrates beta for each target at cfg.k, applies the frequency rule and
/// simulates the shifted-support lift.
std::vector<LandscapeCell> landscape_grid(std::span<const double> targets, const LandscapeConfig& cfg,
                                          const LandscapeGridOptions& options = {});

void write_landscape_csv(std::ostream& out, std::span<const LandscapeCell> cells);

struct IteratorConfig {
  int n_population = 20;
  double initial_low = 0.0;  // initial scores ~ Unif[initial_low, initial_high]
  double initial_high = 0.5;
  double lambda = 0.0;
  double rho = 0.25;
  double gamma = 0.2;
  double D_max = 0.2;
  int T = 400;
  std::uint64_t seed = 42;
};

void check(const IteratorConfig& cfg);

/// One greedy fix: the lowest score rises by gamma (capped at 1) and a
/// round(rho (n - 1)) subset of the others is displaced, each losing
/// lambda * delta with delta ~ Unif(0, D_max). The displacement scales with
/// the realized fix over gamma, so a fix that changes nothing displaces nothing.
Eigen::VectorXd greedy_fix_step(const Eigen::VectorXd& scores, const IteratorConfig& cfg, Rng& rng);

enum class Classification { Converged, Oscillated, Plateau, Budget };

const char* to_string(Classification c) noexcept;

inline constexpr double kTrajectoryEpsilon = 1e-6;

struct Trajectory {
  std::vector<double> S;  // mean score S_0 .. S_T
  Classification classification = Classification::Budget;
  std::optional<int> first_decrease;
};

/// Classifies a mean-score path. OSCILLATED: some S_t < S_{t-1} - eps.
/// CONVERGED: never decreases and the last three steps gain < eps. PLATEAU:
/// only sub-eps dips and the last three steps move < eps. BUDGET otherwise.
Trajectory classify(std::vector<double> S, double eps = kTrajectoryEpsilon);

Trajectory simulate_iterator(const IteratorConfig& cfg);

void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories,
                            std::span<const std::uint64_t> seeds);

struct SyntheticRunsConfig {
  std::string dataset_id = "synthetic";
  int n_questions = 1;
  int n_runs = 40;
  double noise_low = 0.1;  // per-question score noise sd ~ Unif[noise_low, noise_high]
  double noise_high = 0.1;
  std::uint64_t seed = 42;
};

/// Concordant synthetic runs: position x ~ Unif[0,1] stored as a one-element
/// vector output and as a 2-D trace vector at angle x pi/2; score is
/// clamp(x + noise N(0,1), 0, 1).
RunSet synthetic_runs(const SyntheticRunsConfig& cfg);

}  // namespace mf::simlab
