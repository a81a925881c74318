#include "metricfreedom/simlab.hpp"

#include "metricfreedom/io.hpp"
#include "metricfreedom/theory.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <ostream>

namespace mf::simlab {

namespace {

std::vector<double> uniform_positions(std::uint64_t seed, std::uint64_t stream, int n, double lo, double hi) {
  Rng rng = substream(seed, stream);
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (auto& x : xs) x = uniform(rng, lo, hi);
  return xs;
}

double mean_score(std::span<const double> xs, const LandscapeConfig& cfg) {
  double total = 0.0;
  for (double x : xs) total += score_beta(x, cfg);
  return total / static_cast<double>(xs.size());
}

}  // namespace

void check(const LandscapeConfig& cfg) {
  if (!(cfg.L0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "L0 must be > 0");
  if (!(cfg.beta > 0.0 && cfg.beta <= cfg.L0)) throw Error(ErrorCode::InvalidArgument, "beta must lie in (0, L0]");
  if (cfg.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
  if (!(cfg.W > 0.0 && cfg.W <= 0.5)) throw Error(ErrorCode::InvalidArgument, "W must lie in (0, 1/2]");
  if (cfg.n_runs < 3) throw Error(ErrorCode::InvalidArgument, "n_runs must be >= 3");
  if (cfg.n_eval < 1) throw Error(ErrorCode::InvalidArgument, "n_eval must be >= 1");
}

FreedomEstimate landscape_freedom(const LandscapeConfig& cfg) {
  check(cfg);
  const auto xs = uniform_positions(cfg.seed, 0, cfg.n_runs, 0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(xs.size());
  const auto behavior = build_distance_matrix<double>(
      n, [&](Eigen::Index i, Eigen::Index j) { return score_distance(xs[i], xs[j]); });
  const auto score = build_distance_matrix<double>(n, [&](Eigen::Index i, Eigen::Index j) {
    return score_distance(score_beta(xs[i], cfg), score_beta(xs[j], cfg));
  });
  return metric_freedom(behavior, score);
}

std::vector<RunRecord> sample_landscape_runs(const LandscapeConfig& cfg) {
  check(cfg);
  if (cfg.L0 > 1.0) throw Error(ErrorCode::InvalidArgument, "landscape runs need L0 <= 1 so scores stay in [0,1]");
  const auto xs = uniform_positions(cfg.seed, 0, cfg.n_runs, 0.0, 1.0);
  std::vector<RunRecord> runs;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    RunRecord r;
    r.dataset_id = "landscape";
    r.question_id = "q0";
    r.run_index = static_cast<std::int64_t>(i);
    r.output = VectorPayload{Eigen::VectorXd::Constant(1, xs[i])};
    r.score = std::clamp(score_beta(xs[i], cfg), 0.0, 1.0);
    runs.push_back(std::move(r));
  }
  return runs;
}

Calibration calibrate_beta(double target_F, LandscapeConfig cfg, double tol) {
  if (!(target_F >= 0.0 && target_F < 1.0)) throw Error(ErrorCode::InvalidArgument, "target F must lie in [0, 1)");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");

  cfg.beta = cfg.L0;
  const double at_top = landscape_freedom(cfg).F;
  if (std::abs(at_top - target_F) <= tol) return {cfg.L0, at_top, 0};

  double lo = 0.0;
  double hi = cfg.L0;
  double achieved = at_top;
  for (int step = 1; step <= 60; ++step) {
    cfg.beta = 0.5 * (lo + hi);
    achieved = landscape_freedom(cfg).F;
    if (std::abs(achieved - target_F) <= tol) return {cfg.beta, achieved, step};
    // F falls as beta grows
    if (achieved > target_F) {
      lo = cfg.beta;
    } else {
      hi = cfg.beta;
    }
  }
  throw Error(ErrorCode::CalibrationFailed, "no beta reached F = " + io::format_double(target_F) + " within " +
                                                io::format_double(tol) + " (last F = " +
                                                io::format_double(achieved) + "); raise n_runs");
}

long required_frequency(double L0, double beta, double W) {
  return static_cast<long>(std::ceil(4.0 * L0 / (beta * W * W)));
}

LandscapeResult simulate_landscape(const LandscapeConfig& cfg, double tol) {
  check(cfg);
  LandscapeResult out;
  out.beta = cfg.beta;
  out.k = cfg.k;
  out.F_hat = landscape_freedom(cfg).F;

  double base_lo = 0.0, base_hi = 0.5, skill_lo = 0.5, skill_hi = 0.5 + cfg.W;
  if (cfg.support == SupportConvention::EqualWidth) {
    const double width = 0.5 - cfg.W;
    base_hi = width;
    skill_lo = cfg.W;
    skill_hi = cfg.W + width;
  }
  const auto base = uniform_positions(cfg.seed, 1, cfg.n_eval, base_lo, base_hi);
  const auto skill = uniform_positions(cfg.seed, 2, cfg.n_eval, skill_lo, skill_hi);

  out.lift_hat = mean_score(skill, cfg) - mean_score(base, cfg);
  out.W1_hat = theory::wasserstein_1d(Eigen::Map<const Eigen::VectorXd>(skill.data(), cfg.n_eval),
                                      Eigen::Map<const Eigen::VectorXd>(base.data(), cfg.n_eval));
  out.lower_bound = cfg.L0 / 4.0 * (1.0 - out.F_hat) * out.W1_hat;
  theory::BoundInputs bound{cfg.L0, 1.0, std::clamp(out.F_hat, 0.0, 2.0), 0.0, out.W1_hat};
  out.upper_bound_appendix = theory::lift_upper_bound(bound, theory::BoundForm::AppendixStage4);
  out.within_bounds = out.lower_bound - tol <= out.lift_hat && out.lift_hat <= out.upper_bound_appendix + tol;
  return out;
}

std::vector<LandscapeCell> landscape_grid(std::span<const double> targets, const LandscapeConfig& cfg,
                                          const LandscapeGridOptions& options) {
  std::vector<LandscapeCell> cells;
  for (double target : targets) {
    LandscapeCell cell;
    cell.target_F = target;
    cell.calibration = calibrate_beta(target, cfg, options.calibration_tol);
    LandscapeConfig run = cfg;
    run.beta = cell.calibration.beta;
    if (options.enforce_frequency_rule) run.k = std::max(cfg.k, required_frequency(cfg.L0, run.beta, cfg.W));
    cell.result = simulate_landscape(run, options.bound_tol);
    cells.push_back(cell);
  }
  return cells;
}

void write_landscape_csv(std::ostream& out, std::span<const LandscapeCell> cells) {
  out << "target_F,beta,k,F_calibrated,F_hat,lift_hat,W1_hat,lower_bound,upper_bound_appendix,within_bounds\n";
  for (const auto& c : cells) {
    const auto& r = c.result;
    out << io::format_double(c.target_F) << ',' << io::format_double(r.beta) << ',' << r.k << ','
        << io::format_double(c.calibration.achieved_F) << ',' << io::format_double(r.F_hat) << ','
        << io::format_double(r.lift_hat) << ',' << io::format_double(r.W1_hat) << ','
        << io::format_double(r.lower_bound) << ',' << io::format_double(r.upper_bound_appendix) << ','
        << (r.within_bounds ? "true" : "false") << '\n';
  }
}

void check(const IteratorConfig& cfg) {
  if (cfg.n_population < 2) throw Error(ErrorCode::InvalidArgument, "population must have >= 2 members");
  if (!(cfg.initial_low >= 0.0 && cfg.initial_low <= cfg.initial_high && cfg.initial_high <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "initial score range must satisfy 0 <= low <= high <= 1");
  }
  if (!(cfg.lambda >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  if (!(cfg.rho > 0.0 && cfg.rho <= 1.0)) throw Error(ErrorCode::InvalidArgument, "rho must lie in (0, 1]");
  if (!(cfg.gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be >= 0");
  if (!(cfg.D_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "D_max must be > 0");
  if (cfg.T < 0) throw Error(ErrorCode::InvalidArgument, "T must be >= 0");
}

Eigen::VectorXd greedy_fix_step(const Eigen::VectorXd& scores, const IteratorConfig& cfg, Rng& rng) {
  const Eigen::Index n = scores.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "population is empty");
  Eigen::VectorXd next = scores;

  Eigen::Index worst = 0;
  next.minCoeff(&worst);
  const double gain = std::min(cfg.gamma, 1.0 - next(worst));
  next(worst) += gain;
  const double scale = cfg.gamma > 0.0 ? gain / cfg.gamma : 1.0;

  std::vector<Eigen::Index> others;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i != worst) others.push_back(i);
  }
  const auto displaced = std::min(others.size(), static_cast<std::size_t>(std::lround(cfg.rho * static_cast<double>(others.size()))));
  for (std::size_t i = 0; i < displaced; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, others.size() - 1);
    std::swap(others[i], others[pick(rng)]);
    const double delta = uniform(rng, 0.0, cfg.D_max);
    const Eigen::Index j = others[i];
    next(j) = std::clamp(next(j) - cfg.lambda * delta * scale, 0.0, 1.0);
  }
  return next;
}

const char* to_string(Classification c) noexcept {
  switch (c) {
    case Classification::Converged: return "CONVERGED";
    case Classification::Oscillated: return "OSCILLATED";
    case Classification::Plateau: return "PLATEAU";
    case Classification::Budget: return "BUDGET";
  }
  return "?";
}

Trajectory classify(std::vector<double> S, double eps) {
  Trajectory tr;
  tr.S = std::move(S);
  const auto& s = tr.S;
  bool monotone = true;
  for (std::size_t t = 1; t < s.size(); ++t) {
    if (s[t] < s[t - 1] - eps && !tr.first_decrease) tr.first_decrease = static_cast<int>(t);
    if (s[t] < s[t - 1]) monotone = false;
  }
  const bool settled = s.size() >= 4 && std::abs(s.back() - s[s.size() - 4]) < eps;
  if (tr.first_decrease) {
    tr.classification = Classification::Oscillated;
  } else if (settled && monotone) {
    tr.classification = Classification::Converged;
  } else if (settled) {
    tr.classification = Classification::Plateau;
  } else {
    tr.classification = Classification::Budget;
  }
  return tr;
}

Trajectory simulate_iterator(const IteratorConfig& cfg) {
  check(cfg);
  Rng rng = substream(cfg.seed, 0);
  Eigen::VectorXd scores(cfg.n_population);
  for (auto& s : scores) s = uniform(rng, cfg.initial_low, cfg.initial_high);

  std::vector<double> S;
  S.reserve(static_cast<std::size_t>(cfg.T) + 1);
  S.push_back(scores.mean());
  for (int t = 0; t < cfg.T; ++t) {
    scores = greedy_fix_step(scores, cfg, rng);
    S.push_back(scores.mean());
  }
  return classify(std::move(S));
}

void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories,
                            std::span<const std::uint64_t> seeds) {
  out << "seed,t,S,classification\n";
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const auto& tr = trajectories[i];
    for (std::size_t t = 0; t < tr.S.size(); ++t) {
      out << seeds[i] << ',' << t << ',' << io::format_double(tr.S[t]) << ',' << to_string(tr.classification)
          << '\n';
    }
  }
}

RunSet synthetic_runs(const SyntheticRunsConfig& cfg) {
  if (cfg.n_questions < 1 || cfg.n_runs < 1) throw Error(ErrorCode::InvalidArgument, "need questions and runs");
  if (!(cfg.noise_low >= 0.0 && cfg.noise_low <= cfg.noise_high)) {
    throw Error(ErrorCode::InvalidArgument, "noise range must satisfy 0 <= low <= high");
  }
  RunSet set;
  set.provenance = {"synthetic", std::chrono::system_clock::now()};
  for (int q = 0; q < cfg.n_questions; ++q) {
    Rng rng = substream(cfg.seed, static_cast<std::uint64_t>(q));
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double noise = uniform(rng, cfg.noise_low, cfg.noise_high);
    for (int i = 0; i < cfg.n_runs; ++i) {
      const double x = uniform01(rng);
      const double angle = x * std::numbers::pi / 2.0;
      RunRecord r;
      r.dataset_id = cfg.dataset_id;
      r.question_id = "q" + std::to_string(q);
      r.run_index = i;
      r.output = VectorPayload{Eigen::VectorXd::Constant(1, x)};
      r.trace_vector = Eigen::Vector2d(std::cos(angle), std::sin(angle));
      r.score = std::clamp(x + noise * gauss(rng), 0.0, 1.0);
      set.records.push_back(std::move(r));
    }
  }
  return set;
}

}  // namespace mf::simlab
