#include "metricfreedom/freedom.hpp"
#include "metricfreedom/simlab.hpp"
#include "metricfreedom/theory.hpp"

#include <doctest.h>

#include <sstream>

using namespace mf;
using namespace mf::simlab;
using doctest::Approx;

TEST_CASE("property: scrambler is a 1-Lipschitz periodic grid distance") {
  Rng rng = substream(1, 0);
  for (long k : {1L, 7L, 10L, 64L}) {
    for (int i = 0; i <= k; ++i) CHECK(scrambler_g(static_cast<double>(i) / k, k) == Approx(0.0).scale(1.0));
    for (int t = 0; t < 500; ++t) {
      const double x = uniform01(rng), y = uniform01(rng);
      CHECK(std::abs(scrambler_g(x, k) - scrambler_g(y, k)) <= std::abs(x - y) + 1e-15);
      CHECK(scrambler_g(x, k) <= 0.5 / k + 1e-15);
      if (x + 1.0 / k <= 1.0) CHECK(scrambler_g(x + 1.0 / k, k) == Approx(scrambler_g(x, k)).scale(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("property: landscape score is L0-Lipschitz") {
  Rng rng = substream(2, 0);
  LandscapeConfig cfg;
  cfg.L0 = 0.8;
  for (double beta : {0.01, 0.2, 0.8}) {
    cfg.beta = beta;
    for (int t = 0; t < 500; ++t) {
      const double x = uniform01(rng), y = uniform01(rng);
      CHECK(std::abs(score_beta(x, cfg) - score_beta(y, cfg)) <= cfg.L0 * std::abs(x - y) + 1e-15);
    }
  }
  cfg.beta = cfg.L0;
  CHECK(score_beta(0.37, cfg) == cfg.L0 * 0.37);
}

TEST_CASE("linear landscape gives F = 0 exactly") {
  LandscapeConfig cfg;
  cfg.n_runs = 10;
  const auto runs = sample_landscape_runs(cfg);
  CHECK(per_dataset_freedom(runs, {DistanceKind::AbsScore, 1.0}).F == 0.0);
  CHECK(landscape_freedom(cfg).F == 0.0);
}

TEST_CASE("F falls as beta grows") {
  LandscapeConfig cfg;
  cfg.n_runs = 500;
  double previous = 2.0;
  for (int i = 1; i <= 10; ++i) {
    cfg.beta = i / 10.0;
    const double F = landscape_freedom(cfg).F;
    CHECK(F <= previous + 0.05);
    previous = F;
  }
}

TEST_CASE("calibration") {
  LandscapeConfig cfg;
  const auto top = calibrate_beta(0.0, cfg, 0.02);
  CHECK(top.beta == cfg.L0);
  CHECK(top.achieved_F == 0.0);

  cfg.k = 64;
  const auto mid = calibrate_beta(0.5, cfg, 0.05);
  CHECK(mid.beta > 0.0);
  CHECK(mid.beta < 1.0);
  CHECK(mid.achieved_F >= 0.45);
  CHECK(mid.achieved_F <= 0.55);
  CHECK_THROWS_AS(calibrate_beta(1.0, cfg, 0.02), Error);
}

TEST_CASE("landscape config validation") {
  LandscapeConfig cfg;
  cfg.W = 0.0;
  CHECK_THROWS_AS(simulate_landscape(cfg), Error);
  cfg.W = 0.2;
  cfg.beta = 1.5;
  CHECK_THROWS_AS(simulate_landscape(cfg), Error);
}

TEST_CASE("equal-width supports recover W") {
  LandscapeConfig cfg;
  const auto r = simulate_landscape(cfg);
  CHECK(std::abs(r.W1_hat - cfg.W) < 0.01);
  CHECK(r.F_hat == 0.0);
  CHECK(r.lift_hat == Approx(cfg.W).epsilon(0.05));
  CHECK(r.within_bounds);
  cfg.support = SupportConvention::ProofLiteral;
  CHECK(simulate_landscape(cfg).W1_hat == Approx(0.25 + cfg.W / 2).epsilon(0.02));
}

TEST_CASE("frequency rule") {
  CHECK(required_frequency(1.0, 0.1, 0.2) == 1000);
  CHECK(required_frequency(1.0, 1.0, 0.2) == 100);
}

TEST_CASE("landscape csv") {
  LandscapeConfig cfg;
  cfg.n_eval = 1000;
  const std::vector<double> targets{0.0};
  const auto cells = landscape_grid(targets, cfg);
  std::ostringstream out;
  write_landscape_csv(out, cells);
  CHECK(out.str().rfind("target_F,beta,k,", 0) == 0);
  CHECK(cells[0].result.k == 100);
}

TEST_CASE("greedy fix without collateral raises the mean by gamma / n") {
  IteratorConfig cfg;
  cfg.lambda = 0.0;
  cfg.n_population = 10;
  Rng rng = substream(4, 0);
  Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(10, 0.0, 0.5);
  const auto next = greedy_fix_step(s, cfg, rng);
  CHECK(next.mean() - s.mean() == Approx(cfg.gamma / 10).epsilon(1e-12));
  CHECK(next(0) == Approx(cfg.gamma));
}

TEST_CASE("greedy fix with no fix size never raises the mean") {
  IteratorConfig cfg;
  cfg.gamma = 0.0;
  cfg.lambda = 0.5;
  Rng rng = substream(5, 0);
  Eigen::VectorXd s = Eigen::VectorXd::LinSpaced(20, 0.1, 0.9);
  for (int t = 0; t < 50; ++t) {
    const auto next = greedy_fix_step(s, cfg, rng);
    CHECK(next.mean() <= s.mean());
    s = next;
  }
}

TEST_CASE("expected mean change matches the displacement budget") {
  IteratorConfig cfg;
  cfg.n_population = 20;
  cfg.rho = 1.0;
  cfg.lambda = 1.0;
  cfg.gamma = 0.1;
  cfg.D_max = 0.2;
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(20, 0.5);
  Rng rng = substream(6, 0);
  double total = 0.0;
  const int reps = 4000;
  for (int t = 0; t < reps; ++t) total += greedy_fix_step(s, cfg, rng).mean() - s.mean();
  // gain gamma / n, loss (n - 1) lambda E[delta] / n
  const double expected = (cfg.gamma - 19 * cfg.lambda * cfg.D_max / 2) / 20;
  CHECK(expected < 0.0);
  CHECK(total / reps == Approx(expected).epsilon(0.02));
}

TEST_CASE("trajectory classification") {
  CHECK(classify({0.1, 0.2, 0.3, 0.3, 0.3, 0.3}).classification == Classification::Converged);
  const auto osc = classify({0.1, 0.2, 0.15, 0.3, 0.3, 0.3});
  CHECK(osc.classification == Classification::Oscillated);
  CHECK(osc.first_decrease == 2);
  CHECK(classify({0.1, 0.2, 0.3, 0.3 - 1e-9, 0.3, 0.3}).classification == Classification::Plateau);
  CHECK(classify({0.1, 0.2, 0.3, 0.4}).classification == Classification::Budget);
  CHECK(classify({0.1}).classification == Classification::Budget);
}

TEST_CASE("iterator runs") {
  IteratorConfig cfg;
  cfg.T = 0;
  const auto empty = simulate_iterator(cfg);
  CHECK(empty.S.size() == 1);
  CHECK(empty.classification == Classification::Budget);

  cfg.T = 600;
  cfg.lambda = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    cfg.seed = seed;
    const auto tr = simulate_iterator(cfg);
    CHECK(tr.classification == Classification::Converged);
    for (std::size_t t = 1; t < tr.S.size(); ++t) CHECK(tr.S[t] >= tr.S[t - 1]);
  }
  CHECK(simulate_iterator(cfg).S == simulate_iterator(cfg).S);
}

TEST_CASE("synthetic runs") {
  SyntheticRunsConfig cfg;
  cfg.n_questions = 3;
  cfg.n_runs = 5;
  const auto set = synthetic_runs(cfg);
  CHECK(set.records.size() == 15);
  for (const auto& r : set.records) {
    CHECK(r.score >= 0.0);
    CHECK(r.score <= 1.0);
    CHECK(r.trace_vector->norm() == Approx(1.0));
  }
  validate(set);
  CHECK(synthetic_runs(cfg).records[7].score == set.records[7].score);
}
