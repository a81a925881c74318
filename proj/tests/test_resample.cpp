#include "helpers.hpp"

#include "metricfreedom/io.hpp"
#include "metricfreedom/resample.hpp"
#include "metricfreedom/simlab.hpp"
#include "metricfreedom/theory.hpp"

#include <doctest.h>

#include <sstream>

using namespace mf;
using doctest::Approx;

namespace {

std::vector<RunRecord> linear_runs(int n) {
  std::vector<RunRecord> runs;
  for (int i = 0; i < n; ++i) runs.push_back(testing::position_run("q", i, i / double(n), 0.5 * i / double(n)));
  return runs;
}

RunSet grid(int questions, int runs, std::uint64_t seed) {
  simlab::SyntheticRunsConfig cfg;
  cfg.n_questions = questions;
  cfg.n_runs = runs;
  cfg.noise_low = 0.05;
  cfg.noise_high = 0.3;
  cfg.seed = seed;
  return simlab::synthetic_runs(cfg);
}

}  // namespace

TEST_CASE("bootstrap on a concordant line has tiny spread") {
  const auto runs = linear_runs(10);
  const auto est = bootstrap_freedom(runs, {DistanceKind::AbsScore, 1.0}, {1000, 42, 0.95});
  REQUIRE(est.sigma_F);
  CHECK(*est.sigma_F < 0.05);
  CHECK(*est.ci_low <= est.F);
  CHECK(est.F <= *est.ci_high);
  CHECK(est.resamples_used + est.resamples_skipped == 1000);
}

TEST_CASE("bootstrap is reproducible and seed-sensitive") {
  const auto set = grid(1, 20, 3);
  const DistanceSpec spec{DistanceKind::AbsScore, 1.0};
  const auto a = bootstrap_freedom(set.records, spec, {200, 5, 0.95});
  const auto b = bootstrap_freedom(set.records, spec, {200, 5, 0.95});
  const auto c = bootstrap_freedom(set.records, spec, {200, 6, 0.95});
  CHECK(*a.sigma_F == *b.sigma_F);
  CHECK(*a.ci_low == *b.ci_low);
  CHECK(*a.ci_high == *b.ci_high);
  CHECK(*a.sigma_F != *c.sigma_F);
}

TEST_CASE("property: percentile CI contains the point estimate") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto set = grid(1, 8, seed);
    try {
      const auto est = bootstrap_freedom(set.records, {DistanceKind::AbsScore, 1.0}, {200, seed, 0.9});
      CHECK(*est.ci_low <= est.F);
      CHECK(est.F <= *est.ci_high);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BootstrapCollapse);
    }
  }
}

TEST_CASE("bootstrap over questions") {
  const auto set = grid(8, 6, 1);
  const auto groups = group_by_question(set);
  const auto est = bootstrap_freedom(groups, {DistanceKind::AbsScore, 1.0}, {300, 9, 0.95});
  CHECK(est.aggregation == Aggregation::PerQuestionMedian);
  CHECK(*est.sigma_F >= 0.0);
  CHECK(*est.ci_low <= est.F);
}

TEST_CASE("bootstrap collapse on three tied runs") {
  std::vector<RunRecord> runs{testing::category_run("q", 0, "a", 0.0), testing::category_run("q", 1, "a", 1.0),
                              testing::category_run("q", 2, "b", 1.0)};
  try {
    const auto est = bootstrap_freedom(runs, {DistanceKind::Indicator, 1.0}, {1000, 42, 0.95});
    CHECK(est.resamples_skipped > 0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BootstrapCollapse);
  }
  CHECK_THROWS_AS(bootstrap_freedom(runs, {DistanceKind::Indicator, 1.0}, {50, 42, 0.95}), Error);
}

TEST_CASE("subsample stability") {
  const auto set = grid(1, 40, 4);
  const std::vector<int> sizes{5, 10, 40};
  const auto points = subsample_stability(set.records, {DistanceKind::AbsScore, 1.0}, sizes, 30, 42);
  REQUIRE(points.size() == 3);
  CHECK(points[2].mean_abs_error == Approx(0.0).epsilon(1e-12));
  CHECK(points[0].mean_abs_error > points[1].mean_abs_error);
  CHECK(points[0].mcdiarmid == Approx(theory::mcdiarmid_envelope(5, points[0].mean_abs_error)));
  CHECK(theory::mcdiarmid_envelope(10, 0.2) == Approx(2.0 * std::exp(-0.05)));
  const std::vector<int> bad{2};
  CHECK_THROWS_AS(subsample_stability(set.records, {DistanceKind::AbsScore, 1.0}, bad, 5, 1), Error);
}

TEST_CASE("budget sweep costs, statuses and determinism") {
  const auto set = grid(10, 12, 8);
  SweepConfig cfg;
  cfg.M_list = {2, 6, 10};
  cfg.N_list = {2, 3, 6, 12};
  cfg.trials = 5;
  const auto cells = budget_sweep(set, {DistanceKind::AbsScore, 1.0}, cfg);
  REQUIRE(cells.size() == 12);
  for (const auto& c : cells) {
    CHECK(c.cost / (c.M * c.N) == Approx(0.17).epsilon(1e-15));
    if (c.N < 3) {
      CHECK(c.status == CellStatus::TooFewRuns);
      CHECK_FALSE(c.F_hat);
    } else {
      CHECK(c.status == CellStatus::Ok);
      CHECK(c.F_hat);
    }
    if (c.M == 6 && c.N == 6) CHECK(io::format_double(c.cost) == "6.12");
  }
  const auto again = budget_sweep(set, {DistanceKind::AbsScore, 1.0}, cfg);
  for (std::size_t i = 0; i < cells.size(); ++i) CHECK(again[i].trial_F == cells[i].trial_F);

  std::ostringstream csv;
  write_sweep_csv(csv, cells);
  CHECK(csv.str().rfind("M,N,F_hat,cost,status\n", 0) == 0);
  CHECK(csv.str().find("6,6,") != std::string::npos);
}

TEST_CASE("sweep rejects an underfull grid") {
  const auto set = grid(4, 12, 8);
  SweepConfig cfg;
  cfg.M_list = {6};
  cfg.N_list = {6};
  try {
    budget_sweep(set, {DistanceKind::AbsScore, 1.0}, cfg);
    FAIL("expected GRID_UNDERFULL");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridUnderfull);
  }
}
