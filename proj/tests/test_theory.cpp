#include "metricfreedom/random.hpp"
#include "metricfreedom/theory.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mf;
using namespace mf::theory;
using doctest::Approx;

TEST_CASE("kruskal relation closed form") {
  CHECK(kruskal_spearman(1.0) == Approx(1.0).epsilon(1e-15));
  CHECK(kruskal_spearman(0.0) == 0.0);
  CHECK(kruskal_spearman(0.5) == Approx(0.48259).epsilon(1e-5));
  CHECK(gaussian_gap(0.0) == 0.0);
  CHECK(gaussian_gap(1.0) == Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(gaussian_gap(0.5) == Approx(0.01741).epsilon(1e-4));
}

TEST_CASE("property: kruskal map is odd and increasing; gap is non-negative") {
  double previous = -2.0;
  for (int i = -100; i <= 100; ++i) {
    const double r = i / 100.0;
    const double k = kruskal_spearman(r);
    CHECK(k > previous);
    previous = k;
    CHECK(kruskal_spearman(-r) == -k);
    CHECK(gaussian_gap(r) >= 0.0);
    if (i != 0 && std::abs(i) != 100) CHECK(gaussian_gap(r) > 0.0);
  }
  CHECK(kruskal_spearman(-1.0) == Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("delta envelope") {
  CHECK(delta_n_envelope(1.0, 10000) == Approx(0.087).epsilon(1e-12));
  CHECK(delta_n_envelope(0.0, 400) == Approx(0.2).epsilon(1e-12));
  CHECK(delta_n_envelope(1.0, 10) == Approx(1.3119).epsilon(1e-4));
}

TEST_CASE("lift upper bounds") {
  const BoundInputs at_one{1.0, 1.0, 1.0, 0.0, 0.4};
  CHECK(lift_upper_bound(at_one, BoundForm::Theorem) == 0.0);
  CHECK(lift_upper_bound(at_one, BoundForm::AppendixStage4) == Approx(0.4));
  const BoundInputs at_zero{1.0, 1.0, 0.0, 0.0, 0.3};
  CHECK(lift_upper_bound(at_zero, BoundForm::AppendixStage4) == Approx(0.9));
  const BoundInputs anti{1.0, 1.0, 1.5, 0.0, 0.3};
  try {
    lift_upper_bound(anti, BoundForm::Theorem);
    FAIL("expected ANTI_CONCORDANT");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AntiConcordant);
  }
}

TEST_CASE("property: appendix bound dominates the theorem bound") {
  Rng rng = substream(3, 0);
  for (int t = 0; t < 1000; ++t) {
    const BoundInputs b{uniform(rng, 0.1, 3.0), uniform(rng, 0.1, 1.0), uniform01(rng), uniform(rng, 0.0, 2.0),
                        uniform(rng, 0.0, 2.0)};
    CHECK(lift_upper_bound(b, BoundForm::AppendixStage4) >= lift_upper_bound(b, BoundForm::Theorem) - 1e-12);
  }
}

TEST_CASE("wasserstein-1 in one dimension") {
  const Eigen::Vector3d a(0.1, 0.5, 0.9);
  CHECK(wasserstein_1d(a, a) == 0.0);
  CHECK(wasserstein_1d(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)) == 1.0);
  CHECK(wasserstein_1d(a, (a.array() + 0.25).matrix()) == Approx(0.25));
  CHECK(wasserstein_1d(Eigen::Vector2d(0, 1), Eigen::Vector4d(0, 0, 1, 1)) == 0.0);

  Rng rng = substream(17, 0);
  const int n = 50000;
  Eigen::VectorXd base(n), shifted(n), literal(n);
  for (int i = 0; i < n; ++i) {
    base(i) = uniform(rng, 0.0, 0.5);
    shifted(i) = uniform(rng, 0.2, 0.7);
    literal(i) = uniform(rng, 0.5, 0.7);
  }
  CHECK(wasserstein_1d(shifted, base) == Approx(0.2).epsilon(0.05));
  // supports [0, 1/2] and [1/2, 1/2 + W]: mean displacement 1/4 + W/2
  CHECK(wasserstein_1d(literal, base) == Approx(0.35).epsilon(0.02));
}

TEST_CASE("property: wasserstein-1 is a metric on random samples") {
  Rng rng = substream(23, 0);
  for (int t = 0; t < 200; ++t) {
    Eigen::VectorXd a(1 + t % 7), b(2 + t % 5), c(3 + t % 4);
    for (auto& v : a) v = uniform01(rng);
    for (auto& v : b) v = uniform01(rng);
    for (auto& v : c) v = uniform01(rng);
    const double ab = wasserstein_1d(a, b), ba = wasserstein_1d(b, a);
    CHECK(ab == Approx(ba).epsilon(1e-12));
    CHECK(ab > 0.0);
    CHECK(ab <= wasserstein_1d(a, c) + wasserstein_1d(c, b) + 1e-12);
  }
}

TEST_CASE("phase transition closed forms") {
  const PhaseParams p{0.1, 0.5, 0.2, 0.5, 1.0};
  CHECK(critical_freedom(p) == Approx(0.5));
  CHECK(convergence_condition(p, 0.0));
  CHECK_FALSE(convergence_condition(p, 0.5));  // lambda rho D_max == p_min gamma
  CHECK(convergence_condition(p, 0.49));
  const PhaseParams balanced{0.1, 0.5, 0.25, 0.2, 1.0};
  CHECK(critical_freedom(balanced) == Approx(0.0).scale(1.0));

  // lambda = L0 (1 - F): the condition holds exactly when F > F*
  for (int i = 0; i <= 40; ++i) {
    const double F = i / 40.0 + 0.0123;
    CHECK(convergence_condition(p, 1.0 - F) == (F > critical_freedom(p)));
  }
}

TEST_CASE("rate and tail envelopes") {
  CHECK(convergence_rate_envelope(0.3, 0.01, 0) == Approx(0.7));
  double previous = 1.0;
  for (long t = 0; t < 100; ++t) {
    const double e = convergence_rate_envelope(0.3, 0.01, t);
    CHECK(e < previous);
    previous = e;
  }
  CHECK(mcdiarmid_tail(10, 0.0) == 1.0);
  CHECK(mcdiarmid_tail(200, 0.5) == Approx(0.00386).epsilon(1e-2));
  CHECK(mcdiarmid_tail(300, 0.5) < mcdiarmid_tail(200, 0.5));
  CHECK(mcdiarmid_tail(200, 0.6) < mcdiarmid_tail(200, 0.5));
  CHECK(mcdiarmid_envelope(10, 0.2) > 1.0);
}
