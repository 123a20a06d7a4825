#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pitchfork/attractor.hpp"
#include "pitchfork/measures.hpp"
#include "pitchfork/rng.hpp"

using namespace pitchfork;

namespace {

EmpiricalMeasure random_measure(uint64_t stream, size_t n, double shift = 0.0) {
  CounterRng rng(2024, stream);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal() + shift;
  return EmpiricalMeasure(std::move(v));
}

}  // namespace

TEST_CASE("wasserstein basics") {
  const EmpiricalMeasure mu = random_measure(1, 500);
  CHECK(wasserstein(mu, mu, 1.0) == 0.0);
  CHECK(wasserstein(mu, mu, 2.5) == 0.0);

  const EmpiricalMeasure zeros(std::vector<double>(40, 0.0));
  const EmpiricalMeasure ones(std::vector<double>(40, 1.0));
  for (const double p : {1.0, 2.0, 3.5}) CHECK(wasserstein(zeros, ones, p) == 1.0);

  // Translation moves every quantile by c.
  const double c = 2.75;
  std::vector<double> shifted = mu.samples();
  for (auto& x : shifted) x += c;
  const EmpiricalMeasure nu{std::move(shifted)};
  for (const double p : {1.0, 2.0}) CHECK(wasserstein(mu, nu, p) == doctest::Approx(c).epsilon(1e-12));

  CHECK_THROWS_AS(wasserstein(mu, nu, 0.5), std::invalid_argument);
}

TEST_CASE("metric properties on random sample sets") {
  const EmpiricalMeasure a = random_measure(10, 400);
  const EmpiricalMeasure b = random_measure(11, 400, 0.4);
  const EmpiricalMeasure c = random_measure(12, 400, -0.7);
  for (const double p : {1.0, 2.0}) {
    CHECK(wasserstein(a, b, p) == wasserstein(b, a, p));
    CHECK(wasserstein(a, c, p) <= wasserstein(a, b, p) + wasserstein(b, c, p) + 1e-12);
  }
  // Power-mean monotonicity in the order.
  CHECK(wasserstein(a, b, 1.0) <= wasserstein(a, b, 2.0) + 1e-12);
  CHECK(wasserstein(a, b, 2.0) <= wasserstein(a, b, 4.0) + 1e-12);
}

TEST_CASE("quantile resampling to own size is the identity") {
  const EmpiricalMeasure mu = random_measure(20, 333);
  const EmpiricalMeasure re = mu.resample(mu.size());
  for (size_t i = 0; i < mu.size(); ++i)
    CHECK(re.samples()[i] == doctest::Approx(mu.samples()[i]).epsilon(1e-12));
}

TEST_CASE("unequal sizes are aligned by quantile interpolation") {
  const EmpiricalMeasure mu = random_measure(30, 1000);
  const EmpiricalMeasure nu = random_measure(31, 400, 1.0);
  const double d = wasserstein(mu, nu, 1.0);
  CHECK(d > 0.5);
  CHECK(d < 2.0);
}

TEST_CASE("relaxation from a point mass decays exponentially to the stationary law") {
  ModelParams params;
  params.beta = -1.0;
  params.noise.alpha = 1.5;
  params.noise.sigma = 0.5;
  params.noise.mode = NoiseMode::NonTruncated;
  params.noise.seed = 97;
  PullbackOptions opts;
  opts.horizon = 25.0;  // beta = -1 collapses well inside this window
  const auto reference = equilibrium_ensemble(params, 2000, opts, 0);

  const EmpiricalMeasure initial(std::vector<double>{5.0});
  const std::vector<double> checkpoints{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
  const DecayReport report =
      ergodicity_decay(params, initial, checkpoints, 2000, reference.measure, 0);

  CHECK(report.rate > 0.0);
  CHECK(report.r_squared >= 0.9);
  for (const auto& pt : report.points) {
    const double envelope =
        std::max(report.prefactor * std::exp(-report.rate * pt.t), report.noise_floor);
    CHECK(pt.w1 <= 1.5 * envelope);
  }

  // Starting from the stationary reference itself leaves nothing to relax:
  // distances stay at the Monte Carlo noise floor.
  const DecayReport still =
      ergodicity_decay(params, reference.measure, {0.5, 1.5}, 2000, reference.measure, 0);
  for (const auto& pt : still.points) CHECK(pt.w1 < 2.0 * still.noise_floor);
}

TEST_CASE("checkpoint validation") {
  ModelParams params;
  const EmpiricalMeasure initial(std::vector<double>{0.0});
  CHECK_THROWS_AS(ergodicity_decay(params, initial, {}, 100, initial, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ergodicity_decay(params, initial, {1.0, 0.5}, 100, initial, 0),
                  std::invalid_argument);
}
