#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pitchfork/attractor.hpp"
#include "pitchfork/errors.hpp"
#include "pitchfork/fokker_planck.hpp"
#include "pitchfork/lyapunov.hpp"
#include "pitchfork/measures.hpp"
#include "support/oracles.hpp"

using namespace pitchfork;

namespace {

ModelParams make_params(double beta, double sigma, NoiseMode mode, double alpha = 1.5,
                        uint64_t seed = 0) {
  ModelParams p;
  p.beta = beta;
  p.noise.alpha = alpha;
  p.noise.sigma = sigma;
  p.noise.mode = mode;
  p.noise.seed = seed;
  return p;
}

double min_value(const DensityGrid& d) {
  double m = d.values[0];
  for (const double v : d.values) m = std::min(m, v);
  return m;
}

/// L1 distance between a density grid and an empirical sample, on uniform
/// bins over [-hi, hi] plus the two overflow tails.
double l1_density_vs_samples(const DensityGrid& density, const std::vector<double>& samples,
                             double hi, int bins) {
  const double lo = -hi, width = (hi - lo) / bins;
  std::vector<double> hist(size_t(bins) + 2, 0.0);
  for (const double s : samples) {
    if (s < lo) hist[0] += 1.0;
    else if (s >= hi) hist[size_t(bins) + 1] += 1.0;
    else hist[size_t((s - lo) / width) + 1] += 1.0;
  }
  for (auto& h : hist) h /= double(samples.size());
  std::vector<double> cell(size_t(bins) + 2, 0.0);
  for (int i = 0; i < density.n_points; ++i) {
    const double x = density.node(i);
    const double mass = density.values[size_t(i)] * density.dx;
    if (x < lo) cell[0] += mass;
    else if (x >= hi) cell[size_t(bins) + 1] += mass;
    else cell[size_t((x - lo) / width) + 1] += mass;
  }
  double l1 = 0.0;
  for (size_t b = 0; b < hist.size(); ++b) l1 += std::fabs(hist[b] - cell[b]);
  return l1;
}

/// Log-log slope of the density over |x| in [x_lo, x_hi] (positive side).
double tail_slope(const DensityGrid& d, double x_lo, double x_hi) {
  std::vector<double> lx, lp;
  for (int i = 0; i < d.n_points; ++i) {
    const double x = d.node(i);
    if (x >= x_lo && x <= x_hi && d.values[size_t(i)] > 0.0) {
      lx.push_back(std::log(x));
      lp.push_back(std::log(d.values[size_t(i)]));
    }
  }
  return linear_fit(lx, lp).slope;
}

}  // namespace

TEST_CASE("jump-measure constant: quadrature identity") {
  // 2 c_alpha * int_0^inf (1 - cos w) w^{-1-alpha} dw must equal 1 for the
  // generator to act as -|u|^alpha; the integral has the closed form
  // pi / (2 Gamma(1+alpha) sin(pi alpha / 2)).
  for (const double alpha : {1.2, 1.5, 1.8}) {
    const double integral = M_PI / (2.0 * std::tgamma(1.0 + alpha) * std::sin(M_PI * alpha / 2.0));
    CHECK(2.0 * levy_intensity_constant(alpha) * integral == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("fractional laplacian: eigenfunctions, classical limit, linearity") {
  const double L = 8.0;
  const int n = 512;
  const double k = 4.0 * M_PI / L;  // a grid harmonic
  std::vector<double> cosine(n), gauss(n);
  for (int i = 0; i < n; ++i) {
    const double x = -L + (double(i) + 0.5) * (2.0 * L / n);
    cosine[size_t(i)] = std::cos(k * x);
    gauss[size_t(i)] = std::exp(-x * x);
  }
  const double alpha = 1.5;
  const auto out = fractional_laplacian(cosine, alpha, L);
  for (int i = 0; i < n; ++i)
    REQUIRE(std::fabs(out[size_t(i)] - std::pow(k, alpha) * cosine[size_t(i)]) < 1e-10);

  // alpha = 2 reduces to -f'' up to O(dx^2) on a smooth profile.
  const int n2 = 1024;
  const double dx = 2.0 * L / n2;
  std::vector<double> smooth(n2);
  for (int i = 0; i < n2; ++i) {
    const double x = -L + (double(i) + 0.5) * dx;
    smooth[size_t(i)] = std::exp(-x * x);
  }
  const auto lap = fractional_laplacian(smooth, 2.0, L);
  for (int i = 1; i + 1 < n2; ++i) {
    const double second_diff =
        (smooth[size_t(i) + 1] - 2.0 * smooth[size_t(i)] + smooth[size_t(i) - 1]) / (dx * dx);
    REQUIRE(std::fabs(lap[size_t(i)] + second_diff) < 5e-4);
  }

  std::vector<double> combo(n);
  for (int i = 0; i < n; ++i) combo[size_t(i)] = 2.0 * cosine[size_t(i)] - 3.0 * gauss[size_t(i)];
  const auto lhs = fractional_laplacian(combo, alpha, L);
  const auto f1 = fractional_laplacian(cosine, alpha, L);
  const auto f2 = fractional_laplacian(gauss, alpha, L);
  for (int i = 0; i < n; ++i)
    REQUIRE(std::fabs(lhs[size_t(i)] - (2.0 * f1[size_t(i)] - 3.0 * f2[size_t(i)])) < 1e-12);

  CHECK_THROWS_AS(fractional_laplacian(cosine, 2.5, L), std::invalid_argument);
  std::vector<double> odd_len(300, 0.0);
  CHECK_THROWS_AS(fractional_laplacian(odd_len, 1.5, L), std::invalid_argument);
}

TEST_CASE("jump symbol: zero frequency, sign, high-frequency asymptote") {
  NoiseConfig cfg;
  cfg.alpha = 1.5;
  cfg.sigma = 1.0;
  cfg.mode = NoiseMode::Truncated;
  const double L = 8.0;
  const int n = 1024;
  const auto psi = jump_symbol(cfg, L, n);
  CHECK(psi[0] == 0.0);
  for (const double v : psi) CHECK(v <= 0.0);
  // At large |u| the band symbol approaches -|sigma u|^alpha + 2 c_alpha/alpha.
  const double u_max = M_PI / (2.0 * L / n) ;
  const double expected = -std::pow(u_max, cfg.alpha) +
                          2.0 * levy_intensity_constant(cfg.alpha) / cfg.alpha;
  CHECK(std::fabs(psi[size_t(n / 2)] - expected) < 0.01 * std::fabs(expected));

  NoiseConfig stable = cfg;
  stable.mode = NoiseMode::NonTruncated;
  const auto psi_stable = jump_symbol(stable, L, n);
  CHECK(psi_stable[size_t(n / 2)] == doctest::Approx(-std::pow(u_max, cfg.alpha)));
}

TEST_CASE("linear-drift solve reproduces the exact stable stationary law") {
  // For dX = -X dt + sigma dL the stationary law has characteristic function
  // exp(-|sigma u|^alpha / alpha); invert it by quadrature as the oracle.
  // The law has power tails: the domain must be wide enough that the mass
  // outside it (redistributed inward by the solver) stays below the target.
  ModelParams p = make_params(-1.0, 0.5, NoiseMode::NonTruncated);
  p.cubic = false;
  const DensityGrid d = stationary_density(p, {16.0, 8192});
  const double scale = std::pow(p.sigma(), p.noise.alpha) / p.noise.alpha;
  double l1 = 0.0;
  for (int i = 0; i < d.n_points; i += 4) {
    const double x = d.node(i);
    const double oracle = (1.0 / M_PI) * oracles::simpson(
        [&](double u) { return std::cos(u * x) * std::exp(-scale * std::pow(u, p.noise.alpha)); },
        0.0, 60.0, 4000);
    l1 += std::fabs(d.values[size_t(i)] - oracle) * d.dx * 4.0;
  }
  CHECK(l1 < 0.01);
}

TEST_CASE("tail exponents: linear drift inherits the jump tail, cubic steepens it") {
  // Flux balance against the jump influx nu((x,inf)) ~ x^{-alpha}/alpha gives
  // p ~ x^{-alpha-1} for drift -x and p ~ x^{-alpha-3} for drift -x^3. The
  // fit window sits well inside the domain: within ~L/4 of the boundary the
  // no-flux/wrap structure visibly steepens the computed tail.
  const double alpha = 1.5;
  ModelParams linear = make_params(-1.0, 0.5, NoiseMode::NonTruncated, alpha);
  linear.cubic = false;
  const DensityGrid dl = stationary_density(linear, {16.0, 8192});
  CHECK(tail_slope(dl, 4.0, 6.4) == doctest::Approx(-(1.0 + alpha)).epsilon(0.2));

  ModelParams cubic = make_params(1.0, 0.5, NoiseMode::NonTruncated, alpha);
  const DensityGrid dc = stationary_density(cubic, {16.0, 8192});
  // Finite-x flux balance predicts about -4.8 on this window, relaxing toward
  // -(3 + alpha) further out.
  CHECK(tail_slope(dc, 4.0, 6.4) == doctest::Approx(-(3.0 + alpha)).epsilon(0.12));
}

TEST_CASE("stationary density: symmetry, mass, and spectral positivity resolution") {
  for (const NoiseMode mode : {NoiseMode::NonTruncated, NoiseMode::Truncated}) {
    ModelParams p = make_params(1.0, 0.5, mode);
    const DensityGrid d = stationary_density(p, {8.0, 4096});
    const int n = d.n_points;
    double sym = 0.0, max_p = 0.0;
    for (int i = 0; i < n; ++i) {
      sym = std::max(sym, std::fabs(d.values[size_t(i)] - d.values[size_t(n - 1 - i)]));
      max_p = std::max(max_p, d.values[size_t(i)]);
    }
    CHECK(sym < 1e-6);
    CHECK(std::fabs(density_moment(d, 0) - 1.0) < 1e-8);
    CHECK(d.diagnostics.max_mass_drift < 1e-10);
    CHECK(d.diagnostics.residual_history.back() < 1e-8);

    // The spectral solve resolves positivity down to its roundoff floor; the
    // non-truncated tails sit far above it, the truncated ones reach it.
    const double floor = 1e-12 * max_p;
    CHECK(min_value(d) > -floor);
    for (int i = 0; i < n; ++i) {
      if (d.values[size_t(i)] > floor) REQUIRE(d.values[size_t(i)] > 0.0);
    }
    if (mode == NoiseMode::NonTruncated) {
      CHECK(min_value(d) > 1e-30);
      const double start = 2.0 * std::sqrt(std::max(p.beta, 1.0));
      for (int i = 0; i + 1 < n; ++i) {
        if (d.node(i) > start)
          REQUIRE(d.values[size_t(i) + 1] <= d.values[size_t(i)] * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("positive-kernel solve: strict positivity for the truncated density") {
  ModelParams p = make_params(1.0, 0.5, NoiseMode::Truncated);
  DensitySolverOptions opts;
  opts.method = DensityMethod::PositiveKernel;
  const DensityGrid d = stationary_density(p, {4.0, 1024}, opts);
  CHECK(d.diagnostics.converged);
  CHECK(d.diagnostics.residual_history.back() < 1e-8);
  CHECK(min_value(d) > 0.0);
  CHECK(min_value(d) > 1e-30);
  double sym = 0.0;
  for (int i = 0; i < d.n_points; ++i)
    sym = std::max(sym,
                   std::fabs(d.values[size_t(i)] - d.values[size_t(d.n_points - 1 - i)]));
  CHECK(sym < 1e-6);
  CHECK(std::fabs(density_moment(d, 0) - 1.0) < 1e-8);
  const double start = 2.0 * std::sqrt(std::max(p.beta, 1.0));
  for (int i = 0; i + 1 < d.n_points; ++i) {
    if (d.node(i) > start)
      REQUIRE(d.values[size_t(i) + 1] <= d.values[size_t(i)] * (1.0 + 1e-9));
  }
  // The spectral and kernel discretizations agree on the bulk.
  const DensityGrid spectral = stationary_density(p, {4.0, 1024});
  double l1 = 0.0;
  for (int i = 0; i < d.n_points; ++i)
    l1 += std::fabs(d.values[size_t(i)] - spectral.values[size_t(i)]) * d.dx;
  CHECK(l1 < 0.02);
  // Unbounded jumps have no band kernel.
  ModelParams stable_mode = make_params(1.0, 0.5, NoiseMode::NonTruncated);
  CHECK_THROWS_AS(stationary_density(stable_mode, {4.0, 1024}, opts), std::invalid_argument);
}

TEST_CASE("small sigma past the bifurcation gives sharp wells at +-sqrt(beta)") {
  ModelParams p = make_params(1.0, 0.1, NoiseMode::NonTruncated);
  const DensityGrid d = stationary_density(p, {8.0, 4096});
  CHECK(min_value(d) > 0.0);
  // Locate interior local maxima on the positive half-line.
  std::vector<double> peaks;
  for (int i = 1; i + 1 < d.n_points; ++i) {
    if (d.node(i) > 0.0 && d.values[size_t(i)] > d.values[size_t(i) - 1] &&
        d.values[size_t(i)] > d.values[size_t(i) + 1])
      peaks.push_back(d.node(i));
  }
  REQUIRE(!peaks.empty());
  double best = peaks[0];
  for (const double x : peaks)
    if (std::fabs(x - 1.0) < std::fabs(best - 1.0)) best = x;
  CHECK(std::fabs(best - 1.0) < 0.1);
}

TEST_CASE("moments: normalization, parity, truncated bound and balance identity") {
  ModelParams p = make_params(1.0, 0.5, NoiseMode::Truncated);
  const DensityGrid d = stationary_density(p, {8.0, 4096});
  CHECK(std::fabs(density_moment(d, 0) - 1.0) < 1e-8);
  CHECK(std::fabs(density_moment(d, 1)) < 1e-6);
  CHECK(std::fabs(density_moment(d, 3)) < 1e-6);

  const double m2 = density_moment(d, 2);
  const double m4 = density_moment(d, 4);
  const double bound = second_moment_bound(p.beta, p.sigma(), p.noise.alpha);
  CHECK(m2 <= bound);
  // Closed form of the minimized bound: beta/2 + sqrt((beta^2/2 + K)/2).
  const double k = p.sigma() * p.sigma() * truncated_band_variance(p.noise.alpha);
  const double closed = p.beta / 2.0 + std::sqrt((p.beta * p.beta / 2.0 + k) / 2.0);
  CHECK(bound == doctest::Approx(closed).epsilon(1e-9));
  // Stationarity identity from the generator applied to x^2:
  // 2 beta m2 - 2 m4 + sigma^2 * band variance = 0. The defect is the O(dx)
  // upwind bias and halves when the grid is refined.
  const double defect = std::fabs(2.0 * p.beta * m2 - 2.0 * m4 + k);
  CHECK(defect < 8e-3);
  const DensityGrid fine = stationary_density(p, {8.0, 8192});
  const double defect_fine =
      std::fabs(2.0 * p.beta * density_moment(fine, 2) - 2.0 * density_moment(fine, 4) + k);
  CHECK(defect_fine < 4e-3);
  CHECK(defect / defect_fine > 1.7);
}

TEST_CASE("both Lyapunov functionals are negative and mutually consistent") {
  ModelParams p = make_params(-1.0, 0.5, NoiseMode::NonTruncated);
  const DensityGrid coarse = stationary_density(p, {8.0, 4096});
  const DensityLyapunov c = lyapunov_from_density(coarse);
  CHECK(c.direct < 0.0);
  CHECK(c.dirichlet < 0.0);
  CHECK(c.floored_points == 0);
  CHECK(std::fabs(c.direct - c.dirichlet) <= 0.05 * std::fabs(c.direct));

  const DensityGrid fine = stationary_density(p, {8.0, 8192});
  const DensityLyapunov f = lyapunov_from_density(fine);
  CHECK(std::fabs(f.direct - f.dirichlet) <= 0.02 * std::fabs(f.direct));
  // Grid-refinement stability of the direct functional.
  CHECK(std::fabs(c.direct - f.direct) < 0.01 * std::fabs(f.direct));
}

TEST_CASE("density route agrees with the trajectory average in the truncated case") {
  ModelParams p = make_params(1.0, 0.5, NoiseMode::Truncated, 1.5, 5150);
  const DensityGrid d = stationary_density(p, {8.0, 4096});
  const double direct = p.beta - 3.0 * density_moment(d, 2);
  AsymptoticOptions opts;
  opts.pullback.horizon = 30.0;
  const AsymptoticLyapunov mc = asymptotic_lyapunov(p, 2000.0, opts);
  CHECK(std::fabs(direct - mc.estimate) < 3.0 * mc.std_error);
}

TEST_CASE("density vs equilibrium ensemble (smoke scale)") {
  ModelParams p = make_params(-1.0, 0.5, NoiseMode::NonTruncated, 1.5, 8181);
  const DensityGrid d = stationary_density(p, {8.0, 4096});
  PullbackOptions opts;
  opts.horizon = 25.0;
  const auto ensemble = equilibrium_ensemble(p, 10000, opts, 0);
  CHECK(l1_density_vs_samples(d, ensemble.measure.samples(), 3.0, 32) < 0.1);
}

TEST_CASE("sampled second moment matches the density moment below the bifurcation") {
  // Truncated mode: the sample second moment has finite variance there (the
  // heavy-tailed mode does not, a^2 carries tail index (2+alpha)/2 < 2).
  ModelParams p = make_params(-1.0, 0.5, NoiseMode::Truncated, 1.5, 9292);
  PullbackOptions opts;
  opts.horizon = 25.0;
  const auto ensemble = equilibrium_ensemble(p, 5000, opts, 0);
  const DensityGrid d = stationary_density(p, {8.0, 4096});
  const double pde_m2 = density_moment(d, 2);
  CHECK(std::fabs(ensemble.measure.moment(2) - pde_m2) <= 0.05 * pde_m2);
}

TEST_CASE("solver input validation and failure reporting") {
  ModelParams p = make_params(1.0, 0.5, NoiseMode::NonTruncated);
  CHECK_THROWS_AS(stationary_density(p, {8.0, 1000}), std::invalid_argument);
  CHECK_THROWS_AS(stationary_density(p, {2.0, 4096}), std::invalid_argument);
  ModelParams off = p;
  off.noise.sigma = 0.0;
  CHECK_THROWS_AS(stationary_density(off, {8.0, 4096}), std::invalid_argument);

  DensitySolverOptions strict;
  strict.residual_tol = 1e-15;
  strict.max_cycles = 1;
  try {
    stationary_density(p, {8.0, 4096}, strict);
    FAIL("expected SolverError");
  } catch (const SolverError& err) {
    CHECK(!err.residual_history.empty());
  }
}

TEST_CASE("positivity violations are rejected by the Lyapunov functionals") {
  ModelParams p = make_params(-1.0, 0.5, NoiseMode::NonTruncated);
  DensityGrid d = stationary_density(p, {8.0, 2048});
  d.values[10] = 0.0;
  CHECK_THROWS_AS(lyapunov_from_density(d), std::runtime_error);
}
