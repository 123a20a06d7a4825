#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "pitchfork/grid.hpp"
#include "pitchfork/rng.hpp"

namespace pitchfork {

/// Jump regime of the driving rotationally invariant Levy process.
/// NonTruncated keeps the full stable jump measure; Truncated keeps only the
/// compensated jumps of magnitude below one, so every moment is finite.
enum class NoiseMode { NonTruncated, Truncated };

/// Intensity constant of the jump measure nu(dz) = c_alpha |z|^{-1-alpha} dz
/// in one dimension, normalised so the unit-time characteristic function of
/// the non-truncated process is exp(-|u|^alpha).
inline double levy_intensity_constant(double alpha) {
  return alpha * std::exp((alpha - 1.0) * std::log(2.0) + std::lgamma(0.5 * (1.0 + alpha)) -
                          0.5 * std::log(M_PI) - std::lgamma(1.0 - 0.5 * alpha));
}

/// Second moment of the jump measure restricted to |z| < 1:
/// integral of z^2 nu(dz) over (-1,1) = 2 c_alpha / (2 - alpha).
/// This is the unit-time variance of the truncated process.
inline double truncated_band_variance(double alpha) {
  return 2.0 * levy_intensity_constant(alpha) / (2.0 - alpha);
}

struct NoiseConfig {
  double alpha = 1.5;                       // stability index, open interval (1,2)
  double sigma = 1.0;                       // noise intensity multiplying dL
  NoiseMode mode = NoiseMode::NonTruncated;
  double small_jump_cutoff = 0.01;          // Gaussian-surrogate threshold, in (0,1)
  uint64_t seed = 0;

  void validate() const {
    if (!(alpha > 1.0) || !(alpha < 2.0))
      throw std::invalid_argument("noise.alpha must lie in the open interval (1,2)");
    if (!(sigma >= 0.0))
      throw std::invalid_argument("noise.sigma must be nonnegative");
    if (!(small_jump_cutoff > 0.0) || !(small_jump_cutoff < 1.0))
      throw std::invalid_argument("noise.small_jump_cutoff must lie in (0,1)");
  }
};

/// One discrete window of a two-sided noise realization. Increments are
/// sigma-scaled and anchored so the cumulative path is 0 at the window start.
struct NoisePath {
  TimeGrid grid;
  std::vector<double> increments;  // one per step
  NoiseConfig config;
  double max_abs_jump = 0.0;       // largest single jump magnitude before sigma scaling

  /// Increment of the step whose half-open interval covers local time t.
  double increment_covering(double t) const {
    const auto i = int64_t(std::floor((t - grid.t_start) / grid.dt + 1e-9));
    if (i < 0 || i >= grid.n_steps)
      throw std::out_of_range("NoisePath: time outside recorded window");
    return increments[size_t(i)];
  }

  /// Cumulative values at the n_steps+1 grid nodes, starting from 0.
  std::vector<double> cumulative() const {
    std::vector<double> out(increments.size() + 1, 0.0);
    for (size_t i = 0; i < increments.size(); ++i) out[i + 1] = out[i] + increments[i];
    return out;
  }

  void write_csv(std::ostream& os) const;
};

/// One draw of L_{t+dt} - L_t for the symmetric alpha-stable process with
/// E exp(iuL_t) = exp(-t|u|^alpha), via the Chambers-Mallows-Stuck transform.
double sample_stable_increment(double alpha, double dt, CounterRng& rng);

/// Per-step increment generator. Draws for step k of path p come from the
/// substream (config.seed, p, k), independent of every other step.
class IncrementSampler {
 public:
  IncrementSampler(const NoiseConfig& config, double dt);

  /// Sigma-scaled increment over one step. When `max_jump` is non-null it is
  /// raised to the largest pre-sigma jump magnitude seen (truncated mode).
  double operator()(uint64_t path_id, int64_t global_step, double* max_jump = nullptr) const;

  double dt() const { return dt_; }
  const NoiseConfig& config() const { return config_; }

 private:
  NoiseConfig config_;
  double dt_ = 0.0;
  double dt_root_ = 0.0;        // dt^{1/alpha}
  double jump_mean_ = 0.0;      // expected band jumps per step
  double cutoff_pow_ = 0.0;     // cutoff^{-alpha}
  double gauss_std_ = 0.0;      // std of the small-jump Gaussian surrogate per step
};

/// Realizes one noise window on `grid` for the given path id. Increment k is
/// a function of (config.seed, path_id, global step index), so windows of the
/// same path agree wherever they overlap.
NoisePath sample_path(const NoiseConfig& config, const TimeGrid& grid, uint64_t path_id = 0);

/// Time shift theta_s with s = k_steps * dt: relabels the window so that what
/// happened at time t now appears at local time t - s. Increment data is
/// unchanged; only the clock moves. |k_steps| must not exceed n_steps.
NoisePath shift_path(const NoisePath& path, int64_t k_steps);

struct SmallBallEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;  // 95% binomial half-width
  uint64_t n_paths = 0;
};

/// Monte Carlo estimate of P(sup_{0<=t<=T} |L_t| < epsilon) for the unscaled
/// process (sigma plays no role here). The sup is taken over grid nodes with
/// dt = 1e-3 * T, fine enough that discretization bias is dominated by the
/// Monte Carlo error.
SmallBallEstimate small_ball_probability(const NoiseConfig& config, double T, double epsilon,
                                         uint64_t n_paths, int threads = 0);

}  // namespace pitchfork
