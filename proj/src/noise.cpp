#include "pitchfork/noise.hpp"

#include <algorithm>
#include <cstdio>

#include "pitchfork/errors.hpp"
#include "pitchfork/parallel.hpp"

namespace pitchfork {

void NoisePath::write_csv(std::ostream& os) const {
  os << "t,dL\n";
  char buf[64];
  for (int64_t i = 0; i < grid.n_steps; ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid.time_at(i), increments[size_t(i)]);
    os << buf;
  }
}

double sample_stable_increment(double alpha, double dt, CounterRng& rng) {
  if (!(alpha > 1.0) || !(alpha < 2.0))
    throw std::invalid_argument("sample_stable_increment: alpha must lie in (1,2)");
  if (!(dt >= 0.0)) throw std::invalid_argument("sample_stable_increment: dt must be nonnegative");
  if (dt == 0.0) return 0.0;
  const double v = M_PI * (rng.u01() - 0.5);
  const double w = rng.exponential();
  const double x = std::sin(alpha * v) * std::pow(std::cos(v), -1.0 / alpha) *
                   std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return std::pow(dt, 1.0 / alpha) * x;
}

IncrementSampler::IncrementSampler(const NoiseConfig& config, double dt)
    : config_(config), dt_(dt) {
  config_.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("IncrementSampler: dt must be positive");
  const double alpha = config_.alpha;
  dt_root_ = std::pow(dt, 1.0 / alpha);
  if (config_.mode == NoiseMode::Truncated) {
    const double c = levy_intensity_constant(alpha);
    const double eps = config_.small_jump_cutoff;
    cutoff_pow_ = std::pow(eps, -alpha);
    // Band [eps,1): exact compound Poisson. Below eps: centered Gaussian with
    // the matching variance; the symmetric compensator vanishes, so no drift.
    jump_mean_ = dt * (2.0 * c / alpha) * (cutoff_pow_ - 1.0);
    const double small_var = 2.0 * c * std::pow(eps, 2.0 - alpha) / (2.0 - alpha);
    gauss_std_ = std::sqrt(dt * small_var);
  }
}

double IncrementSampler::operator()(uint64_t path_id, int64_t global_step,
                                    double* max_jump) const {
  if (config_.sigma == 0.0) return 0.0;
  CounterRng rng(config_.seed, path_id, global_step);
  if (config_.mode == NoiseMode::NonTruncated) {
    const double v = M_PI * (rng.u01() - 0.5);
    const double w = rng.exponential();
    const double alpha = config_.alpha;
    const double x = std::sin(alpha * v) * std::pow(std::cos(v), -1.0 / alpha) *
                     std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
    return config_.sigma * dt_root_ * x;
  }
  const double alpha = config_.alpha;
  double sum = rng.normal() * gauss_std_;
  const uint64_t n_jumps = rng.poisson(jump_mean_);
  for (uint64_t j = 0; j < n_jumps; ++j) {
    // Inverse CDF of the band density |z|^{-1-alpha} on [eps,1), random sign.
    const double u = rng.u01();
    const double z = std::pow(cutoff_pow_ - u * (cutoff_pow_ - 1.0), -1.0 / alpha);
    if (max_jump != nullptr && z > *max_jump) *max_jump = z;
    sum += (rng.u01() < 0.5) ? z : -z;
  }
  return config_.sigma * sum;
}

NoisePath sample_path(const NoiseConfig& config, const TimeGrid& grid, uint64_t path_id) {
  config.validate();
  if (grid.n_steps < 1) throw std::invalid_argument("sample_path: grid has no steps");
  NoisePath path;
  path.grid = grid;
  path.config = config;
  path.increments.resize(size_t(grid.n_steps));
  const IncrementSampler sampler(config, grid.dt);
  const int64_t base = grid.global_step(0);
  for (int64_t i = 0; i < grid.n_steps; ++i)
    path.increments[size_t(i)] = sampler(path_id, base + i, &path.max_abs_jump);
  return path;
}

NoisePath shift_path(const NoisePath& path, int64_t k_steps) {
  if (std::llabs(k_steps) > path.grid.n_steps)
    throw OutOfWindowError("shift_path: shift leaves the recorded window");
  NoisePath out = path;
  const double shift = double(k_steps) * path.grid.dt;
  out.grid.t_start = path.grid.t_start - shift;
  out.grid.t_end = path.grid.t_end - shift;
  return out;
}

SmallBallEstimate small_ball_probability(const NoiseConfig& config, double T, double epsilon,
                                         uint64_t n_paths, int threads) {
  config.validate();
  if (!(T > 0.0)) throw std::invalid_argument("small_ball_probability: T must be positive");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("small_ball_probability: epsilon must be positive");
  if (n_paths < 1000)
    throw std::invalid_argument("small_ball_probability: n_paths must be at least 1000");

  NoiseConfig unit = config;
  unit.sigma = 1.0;  // the event concerns the unscaled process
  const TimeGrid grid = TimeGrid::with_dt(0.0, T, 1e-3 * T);
  const IncrementSampler sampler(unit, grid.dt);
  std::vector<uint8_t> inside(n_paths, 0);
  parallel_for(int64_t(n_paths), threads, [&](int64_t p) {
    double level = 0.0;
    bool ok = true;
    for (int64_t i = 0; i < grid.n_steps && ok; ++i) {
      level += sampler(uint64_t(p), i);
      ok = std::fabs(level) < epsilon;
    }
    inside[size_t(p)] = ok ? 1 : 0;
  });
  uint64_t hits = 0;
  for (const auto b : inside) hits += b;
  SmallBallEstimate est;
  est.n_paths = n_paths;
  est.estimate = double(hits) / double(n_paths);
  est.ci_halfwidth = 1.959963984540054 *
                     std::sqrt(est.estimate * (1.0 - est.estimate) / double(n_paths));
  return est;
}

}  // namespace pitchfork
