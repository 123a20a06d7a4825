#include "pitchfork/lyapunov.hpp"

#include <algorithm>
#include <cmath>

#include "pitchfork/errors.hpp"
#include "pitchfork/parallel.hpp"

namespace pitchfork {

AsymptoticLyapunov asymptotic_lyapunov(const ModelParams& params, double T,
                                       const AsymptoticOptions& opts) {
  if (!(T > 0.0)) throw std::invalid_argument("asymptotic_lyapunov: T must be positive");
  if (opts.n_batches < 2)
    throw std::invalid_argument("asymptotic_lyapunov: need at least two batches");
  const uint64_t path_id = 0;
  const PullbackResult pb = pullback_equilibrium(params, path_id, opts.pullback);
  if (!pb.collapsed)
    throw SolverError("asymptotic_lyapunov: pullback did not collapse", {});

  const double dt = opts.pullback.dt;
  const IncrementSampler sampler(params.noise, dt);
  const auto burn_steps = int64_t(std::llround(opts.burn_in / dt));
  const auto avg_steps = int64_t(std::llround(T / dt));
  const int64_t total = burn_steps + avg_steps;
  const int64_t batch_len = avg_steps / opts.n_batches;

  auto multiplier = [&](double a) { return params.cubic ? params.beta - 3.0 * a * a : params.beta; };

  // Streamed forward run along the equilibrium; trapezoidal accumulation of
  // the linearization multiplier, split into equal batches after burn-in.
  double x = pb.equilibrium_estimate;
  double f_prev = multiplier(x);
  std::vector<double> batch_sums(size_t(opts.n_batches), 0.0);
  for (int64_t i = 0; i < total; ++i) {
    x = implicit_drift_step(params, x, dt) + sampler(path_id, i);
    const double f = multiplier(x);
    if (i >= burn_steps) {
      const int64_t k = std::min<int64_t>((i - burn_steps) / batch_len, opts.n_batches - 1);
      batch_sums[size_t(k)] += 0.5 * (f_prev + f) * dt;
    }
    f_prev = f;
  }

  AsymptoticLyapunov result;
  result.limit_certified = params.noise.mode == NoiseMode::Truncated;
  double total_sum = 0.0;
  for (int k = 0; k < opts.n_batches; ++k) {
    const int64_t len = (k == opts.n_batches - 1) ? avg_steps - batch_len * (opts.n_batches - 1)
                                                  : batch_len;
    result.batch_means.push_back(batch_sums[size_t(k)] / (double(len) * dt));
    total_sum += batch_sums[size_t(k)];
  }
  result.estimate = total_sum / (double(avg_steps) * dt);
  double var = 0.0;
  for (const double m : result.batch_means) {
    const double d = m - result.estimate;
    var += d * d;
  }
  var /= double(opts.n_batches - 1);
  result.std_error = std::sqrt(var / double(opts.n_batches));
  return result;
}

FtleSample finite_time_lyapunov(const ModelParams& params, const Trajectory& equilibrium,
                                double T, uint64_t omega_id) {
  if (!(T > 0.0)) throw std::invalid_argument("finite_time_lyapunov: T must be positive");
  const auto idx = int64_t(std::llround(T / equilibrium.grid.dt));
  if (size_t(idx) >= equilibrium.states.size())
    throw std::out_of_range("finite_time_lyapunov: trajectory window shorter than T");
  FtleSample sample;
  sample.T = T;
  sample.omega_id = omega_id;
  sample.value = cocycle_integral(params, equilibrium, idx) / T;
  return sample;
}

FtleDistribution ftle_distribution(const ModelParams& params, double T, uint64_t n_paths,
                                   const PullbackOptions& opts, int threads) {
  if (n_paths < 1000)
    throw std::invalid_argument("ftle_distribution: n_paths must be at least 1000");
  std::vector<FtleSample> samples(n_paths);
  parallel_for(int64_t(n_paths), threads, [&](int64_t p) {
    const EquilibriumRun run = equilibrium_forward(params, uint64_t(p), opts, T);
    samples[size_t(p)] = finite_time_lyapunov(params, run.forward, T, uint64_t(p));
  });
  std::vector<double> values;
  values.reserve(n_paths);
  uint64_t positive = 0;
  for (const auto& s : samples) {
    values.push_back(s.value);
    if (s.value > 0.0) ++positive;
  }
  FtleDistribution dist{EmpiricalMeasure(std::move(values)), 0.0, 0.0, std::move(samples)};
  dist.p_positive = double(positive) / double(n_paths);
  dist.ci_halfwidth =
      1.959963984540054 * std::sqrt(dist.p_positive * (1.0 - dist.p_positive) / double(n_paths));
  return dist;
}

SpectrumReport dichotomy_spectrum_probe(const ModelParams& params,
                                        const std::vector<double>& T_list, uint64_t n_paths,
                                        const PullbackOptions& opts, int threads) {
  if (T_list.empty()) throw std::invalid_argument("dichotomy_spectrum_probe: empty T list");
  for (size_t i = 0; i < T_list.size(); ++i) {
    if (!(T_list[i] > 0.0) || (i > 0 && !(T_list[i] > T_list[i - 1])))
      throw std::invalid_argument("dichotomy_spectrum_probe: T list must be increasing and positive");
  }
  const double t_max = T_list.back();
  const size_t n_t = T_list.size();
  std::vector<double> rates(size_t(n_paths) * n_t);
  parallel_for(int64_t(n_paths), threads, [&](int64_t p) {
    const EquilibriumRun run = equilibrium_forward(params, uint64_t(p), opts, t_max);
    for (size_t k = 0; k < n_t; ++k) {
      const auto idx = int64_t(std::llround(T_list[k] / run.forward.grid.dt));
      rates[size_t(p) * n_t + k] =
          cocycle_integral(params, run.forward, idx) / T_list[k];
    }
  });
  SpectrumReport report;
  for (size_t k = 0; k < n_t; ++k) {
    SpectrumRow row;
    row.T = T_list[k];
    row.n_paths = n_paths;
    row.rate_min = rates[k];
    row.rate_max = rates[k];
    for (uint64_t p = 1; p < n_paths; ++p) {
      const double r = rates[size_t(p) * n_t + k];
      row.rate_min = std::min(row.rate_min, r);
      row.rate_max = std::max(row.rate_max, r);
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace pitchfork
