#include "pitchfork/attractor.hpp"

#include <cmath>

#include "pitchfork/errors.hpp"
#include "pitchfork/parallel.hpp"

namespace pitchfork {

namespace {

// Integrates both interval endpoints across [start_index, end_index) of the
// given per-step sampler. Once the endpoints are bit-identical they can never
// separate again (the update map is common), so a single state is advanced.
std::pair<double, double> evolve_interval(const ModelParams& params,
                                          const IncrementSampler& sampler, uint64_t path_id,
                                          int64_t first_step, int64_t n_steps, double lo,
                                          double hi) {
  const double dt = sampler.dt();
  for (int64_t i = 0; i < n_steps; ++i) {
    const double inc = sampler(path_id, first_step + i);
    if (lo == hi) {
      lo = hi = implicit_drift_step(params, lo, dt) + inc;
    } else {
      lo = implicit_drift_step(params, lo, dt) + inc;
      hi = implicit_drift_step(params, hi, dt) + inc;
    }
  }
  return {lo, hi};
}

PullbackResult make_result(double T, std::pair<double, double> endpoints, double tolerance) {
  PullbackResult result;
  result.pullback_horizon = T;
  result.endpoints_at_zero = endpoints;
  result.diameter = std::fabs(endpoints.second - endpoints.first);
  result.equilibrium_estimate = 0.5 * (endpoints.first + endpoints.second);
  result.collapsed = result.diameter < tolerance;
  return result;
}

}  // namespace

PullbackResult pullback_attractor(const ModelParams& params, const NoisePath& noise, double T,
                                  std::pair<double, double> initial_interval, double tolerance) {
  if (!(initial_interval.second > initial_interval.first))
    throw std::invalid_argument("pullback_attractor: initial interval is degenerate");
  const TimeGrid& grid = noise.grid;
  const double slack = 0.5 * grid.dt;
  if (grid.t_start > -T + slack || grid.t_end < -slack)
    throw OutOfWindowError("pullback_attractor: noise window does not cover [-T, 0]");
  const auto first = int64_t(std::llround((-T - grid.t_start) / grid.dt));
  const auto last = int64_t(std::llround((0.0 - grid.t_start) / grid.dt));
  double lo = initial_interval.first;
  double hi = initial_interval.second;
  for (int64_t i = first; i < last; ++i) {
    const double inc = noise.increments[size_t(i)];
    lo = implicit_drift_step(params, lo, grid.dt) + inc;
    hi = implicit_drift_step(params, hi, grid.dt) + inc;
  }
  return make_result(T, {lo, hi}, tolerance);
}

PullbackResult pullback_equilibrium(const ModelParams& params, uint64_t path_id,
                                    const PullbackOptions& opts) {
  params.noise.validate();
  const IncrementSampler sampler(params.noise, opts.dt);
  PullbackResult result;
  for (double T = opts.horizon;; T *= 2.0) {
    const auto n_steps = int64_t(std::llround(T / opts.dt));
    const auto endpoints = evolve_interval(params, sampler, path_id, -n_steps, n_steps,
                                           opts.interval_lo, opts.interval_hi);
    result = make_result(T, endpoints, opts.tolerance);
    if (result.collapsed || T >= opts.max_horizon) return result;
  }
}

EquilibriumRun equilibrium_forward(const ModelParams& params, uint64_t path_id,
                                   const PullbackOptions& opts, double t_forward) {
  EquilibriumRun run;
  run.pullback = pullback_equilibrium(params, path_id, opts);
  if (!run.pullback.collapsed)
    throw SolverError("pullback did not collapse within the horizon cap", {});
  const TimeGrid grid = TimeGrid::with_dt(0.0, t_forward, opts.dt);
  const IncrementSampler sampler(params.noise, grid.dt);
  run.forward.grid = grid;
  run.forward.params = params;
  run.forward.states.resize(size_t(grid.n_steps) + 1);
  double x = run.pullback.equilibrium_estimate;
  run.forward.states[0] = x;
  for (int64_t i = 0; i < grid.n_steps; ++i) {
    x = implicit_drift_step(params, x, grid.dt) + sampler(path_id, i);
    run.forward.states[size_t(i) + 1] = x;
  }
  return run;
}

EquilibriumEnsemble equilibrium_ensemble(const ModelParams& params, uint64_t n_paths,
                                         const PullbackOptions& opts, int threads) {
  if (n_paths < 1000)
    throw std::invalid_argument("equilibrium_ensemble: n_paths must be at least 1000");
  std::vector<EnsembleRecord> records(n_paths);
  parallel_for(int64_t(n_paths), threads, [&](int64_t p) {
    const PullbackResult r = pullback_equilibrium(params, uint64_t(p), opts);
    records[size_t(p)] = {uint64_t(p), r.equilibrium_estimate, r.diameter, r.pullback_horizon,
                          r.collapsed};
  });
  std::vector<double> samples;
  samples.reserve(n_paths);
  for (const auto& rec : records) {
    if (!rec.collapsed)
      throw SolverError("equilibrium_ensemble: a pullback run failed to collapse", {});
    samples.push_back(rec.equilibrium);
  }
  return {EmpiricalMeasure(std::move(samples)), std::move(records)};
}

VicinityEstimate vicinity_probability(const ModelParams& params, double epsilon, double T,
                                      uint64_t n_paths, const PullbackOptions& opts,
                                      int threads) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("vicinity_probability: epsilon must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("vicinity_probability: T must be positive");
  std::vector<uint8_t> held(n_paths, 0);
  parallel_for(int64_t(n_paths), threads, [&](int64_t p) {
    const EquilibriumRun run = equilibrium_forward(params, uint64_t(p), opts, T);
    bool inside = true;
    for (const double a : run.forward.states) {
      if (!(std::fabs(a) < epsilon)) {
        inside = false;
        break;
      }
    }
    held[size_t(p)] = inside ? 1 : 0;
  });
  uint64_t hits = 0;
  for (const auto h : held) hits += h;
  VicinityEstimate est;
  est.n_paths = n_paths;
  est.estimate = double(hits) / double(n_paths);
  est.ci_halfwidth =
      1.959963984540054 * std::sqrt(est.estimate * (1.0 - est.estimate) / double(n_paths));
  est.held = std::move(held);
  return est;
}

}  // namespace pitchfork
