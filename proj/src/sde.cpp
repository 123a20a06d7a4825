#include "pitchfork/sde.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pitchfork {

void Trajectory::write_csv(std::ostream& os) const {
  os << "t,x\n";
  char buf[64];
  for (size_t i = 0; i < states.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid.time_at(int64_t(i)), states[i]);
    os << buf;
  }
}

double implicit_drift_step(const ModelParams& params, double x, double dt) {
  if (x == 0.0) return 0.0;
  const double denom = 1.0 - dt * params.beta;
  if (!params.cubic) return x / denom;
  // dt*y^3 + (1 - dt*beta)*y - x = 0 has a unique real root (denom > 0).
  // Solved by the stable Cardano form on |x| plus one Newton polish; oddness
  // is exact by construction.
  const double ax = std::fabs(x);
  const double p = denom / dt;
  const double qh = ax / dt;  // y^3 + p y - qh = 0
  const double s = std::sqrt(0.25 * qh * qh + p * p * p / 27.0);
  const double u = std::cbrt(0.5 * qh + s);
  double y = u - p / (3.0 * u);
  const double f = dt * y * y * y + denom * y - ax;
  const double fp = 3.0 * dt * y * y + denom;
  y -= f / fp;
  if (y < 0.0) y = 0.0;
  return std::copysign(y, x);
}

Trajectory integrate(const ModelParams& params, const NoisePath& noise, double x0) {
  if (!std::isfinite(x0)) throw std::invalid_argument("integrate: x0 must be finite");
  const double dt = noise.grid.dt;
  if (params.beta > 0.0 && dt * params.beta >= 1.0)
    throw std::invalid_argument("integrate: dt too large for this beta (needs dt*beta < 1)");
  Trajectory traj;
  traj.grid = noise.grid;
  traj.params = params;
  traj.states.resize(size_t(noise.grid.n_steps) + 1);
  double x = x0;
  traj.states[0] = x;
  for (int64_t i = 0; i < noise.grid.n_steps; ++i) {
    x = implicit_drift_step(params, x, dt) + noise.increments[size_t(i)];
    traj.states[size_t(i) + 1] = x;
  }
  return traj;
}

double cocycle_integral(const ModelParams& params, const Trajectory& traj, int64_t t_index) {
  if (t_index < 0 || size_t(t_index) >= traj.states.size())
    throw std::out_of_range("cocycle_integral: index outside trajectory");
  const double dt = traj.grid.dt;
  auto f = [&](int64_t i) {
    const double a = traj.states[size_t(i)];
    return params.cubic ? params.beta - 3.0 * a * a : params.beta;
  };
  double acc = 0.0;
  for (int64_t i = 0; i < t_index; ++i) acc += 0.5 * (f(i) + f(i + 1)) * dt;
  return acc;
}

double linearized_flow(const ModelParams& params, const Trajectory& equilibrium,
                       int64_t t_index) {
  return std::exp(cocycle_integral(params, equilibrium, t_index));
}

ForcedComparison compare_to_forced_ode(const ModelParams& params, const NoisePath& noise,
                                       std::span<const double> forcing_increments,
                                       double x0_noise, double x0_forced, double delta) {
  if (int64_t(forcing_increments.size()) != noise.grid.n_steps)
    throw std::invalid_argument("compare_to_forced_ode: forcing grid does not match noise grid");
  const double dt = noise.grid.dt;
  const double sigma = params.sigma();
  double x = x0_noise;
  double y = x0_forced;
  double sup = std::fabs(x - y);
  for (int64_t i = 0; i < noise.grid.n_steps; ++i) {
    x = implicit_drift_step(params, x, dt) + noise.increments[size_t(i)];
    y = implicit_drift_step(params, y, dt) + sigma * forcing_increments[size_t(i)];
    sup = std::max(sup, std::fabs(x - y));
  }
  return {sup, sup <= delta};
}

}  // namespace pitchfork
