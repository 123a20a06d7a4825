#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace pitchfork {

/// Uniform time grid, possibly starting at negative times (two-sided paths).
/// Step i covers [t_start + i*dt, t_start + (i+1)*dt).
struct TimeGrid {
  double t_start = 0.0;
  double t_end = 0.0;
  int64_t n_steps = 0;
  double dt = 0.0;

  TimeGrid() = default;

  TimeGrid(double t0, double t1, int64_t n) : t_start(t0), t_end(t1), n_steps(n) {
    if (!(t1 > t0)) throw std::invalid_argument("TimeGrid: t_end must exceed t_start");
    if (n < 1) throw std::invalid_argument("TimeGrid: n_steps must be positive");
    dt = (t1 - t0) / double(n);
  }

  /// Grid over [t0, t1] with the step count implied by dt (rounded).
  static TimeGrid with_dt(double t0, double t1, double dt_target) {
    if (!(dt_target > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
    const auto n = int64_t(std::llround((t1 - t0) / dt_target));
    return TimeGrid(t0, t1, n < 1 ? 1 : n);
  }

  double time_at(int64_t i) const { return t_start + double(i) * dt; }

  /// Index of step i in the global two-sided step numbering anchored at t=0.
  /// Windows of the same path id agree on their overlap because increments
  /// are keyed by this absolute index.
  int64_t global_step(int64_t i) const {
    return int64_t(std::llround(t_start / dt)) + i;
  }
};

}  // namespace pitchfork
