#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "pitchfork/measures.hpp"
#include "pitchfork/sde.hpp"

namespace pitchfork {

struct PullbackOptions {
  double horizon = 50.0;      // initial pullback horizon T (path starts at -T)
  double max_horizon = 800.0; // doubled up to here; beyond that the run is a failure
  double tolerance = 1e-8;    // collapse threshold on the image-interval diameter
  double dt = 1e-3;
  double interval_lo = -10.0; // initial interval bracketing the attractor
  double interval_hi = 10.0;
};

struct PullbackResult {
  double pullback_horizon = 0.0;
  std::pair<double, double> endpoints_at_zero{0.0, 0.0};
  double diameter = 0.0;
  double equilibrium_estimate = 0.0;
  bool collapsed = false;
};

/// Pullback across an explicit noise window covering [-T, 0]: both interval
/// endpoints are integrated on the same noise; order preservation makes the
/// image interval bracket the attractor.
PullbackResult pullback_attractor(const ModelParams& params, const NoisePath& noise, double T,
                                  std::pair<double, double> initial_interval, double tolerance);

/// Pullback for one path id, regenerating windows [-T, 0] and doubling T until
/// the image collapses or max_horizon is hit (reported, never silently capped).
PullbackResult pullback_equilibrium(const ModelParams& params, uint64_t path_id,
                                    const PullbackOptions& opts);

/// Pullback to time 0 followed by a forward run over [0, t_forward] of the
/// random equilibrium along the same noise realization. Throws SolverError if
/// the pullback never collapses.
struct EquilibriumRun {
  PullbackResult pullback;
  Trajectory forward;  // grid [0, t_forward]; states[0] is the equilibrium sample
};
EquilibriumRun equilibrium_forward(const ModelParams& params, uint64_t path_id,
                                   const PullbackOptions& opts, double t_forward);

struct EnsembleRecord {
  uint64_t path_id = 0;
  double equilibrium = 0.0;
  double diameter = 0.0;
  double horizon = 0.0;
  bool collapsed = false;
};

struct EquilibriumEnsemble {
  EmpiricalMeasure measure;  // sorted equilibrium samples
  std::vector<EnsembleRecord> records;
};

/// Independent equilibrium samples over path ids 0..n_paths-1; distributed as
/// the stationary law of the model.
EquilibriumEnsemble equilibrium_ensemble(const ModelParams& params, uint64_t n_paths,
                                         const PullbackOptions& opts = {}, int threads = 0);

struct VicinityEstimate {
  double estimate = 0.0;
  double ci_halfwidth = 0.0;
  uint64_t n_paths = 0;
  std::vector<uint8_t> held;  // per-path tube-event indicator
};

/// Probability that the random equilibrium stays inside (-epsilon, epsilon) at
/// every grid node of [0, T], estimated by extending pullback runs forward.
VicinityEstimate vicinity_probability(const ModelParams& params, double epsilon, double T,
                                      uint64_t n_paths, const PullbackOptions& opts = {},
                                      int threads = 0);

}  // namespace pitchfork
