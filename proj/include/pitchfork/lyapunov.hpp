#pragma once

#include <cstdint>
#include <vector>

#include "pitchfork/attractor.hpp"

namespace pitchfork {

struct FtleSample {
  double T = 0.0;
  double value = 0.0;  // never exceeds beta: the integrand beta - 3a^2 does not
  uint64_t omega_id = 0;
};

struct AsymptoticOptions {
  double burn_in = 10.0;  // discarded before averaging; the initial window is forgotten
  int n_batches = 32;
  PullbackOptions pullback;
};

struct AsymptoticLyapunov {
  double estimate = 0.0;
  double std_error = 0.0;
  bool limit_certified = false;  // true only in the truncated regime, where the
                                 // long-run average provably converges
  std::vector<double> batch_means;
};

/// Time average of beta - 3 a(t)^2 along one long equilibrium trajectory,
/// with batch-means standard error. Requires a collapsed pullback.
AsymptoticLyapunov asymptotic_lyapunov(const ModelParams& params, double T,
                                       const AsymptoticOptions& opts = {});

/// Finite-time exponent over [0, T] of an equilibrium trajectory:
/// beta minus the time average of 3 a^2, equal to log(linearized_flow)/T.
FtleSample finite_time_lyapunov(const ModelParams& params, const Trajectory& equilibrium,
                                double T, uint64_t omega_id = 0);

struct FtleDistribution {
  EmpiricalMeasure values;
  double p_positive = 0.0;
  double ci_halfwidth = 0.0;
  std::vector<FtleSample> samples;
};

FtleDistribution ftle_distribution(const ModelParams& params, double T, uint64_t n_paths,
                                   const PullbackOptions& opts = {}, int threads = 0);

struct SpectrumRow {
  double T = 0.0;
  double rate_min = 0.0;
  double rate_max = 0.0;
  uint64_t n_paths = 0;
};

struct SpectrumReport {
  std::vector<SpectrumRow> rows;
};

/// Empirical envelopes of the finite-time growth rate (1/T) log Phi(T, omega).
/// The sample maximum probes the upper spectral edge at beta; the minimum,
/// which keeps falling as n grows, evidences the unbounded lower edge.
SpectrumReport dichotomy_spectrum_probe(const ModelParams& params,
                                        const std::vector<double>& T_list, uint64_t n_paths,
                                        const PullbackOptions& opts = {}, int threads = 0);

}  // namespace pitchfork
