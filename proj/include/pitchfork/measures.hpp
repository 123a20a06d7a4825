#pragma once

#include <cstdint>
#include <vector>

#include "pitchfork/sde.hpp"

namespace pitchfork {

/// Sorted sample set standing in for a probability measure on the line.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<double> samples);

  const std::vector<double>& samples() const { return samples_; }
  size_t size() const { return samples_.size(); }

  double mean() const;
  double moment(int order) const;

  /// Linear-interpolation quantile with nodes at (i + 0.5)/n, so resampling a
  /// measure to its own size reproduces it exactly.
  double quantile(double q) const;

  EmpiricalMeasure resample(size_t n) const;

 private:
  std::vector<double> samples_;
};

/// L^p Wasserstein distance between empirical measures; in one dimension the
/// optimal coupling is the sorted pairing. Unequal sizes are aligned by
/// quantile resampling to the larger count.
double wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p);

struct DecayPoint {
  double t = 0.0;
  double w1 = 0.0;
  bool used_in_fit = false;
};

struct DecayReport {
  std::vector<DecayPoint> points;
  double rate = 0.0;        // fitted c in K e^{-c t}
  double prefactor = 0.0;   // fitted K
  double r_squared = 0.0;
  double noise_floor = 0.0;  // W1 between two independent stationary subsamples
};

/// Evolves n_paths points drawn from `initial` and fits log W1(law_t, reference)
/// against t. Checkpoints within 2x of the Monte Carlo noise floor are excluded
/// from the fit (they measure sampling error, not relaxation).
DecayReport ergodicity_decay(const ModelParams& params, const EmpiricalMeasure& initial,
                             const std::vector<double>& t_checkpoints, uint64_t n_paths,
                             const EmpiricalMeasure& reference, int threads = 0);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pitchfork
