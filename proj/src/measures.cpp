#include "pitchfork/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pitchfork/parallel.hpp"
#include "pitchfork/rng.hpp"

namespace pitchfork {

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw std::invalid_argument("EmpiricalMeasure: needs at least one sample");
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalMeasure::mean() const {
  double acc = 0.0;
  for (const double s : samples_) acc += s;
  return acc / double(samples_.size());
}

double EmpiricalMeasure::moment(int order) const {
  double acc = 0.0;
  for (const double s : samples_) acc += std::pow(s, order);
  return acc / double(samples_.size());
}

double EmpiricalMeasure::quantile(double q) const {
  const size_t n = samples_.size();
  const double pos = q * double(n) - 0.5;
  if (pos <= 0.0) return samples_.front();
  if (pos >= double(n - 1)) return samples_.back();
  const auto i = size_t(pos);
  const double frac = pos - double(i);
  if (frac == 0.0) return samples_[i];
  return samples_[i] * (1.0 - frac) + samples_[i + 1] * frac;
}

EmpiricalMeasure EmpiricalMeasure::resample(size_t n) const {
  if (n == 0) throw std::invalid_argument("EmpiricalMeasure::resample: n must be positive");
  std::vector<double> out(n);
  for (size_t i = 0; i < n; ++i) out[i] = quantile((double(i) + 0.5) / double(n));
  return EmpiricalMeasure(std::move(out));
}

double wasserstein(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("wasserstein: order p must be at least 1");
  const size_t n = std::max(mu.size(), nu.size());
  const auto run = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    if (p == 1.0) {
      for (size_t i = 0; i < a.size(); ++i) acc += std::fabs(a[i] - b[i]);
      return acc / double(a.size());
    }
    for (size_t i = 0; i < a.size(); ++i) acc += std::pow(std::fabs(a[i] - b[i]), p);
    return std::pow(acc / double(a.size()), 1.0 / p);
  };
  if (mu.size() == nu.size()) return run(mu.samples(), nu.samples());
  return run(mu.resample(n).samples(), nu.resample(n).samples());
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("linear_fit: need two or more aligned points");
  const double n = double(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit fit;
  const double det = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / n;
  for (size_t i = 0; i < x.size(); ++i) {
    const double fitted = fit.intercept + fit.slope * x[i];
    ss_res += (y[i] - fitted) * (y[i] - fitted);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

DecayReport ergodicity_decay(const ModelParams& params, const EmpiricalMeasure& initial,
                             const std::vector<double>& t_checkpoints, uint64_t n_paths,
                             const EmpiricalMeasure& reference, int threads) {
  if (t_checkpoints.empty())
    throw std::invalid_argument("ergodicity_decay: needs at least one checkpoint");
  for (size_t i = 0; i < t_checkpoints.size(); ++i) {
    if (!(t_checkpoints[i] > 0.0) || (i > 0 && !(t_checkpoints[i] > t_checkpoints[i - 1])))
      throw std::invalid_argument("ergodicity_decay: checkpoints must be positive and increasing");
  }
  const double dt = 1e-3;
  const double t_max = t_checkpoints.back();
  const TimeGrid grid = TimeGrid::with_dt(0.0, t_max, dt);
  std::vector<int64_t> checkpoint_steps;
  for (const double t : t_checkpoints)
    checkpoint_steps.push_back(std::min<int64_t>(grid.n_steps, std::llround(t / grid.dt)));

  // Evolution uses its own derived seed so it is independent of the reference
  // ensemble, which is typically built from the same base seed.
  NoiseConfig evo = params.noise;
  evo.seed = derive_seed(params.noise.seed, 0xE701u);
  ModelParams evo_params = params;
  evo_params.noise = evo;
  const IncrementSampler sampler(evo, grid.dt);

  const size_t n_checks = checkpoint_steps.size();
  std::vector<double> snapshots(size_t(n_paths) * n_checks);
  parallel_for(int64_t(n_paths), threads, [&](int64_t p) {
    double x = initial.quantile((double(p) + 0.5) / double(n_paths));
    size_t next_check = 0;
    for (int64_t i = 0; i < grid.n_steps && next_check < n_checks; ++i) {
      x = implicit_drift_step(evo_params, x, grid.dt) + sampler(uint64_t(p), i);
      while (next_check < n_checks && checkpoint_steps[next_check] == i + 1)
        snapshots[size_t(p) * n_checks + next_check++] = x;
    }
  });

  DecayReport report;
  // Noise floor: distance between two halves of the reference obtained by a
  // value-independent random split, i.e. two independent stationary samples.
  // (Splitting by sorted position would interleave the halves and understate
  // the floor by roughly sqrt(n).)
  if (reference.size() >= 4) {
    CounterRng split_rng(derive_seed(params.noise.seed, 0xF100u), 0);
    std::vector<double> first, second;
    for (size_t i = 0; i < reference.size(); ++i) {
      const double x = reference.samples()[i];
      const bool go_first = split_rng.u01() < 0.5;
      if (go_first && first.size() < reference.size() / 2) first.push_back(x);
      else if (second.size() < reference.size() - reference.size() / 2) second.push_back(x);
      else first.push_back(x);
    }
    report.noise_floor = wasserstein(EmpiricalMeasure(first), EmpiricalMeasure(second), 1.0);
  }

  std::vector<double> fit_t, fit_logw;
  for (size_t c = 0; c < n_checks; ++c) {
    std::vector<double> law(n_paths);
    for (uint64_t p = 0; p < n_paths; ++p) law[size_t(p)] = snapshots[size_t(p) * n_checks + c];
    DecayPoint point;
    point.t = t_checkpoints[c];
    point.w1 = wasserstein(EmpiricalMeasure(std::move(law)), reference, 1.0);
    point.used_in_fit = point.w1 > 2.0 * report.noise_floor;
    if (point.used_in_fit) {
      fit_t.push_back(point.t);
      fit_logw.push_back(std::log(point.w1));
    }
    report.points.push_back(point);
  }
  if (fit_t.size() >= 2) {
    const LinearFit fit = linear_fit(fit_t, fit_logw);
    report.rate = -fit.slope;
    report.prefactor = std::exp(fit.intercept);
    report.r_squared = fit.r_squared;
  }
  return report;
}

}  // namespace pitchfork
