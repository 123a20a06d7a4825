#pragma once

// Independent numerical oracles used only by tests. These deliberately avoid
// the library's own quadrature/integration code paths: expected values are
// cross-checked against straightforward classical methods.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Classical fixed-step RK4 for dx/dt = f(x); returns x(t1).
inline double rk4(const std::function<double(double)>& f, double x0, double t0, double t1,
                  int64_t n_steps) {
  const double h = (t1 - t0) / double(n_steps);
  double x = x0;
  for (int64_t i = 0; i < n_steps; ++i) {
    const double k1 = f(x);
    const double k2 = f(x + 0.5 * h * k1);
    const double k3 = f(x + 0.5 * h * k2);
    const double k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  if (n % 2 != 0) ++n;
  const double h = (b - a) / double(n);
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + h * double(i)) * (i % 2 == 0 ? 2.0 : 4.0);
  return acc * h / 3.0;
}

/// Two-sample Kolmogorov-Smirnov distance; inputs need not be sorted.
inline double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    const double fa = double(i) / double(a.size());
    const double fb = double(j) / double(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

struct EcfPoint {
  double value = 0.0;       // empirical mean of cos(u X)
  double std_error = 0.0;   // Monte Carlo standard error of that mean
};

/// Empirical characteristic function of a symmetric sample at frequency u.
inline EcfPoint empirical_cf(const std::vector<double>& samples, double u) {
  double mean = 0.0;
  for (const double x : samples) mean += std::cos(u * x);
  mean /= double(samples.size());
  double var = 0.0;
  for (const double x : samples) {
    const double d = std::cos(u * x) - mean;
    var += d * d;
  }
  var /= double(samples.size() - 1);
  return {mean, std::sqrt(var / double(samples.size()))};
}

inline double mean(const std::vector<double>& v) {
  double acc = 0.0;
  for (const double x : v) acc += x;
  return acc / double(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0.0;
  for (const double x : v) acc += (x - m) * (x - m);
  return acc / double(v.size() - 1);
}

/// Standard error of the sample variance, using the empirical fourth moment
/// (valid for non-Gaussian laws).
inline double variance_std_error(const std::vector<double>& v) {
  const double m = mean(v);
  const double s2 = variance(v);
  double m4 = 0.0;
  for (const double x : v) {
    const double d = x - m;
    m4 += d * d * d * d;
  }
  m4 /= double(v.size());
  return std::sqrt(std::max(0.0, m4 - s2 * s2) / double(v.size()));
}

}  // namespace oracles
