#include "pitchfork/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "pitchfork/errors.hpp"
#include "pitchfork/fft.hpp"
#include "pitchfork/quadrature.hpp"

namespace pitchfork {

namespace {

bool is_power_of_two(int n) { return n > 1 && (n & (n - 1)) == 0; }

std::vector<double> grid_frequencies(double halfwidth, int n) {
  std::vector<double> u(static_cast<size_t>(n));
  const double base = M_PI / halfwidth;
  for (int k = 0; k < n; ++k) {
    const int signed_k = (k <= n / 2) ? k : k - n;
    u[size_t(k)] = base * double(signed_k);
  }
  return u;
}

/// Band integral 2 c_alpha int_0^1 (cos(a z) - 1) z^{-1-alpha} dz for a >= 0.
/// Series below z0 = min(1, 0.5/a), adaptive quadrature above.
double band_symbol(double alpha, double c_alpha, double a) {
  if (a == 0.0) return 0.0;
  const double z0 = std::min(1.0, 0.5 / a);
  // int_0^{z0}: term-by-term integration of the cosine series,
  // sum_k (-1)^k a^{2k} z0^{2k-alpha} / ((2k)! (2k - alpha)), with a*z0 <= 1/2.
  double series = 0.0;
  double ck = 1.0;  // (-1)^k (a z0)^{2k} / (2k)!
  const double az0_sq = (a * z0) * (a * z0);
  const double z0_neg_alpha = std::pow(z0, -alpha);
  for (int k = 1; k <= 16; ++k) {
    ck *= -az0_sq / (double(2 * k - 1) * double(2 * k));
    const double term = ck * z0_neg_alpha / (2.0 * double(k) - alpha);
    series += term;
    if (std::fabs(term) < 1e-18 * (1.0 + std::fabs(series))) break;
  }
  double quad = 0.0;
  if (z0 < 1.0) {
    const auto integrand = [&](double z) {
      return (std::cos(a * z) - 1.0) * std::pow(z, -1.0 - alpha);
    };
    quad = adaptive_simpson(integrand, z0, 1.0, 1e-11 * (1.0 + std::pow(a, alpha)));
  }
  return 2.0 * c_alpha * (series + quad);
}

struct SymbolKey {
  double alpha, sigma, halfwidth;
  int n;
  int mode;
  bool operator<(const SymbolKey& o) const {
    return std::tie(alpha, sigma, halfwidth, n, mode) <
           std::tie(o.alpha, o.sigma, o.halfwidth, o.n, o.mode);
  }
};

std::vector<double> compute_jump_symbol(const NoiseConfig& config, double halfwidth, int n) {
  const auto u = grid_frequencies(halfwidth, n);
  std::vector<double> psi(size_t(n), 0.0);
  if (config.mode == NoiseMode::NonTruncated) {
    const double s = std::pow(config.sigma, config.alpha);
    for (int k = 0; k < n; ++k) psi[size_t(k)] = -s * std::pow(std::fabs(u[size_t(k)]), config.alpha);
    return psi;
  }
  const double c_alpha = levy_intensity_constant(config.alpha);
  // psi depends on |u| only; compute one half and mirror.
  for (int k = 0; k <= n / 2; ++k)
    psi[size_t(k)] = band_symbol(config.alpha, c_alpha, config.sigma * std::fabs(u[size_t(k)]));
  for (int k = n / 2 + 1; k < n; ++k) psi[size_t(k)] = psi[size_t(n - k)];
  return psi;
}

const std::vector<double>& cached_jump_symbol(const NoiseConfig& config, double halfwidth, int n) {
  static std::map<SymbolKey, std::vector<double>> cache;
  static std::mutex mutex;
  const SymbolKey key{config.alpha, config.sigma, halfwidth, n,
                      config.mode == NoiseMode::Truncated ? 1 : 0};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute_jump_symbol(config, halfwidth, n)).first;
  return it->second;
}

/// Upwind flux divergence of the drift field: (Dp)_i = (F_i - F_{i+1}) / dx
/// with no-flux boundary faces. Mass-conserving by construction.
struct DriftOperator {
  std::vector<double> face_b;  // b at cell faces, size n+1 (faces 0 and n unused)
  double dx = 0.0;
  int n = 0;

  DriftOperator(const ModelParams& params, double halfwidth, int n_points) {
    n = n_points;
    dx = 2.0 * halfwidth / double(n_points);
    face_b.resize(size_t(n_points) + 1, 0.0);
    for (int f = 1; f < n_points; ++f)
      face_b[size_t(f)] = drift(params, -halfwidth + double(f) * dx);
  }

  void apply(std::span<const double> p, std::vector<double>& out) const {
    out.assign(size_t(n), 0.0);
    double flux_left = 0.0;
    for (int i = 0; i < n; ++i) {
      const double bf = (i + 1 < n) ? face_b[size_t(i) + 1] : 0.0;
      const double flux_right =
          (i + 1 < n) ? (bf > 0.0 ? bf * p[size_t(i)] : bf * p[size_t(i) + 1]) : 0.0;
      out[size_t(i)] = (flux_left - flux_right) / dx;
      flux_left = flux_right;
    }
  }

  /// Solves (I - tau D) x = rhs by the Thomas algorithm. The matrix is an
  /// M-matrix (unit column sums), so the sweep is well conditioned.
  void solve(double tau, std::span<const double> rhs, std::vector<double>& x,
             std::vector<double>& diag, std::vector<double>& sub, std::vector<double>& super) const {
    diag.assign(size_t(n), 1.0);
    sub.assign(size_t(n), 0.0);
    super.assign(size_t(n), 0.0);
    const double r = tau / dx;
    for (int i = 0; i < n; ++i) {
      const double b_lo = face_b[size_t(i)];      // face i (zero at boundary)
      const double b_hi = face_b[size_t(i) + 1];  // face i+1 (zero at boundary)
      const double out_lo = (i > 0) ? std::min(b_lo, 0.0) : 0.0;
      const double out_hi = (i + 1 < n) ? std::max(b_hi, 0.0) : 0.0;
      diag[size_t(i)] = 1.0 - r * (out_lo - out_hi);
      if (i > 0) sub[size_t(i)] = -r * std::max(b_lo, 0.0);
      if (i + 1 < n) super[size_t(i)] = r * std::min(b_hi, 0.0);
    }
    x.assign(rhs.begin(), rhs.end());
    for (int i = 1; i < n; ++i) {
      const double w = sub[size_t(i)] / diag[size_t(i) - 1];
      diag[size_t(i)] -= w * super[size_t(i) - 1];
      x[size_t(i)] -= w * x[size_t(i) - 1];
    }
    x[size_t(n) - 1] /= diag[size_t(n) - 1];
    for (int i = n - 2; i >= 0; --i)
      x[size_t(i)] = (x[size_t(i)] - super[size_t(i)] * x[size_t(i) + 1]) / diag[size_t(i)];
  }

  double max_rate() const {
    double m = 0.0;
    for (const double b : face_b) m = std::max(m, std::fabs(b));
    return m / dx;
  }
};

double largest_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

namespace {

/// Banded matrix in diagonal storage: entry(i, j) lives at
/// data[i * (2m+1) + (j - i + m)] for |i - j| <= m.
struct BandedMatrix {
  int n = 0, m = 0;
  std::vector<double> data;

  BandedMatrix(int n_, int m_) : n(n_), m(m_), data(size_t(n_) * size_t(2 * m_ + 1), 0.0) {}
  double& at(int i, int j) { return data[size_t(i) * size_t(2 * m + 1) + size_t(j - i + m)]; }
  double get(int i, int j) const {
    return data[size_t(i) * size_t(2 * m + 1) + size_t(j - i + m)];
  }

  void multiply(std::span<const double> x, std::vector<double>& out) const {
    out.assign(size_t(n), 0.0);
    for (int i = 0; i < n; ++i) {
      const int lo = std::max(0, i - m), hi = std::min(n - 1, i + m);
      double acc = 0.0;
      for (int j = lo; j <= hi; ++j) acc += get(i, j) * x[size_t(j)];
      out[size_t(i)] = acc;
    }
  }

  /// In-place LU without pivoting (valid for diagonally dominant M-matrices;
  /// the factors keep the M sign pattern, so the triangular solves below add
  /// nonnegative terms only and preserve strict positivity of the input).
  void factor() {
    for (int k = 0; k < n; ++k) {
      const double pivot = at(k, k);
      const int last = std::min(n - 1, k + m);
      for (int i = k + 1; i <= last; ++i) {
        const double l = at(i, k) / pivot;
        at(i, k) = l;
        for (int j = k + 1; j <= last; ++j) at(i, j) -= l * get(k, j);
      }
    }
  }

  void solve_factored(std::vector<double>& x) const {
    for (int i = 0; i < n; ++i) {
      const int lo = std::max(0, i - m);
      double acc = x[size_t(i)];
      for (int j = lo; j < i; ++j) acc -= get(i, j) * x[size_t(j)];
      x[size_t(i)] = acc;
    }
    for (int i = n - 1; i >= 0; --i) {
      const int hi = std::min(n - 1, i + m);
      double acc = x[size_t(i)];
      for (int j = i + 1; j <= hi; ++j) acc -= get(i, j) * x[size_t(j)];
      x[size_t(i)] = acc / get(i, i);
    }
  }
};

/// Truncated-mode steady state via a positivity-preserving discretization:
/// band jump kernel from cell quadrature of the pushforward measure, sub-cell
/// jumps folded into a diffusion coefficient, upwind drift. The combined
/// generator is a banded M-matrix, so implicit Euler with one LU
/// factorization is an inverse power iteration whose fixed point is the exact
/// discrete steady state and whose solves cannot destroy positivity.
void solve_positive_kernel(const ModelParams& params, DensityGrid& density,
                           const DensitySolverOptions& opts) {
  const int n = density.n_points;
  const double dx = density.dx;
  const double alpha = params.noise.alpha;
  const double sigma = params.sigma();
  const double scale = levy_intensity_constant(alpha) * std::pow(sigma, alpha);

  // Band rates: q[k] = pushforward jump measure over the k-th cell shell,
  // support |w| < sigma; sub-cell jumps become a diffusion coefficient.
  std::vector<double> q;
  for (int k = 1;; ++k) {
    const double lo = (double(k) - 0.5) * dx;
    if (lo >= sigma) break;
    const double hi = std::min((double(k) + 0.5) * dx, sigma);
    q.push_back(scale / alpha * (std::pow(lo, -alpha) - std::pow(hi, -alpha)));
  }
  const int band = std::max<int>(1, int(q.size()));
  q.resize(size_t(band), 0.0);
  const double diffusion = scale * std::pow(0.5 * dx, 2.0 - alpha) / (2.0 - alpha);
  const double d_rate = diffusion / (dx * dx);

  const DriftOperator drift_op(params, density.halfwidth, n);
  const double tau = 4.0;

  // Assemble I - tau * (drift + jumps + diffusion). Boundary-crossing jumps
  // are censored on both sides, so every column sums to one and the solve
  // conserves mass.
  BandedMatrix a(n, band);
  for (int i = 0; i < n; ++i) {
    double out_rate = 0.0;
    for (int k = 1; k <= band; ++k) {
      if (i - k >= 0) {
        a.at(i, i - k) -= tau * q[size_t(k) - 1];
        out_rate += q[size_t(k) - 1];
      }
      if (i + k < n) {
        a.at(i, i + k) -= tau * q[size_t(k) - 1];
        out_rate += q[size_t(k) - 1];
      }
    }
    if (i > 0) {
      a.at(i, i - 1) -= tau * d_rate;
      out_rate += d_rate;
    }
    if (i + 1 < n) {
      a.at(i, i + 1) -= tau * d_rate;
      out_rate += d_rate;
    }
    a.at(i, i) += 1.0 + tau * out_rate;
    // Upwind drift fluxes through the two cell faces.
    const double b_lo = drift_op.face_b[size_t(i)];
    const double b_hi = drift_op.face_b[size_t(i) + 1];
    if (i > 0) {
      a.at(i, i - 1) -= tau * std::max(b_lo, 0.0) / dx;
      a.at(i, i) -= tau * std::min(b_lo, 0.0) / dx;
    }
    if (i + 1 < n) {
      a.at(i, i) += tau * std::max(b_hi, 0.0) / dx;
      a.at(i, i + 1) += tau * std::min(b_hi, 0.0) / dx;
    }
  }
  BandedMatrix generator = a;  // keep tau*A for residual evaluation: A p = ((I) - a) p / tau
  a.factor();

  std::vector<double>& p = density.values;
  std::vector<double> work(static_cast<size_t>(n));
  DensityDiagnostics& diag_out = density.diagnostics;
  const int max_iterations = std::max(200, opts.max_cycles * 20);
  for (int it = 0; it < max_iterations; ++it) {
    a.solve_factored(p);
    double mass = 0.0;
    for (const double w : p) mass += w * dx;
    diag_out.max_mass_drift = std::max(diag_out.max_mass_drift, std::fabs(mass - 1.0));
    for (auto& w : p) w /= mass;
    ++diag_out.iterations;
    // Residual of the unscaled generator: ((I - tau A) p - p) / tau = -A p.
    generator.multiply(p, work);
    double res_norm = 0.0;
    for (int i = 0; i < n; ++i) res_norm += std::fabs(work[size_t(i)] - p[size_t(i)]);
    res_norm *= dx / tau;
    diag_out.residual_history.push_back(res_norm);
    if (!std::isfinite(res_norm))
      throw SolverError("stationary_density: residual diverged", diag_out.residual_history);
    if (res_norm < opts.residual_tol) {
      diag_out.converged = true;
      return;
    }
  }
  throw SolverError("stationary_density: residual tolerance not reached within iteration cap",
                    diag_out.residual_history);
}

}  // namespace

std::vector<double> fractional_laplacian(std::span<const double> values, double alpha,
                                         double halfwidth) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw std::invalid_argument("fractional_laplacian: alpha must lie in (0, 2]");
  if (!is_power_of_two(int(values.size())))
    throw std::invalid_argument("fractional_laplacian: length must be a power of two");
  const int n = int(values.size());
  Fft fft(n);
  std::vector<std::complex<double>> spec;
  fft.forward(values, spec);
  const auto u = grid_frequencies(halfwidth, n);
  for (int k = 0; k < n; ++k) spec[size_t(k)] *= std::pow(std::fabs(u[size_t(k)]), alpha);
  std::vector<double> out;
  fft.inverse(spec, out);
  return out;
}

std::vector<double> jump_symbol(const NoiseConfig& config, double halfwidth, int n_points) {
  config.validate();
  if (!is_power_of_two(n_points))
    throw std::invalid_argument("jump_symbol: n_points must be a power of two");
  return cached_jump_symbol(config, halfwidth, n_points);
}

DensityGrid stationary_density(const ModelParams& params, const DensityGridSpec& spec,
                               const DensitySolverOptions& opts) {
  params.noise.validate();
  if (!(params.sigma() > 0.0))
    throw std::invalid_argument("stationary_density: requires sigma > 0");
  if (!is_power_of_two(spec.n_points))
    throw std::invalid_argument("stationary_density: n_points must be a power of two");
  const double min_L = 4.0 * std::max(1.0, std::sqrt(std::fabs(params.beta)));
  if (spec.halfwidth < min_L)
    throw std::invalid_argument("stationary_density: domain halfwidth below 4*max(1, sqrt|beta|)");

  const int n = spec.n_points;
  const double L = spec.halfwidth;
  DensityGrid density;
  density.halfwidth = L;
  density.n_points = n;
  density.dx = 2.0 * L / double(n);
  density.params = params;

  // Gaussian initial guess, normalized on the grid.
  std::vector<double>& p = density.values;
  p.resize(size_t(n));
  for (int i = 0; i < n; ++i) {
    const double x = density.node(i);
    p[size_t(i)] = std::exp(-0.5 * x * x);
  }
  {
    double mass = 0.0;
    for (const double v : p) mass += v * density.dx;
    for (auto& v : p) v /= mass;
  }

  if (opts.method == DensityMethod::PositiveKernel) {
    if (params.noise.mode != NoiseMode::Truncated)
      throw std::invalid_argument(
          "stationary_density: the positive-kernel method needs bounded jumps (truncated mode)");
    solve_positive_kernel(params, density, opts);
    return density;
  }

  const auto& psi = cached_jump_symbol(params.noise, L, n);
  const DriftOperator drift_op(params, L, n);
  Fft fft(n);

  const double stiffness = drift_op.max_rate() + largest_abs(psi);
  const double tau_min = 1.0 / stiffness;
  const double tau_max = std::max(opts.tau_max, 2.0 * tau_min);
  const int per_cycle = std::max(2, opts.taus_per_cycle);
  std::vector<double> taus(static_cast<size_t>(per_cycle));
  for (int k = 0; k < per_cycle; ++k)
    taus[size_t(k)] = tau_max * std::pow(tau_min / tau_max, double(k) / double(per_cycle - 1));

  std::vector<double> drift_term, residual, v, delta, diag, sub, super;
  std::vector<std::complex<double>> spec_buf;
  auto apply_A = [&](std::vector<double>& out) {
    drift_op.apply(p, drift_term);
    fft.forward(p, spec_buf);
    for (int k = 0; k < n; ++k) spec_buf[size_t(k)] *= psi[size_t(k)];
    fft.inverse(spec_buf, out);
    for (int i = 0; i < n; ++i) out[size_t(i)] += drift_term[size_t(i)];
  };

  DensityDiagnostics& diag_out = density.diagnostics;
  for (int cycle = 0; cycle < opts.max_cycles && !diag_out.converged; ++cycle) {
    double cycle_residual = 0.0;
    for (const double tau : taus) {
      apply_A(residual);
      double res_norm = 0.0;
      for (const double r : residual) res_norm += std::fabs(r);
      res_norm *= density.dx;
      cycle_residual = res_norm;
      ++diag_out.iterations;
      if (res_norm < opts.residual_tol) {
        diag_out.converged = true;
        break;
      }
      if (!std::isfinite(res_norm))
        throw SolverError("stationary_density: residual diverged", diag_out.residual_history);
      // (I - tau J)(I - tau D) delta = tau * residual, factors solved in turn.
      fft.forward(residual, spec_buf);
      for (int k = 0; k < n; ++k) spec_buf[size_t(k)] *= tau / (1.0 - tau * psi[size_t(k)]);
      fft.inverse(spec_buf, v);
      drift_op.solve(tau, v, delta, diag, sub, super);
      for (int i = 0; i < n; ++i) p[size_t(i)] += delta[size_t(i)];
      double mass = 0.0;
      for (const double w : p) mass += w * density.dx;
      diag_out.max_mass_drift = std::max(diag_out.max_mass_drift, std::fabs(mass - 1.0));
      for (auto& w : p) w /= mass;
    }
    diag_out.residual_history.push_back(cycle_residual);
  }
  if (!diag_out.converged)
    throw SolverError("stationary_density: residual tolerance not reached within cycle cap",
                      diag_out.residual_history);
  return density;
}

DensityGrid stationary_density_auto(const ModelParams& params) {
  DensityGridSpec spec;
  if (params.noise.mode == NoiseMode::Truncated) return stationary_density(params, spec);
  // Heavy tails: grow the domain (resolution held fixed) until the direct
  // Lyapunov functional settles to 1%.
  DensityGrid current = stationary_density(params, spec);
  for (int round = 0; round < 2; ++round) {
    DensityGridSpec wider{spec.halfwidth * 2.0, spec.n_points * 2};
    DensityGrid next = stationary_density(params, wider);
    const double a = lyapunov_from_density(current).direct;
    const double b = lyapunov_from_density(next).direct;
    if (std::fabs(a - b) < 0.01 * std::fabs(a)) return current;
    spec = wider;
    current = std::move(next);
  }
  return current;
}

double density_moment(const DensityGrid& density, int order) {
  double acc = 0.0;
  for (int i = 0; i < density.n_points; ++i)
    acc += std::pow(density.node(i), order) * density.values[size_t(i)] * density.dx;
  return acc;
}

DensityLyapunov lyapunov_from_density(const DensityGrid& density) {
  const int n = density.n_points;
  DensityLyapunov out;
  std::vector<double> logp(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double pi = density.values[size_t(i)];
    if (!(pi > 0.0))
      throw std::runtime_error("lyapunov_from_density: density not strictly positive");
    if (pi < 1e-300) {
      logp[size_t(i)] = std::log(1e-300);
      ++out.floored_points;
    } else {
      logp[size_t(i)] = std::log(pi);
    }
  }
  const double beta = density.params.beta;
  for (int i = 0; i < n; ++i) {
    const double x = density.node(i);
    out.direct += (beta - 3.0 * x * x) * density.values[size_t(i)] * density.dx;
  }
  const auto& psi = cached_jump_symbol(density.params.noise, density.halfwidth, n);
  Fft fft(n);
  std::vector<std::complex<double>> spec;
  std::vector<double> g_logp, g_p;
  fft.forward(logp, spec);
  for (int k = 0; k < n; ++k) spec[size_t(k)] *= std::sqrt(std::max(0.0, -psi[size_t(k)]));
  fft.inverse(spec, g_logp);
  fft.forward(density.values, spec);
  for (int k = 0; k < n; ++k) spec[size_t(k)] *= std::sqrt(std::max(0.0, -psi[size_t(k)]));
  fft.inverse(spec, g_p);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += g_logp[size_t(i)] * g_p[size_t(i)] * density.dx;
  out.dirichlet = -acc;
  return out;
}

double second_moment_bound(double beta, double sigma, double alpha) {
  const double k = 2.0 * levy_intensity_constant(alpha) * sigma * sigma / (2.0 - alpha);
  const auto cost = [&](double lambda) {
    const double s = lambda + 2.0 * beta;
    return (s * s / 8.0 + k) / lambda;
  };
  const double lambda_star = golden_minimize(cost, 1e-6, 1e3, 1e-12);
  return cost(lambda_star);
}

}  // namespace pitchfork
