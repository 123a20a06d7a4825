#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pitchfork/sde.hpp"

namespace pitchfork {

struct DensityGridSpec {
  double halfwidth = 8.0;  // domain [-L, L]
  int n_points = 4096;     // power of two
};

/// Discretization of the jump operator.
///
/// SpectralMultiplier diagonalizes the jumps in Fourier space: fast and
/// spectrally accurate, but truncated-mode tails that decay below the FFT
/// roundoff floor (about 1e-15 relative to the bulk) come out as noise of
/// either sign there.
///
/// PositiveKernel (truncated mode only) assembles the band jump kernel by
/// cell quadrature plus a sub-cell diffusion surrogate; every update is a sum
/// of nonnegative terms, so the computed density is strictly positive down to
/// the smallest representable magnitudes.
enum class DensityMethod { SpectralMultiplier, PositiveKernel };

struct DensitySolverOptions {
  double residual_tol = 1e-8;  // on the L1 norm of the stationary operator applied to p
  int max_cycles = 120;
  int taus_per_cycle = 14;
  double tau_max = 4.0;
  DensityMethod method = DensityMethod::SpectralMultiplier;
};

struct DensityDiagnostics {
  std::vector<double> residual_history;  // one entry per pseudo-time cycle
  int iterations = 0;
  bool converged = false;
  double max_mass_drift = 0.0;  // worst |mass - 1| seen before renormalization
};

/// Stationary density on [-L, L], sampled at cell centers
/// x_i = -L + (i + 1/2) dx. Carries the model it was solved for.
struct DensityGrid {
  double halfwidth = 0.0;
  int n_points = 0;
  double dx = 0.0;
  std::vector<double> values;
  ModelParams params;
  DensityDiagnostics diagnostics;

  double node(int i) const { return -halfwidth + (double(i) + 0.5) * dx; }
};

/// Fractional Laplacian (-Delta)^{alpha/2} f on the periodic extension of the
/// grid, via the Fourier multiplier |u|^alpha. Length must be a power of two.
std::vector<double> fractional_laplacian(std::span<const double> values, double alpha,
                                         double halfwidth);

/// Fourier symbol of the sigma-scaled jump generator on the grid frequencies
/// (nonpositive, zero at frequency zero). The non-truncated symbol is
/// -|sigma u|^alpha; the truncated one is the band-limited integral
/// 2 c_alpha int_0^1 (cos(sigma u z) - 1) z^{-1-alpha} dz, evaluated per
/// frequency by series plus adaptive quadrature to 1e-10.
std::vector<double> jump_symbol(const NoiseConfig& config, double halfwidth, int n_points);

/// Solves the stationary forward equation 0 = -(b p)' + J p by pseudo-time
/// relaxation: approximate-factorization implicit steps (upwind drift solved
/// tridiagonally, jump part solved in Fourier space) whose fixed point is the
/// exact discrete steady state. Cycles a geometric ladder of step sizes until
/// the L1 residual drops below the tolerance. Throws SolverError with the
/// residual history if the cycle cap is reached.
DensityGrid stationary_density(const ModelParams& params, const DensityGridSpec& spec,
                               const DensitySolverOptions& opts = {});

/// Default-grid solve; for non-truncated noise the domain is doubled until the
/// direct Lyapunov functional changes by less than 1%.
DensityGrid stationary_density_auto(const ModelParams& params);

/// Grid moment: sum of x^order p(x) dx.
double density_moment(const DensityGrid& density, int order);

struct DensityLyapunov {
  double direct = 0.0;     // integral of (beta - 3x^2) p dx
  double dirichlet = 0.0;  // -integral of filtered(ln p) * filtered(p) dx with
                           // the half-order multiplier sqrt(-symbol)
  int floored_points = 0;  // nodes clamped before the logarithm; must be 0 on
                           // a converged run
};

/// Both Lyapunov-exponent routes evaluated from a strictly positive density.
DensityLyapunov lyapunov_from_density(const DensityGrid& density);

/// Upper bound on the stationary second moment in the truncated regime:
/// min over lambda > 0 of (1/lambda) [ (lambda + 2 beta)^2 / 8
///                                     + 2 c_alpha sigma^2 / (2 - alpha) ].
double second_moment_bound(double beta, double sigma, double alpha);

}  // namespace pitchfork
