#include "pitchfork/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace pitchfork {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("Fft: size must be at least 2");
  std::lock_guard<std::mutex> lock(plan_mutex());
  in_ = fftw_alloc_complex(size_t(n));
  out_ = fftw_alloc_complex(size_t(n));
  plan_fwd_ = fftw_plan_dft_1d(n, static_cast<fftw_complex*>(in_),
                               static_cast<fftw_complex*>(out_), FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_1d(n, static_cast<fftw_complex*>(in_),
                               static_cast<fftw_complex*>(out_), FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(in_);
  fftw_free(out_);
}

void Fft::forward(std::span<const double> input, std::vector<std::complex<double>>& spectrum) {
  if (int(input.size()) != n_) throw std::invalid_argument("Fft::forward: size mismatch");
  auto* in = static_cast<fftw_complex*>(in_);
  auto* out = static_cast<fftw_complex*>(out_);
  for (int i = 0; i < n_; ++i) {
    in[i][0] = input[size_t(i)];
    in[i][1] = 0.0;
  }
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  spectrum.resize(size_t(n_));
  for (int i = 0; i < n_; ++i) spectrum[size_t(i)] = {out[i][0], out[i][1]};
}

void Fft::inverse(std::span<const std::complex<double>> spectrum, std::vector<double>& output) {
  if (int(spectrum.size()) != n_) throw std::invalid_argument("Fft::inverse: size mismatch");
  auto* in = static_cast<fftw_complex*>(in_);
  auto* out = static_cast<fftw_complex*>(out_);
  for (int i = 0; i < n_; ++i) {
    in[i][0] = spectrum[size_t(i)].real();
    in[i][1] = spectrum[size_t(i)].imag();
  }
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  output.resize(size_t(n_));
  const double scale = 1.0 / double(n_);
  for (int i = 0; i < n_; ++i) output[size_t(i)] = out[i][0] * scale;
}

}  // namespace pitchfork
