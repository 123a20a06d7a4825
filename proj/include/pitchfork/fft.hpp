#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pitchfork {

/// Thin RAII wrapper over FFTW complex transforms of a fixed size. Plan
/// creation is serialized internally (FFTW plans are not thread-safe to
/// build); separate instances may execute concurrently.
class Fft {
 public:
  explicit Fft(int n);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  int size() const { return n_; }

  /// DFT of a real signal.
  void forward(std::span<const double> input, std::vector<std::complex<double>>& spectrum);

  /// Inverse DFT, returning the real part scaled by 1/n.
  void inverse(std::span<const std::complex<double>> spectrum, std::vector<double>& output);

 private:
  int n_;
  void* in_;
  void* out_;
  void* plan_fwd_;
  void* plan_bwd_;
};

}  // namespace pitchfork
