#pragma once

#include <array>
#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace pitchfork {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Every draw is a pure function of (seed, stream, substream, position), so
// ensembles are reproducible under any parallel schedule and any window of a
// two-sided path can be regenerated without replaying the rest.

namespace detail {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = uint64_t(kPhiloxM0) * ctr[0];
    const uint64_t p1 = uint64_t(kPhiloxM1) * ctr[2];
    ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1),
           uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

}  // namespace detail

/// One logical random stream addressed by (seed, stream, substream).
/// `stream` is typically a path index and `substream` a (possibly negative)
/// time-step index, so increments of a two-sided path have stable identities.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream, int64_t substream = 0)
      : key_{uint32_t(seed), uint32_t(seed >> 32)},
        stream_(uint32_t(stream) ^ uint32_t(stream >> 32)),
        sub_lo_(uint32_t(uint64_t(substream))),
        sub_hi_(uint32_t(uint64_t(substream) >> 32)) {}

  uint32_t next_u32() {
    if (pos_ == 4) refill();
    return block_[pos_++];
  }

  uint64_t next_u64() {
    const uint64_t lo = next_u32();
    const uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform on the open interval (0, 1); never returns 0 or 1.
  double u01() { return (double(next_u32()) + 0.5) * 0x1p-32; }

  double exponential() { return -std::log(u01()); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(u01()));
    const double phi = 6.283185307179586476925286766559 * u01();
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  /// Exact Poisson draw (Knuth product method; halves recursively for large
  /// means so the acceptance threshold never underflows).
  uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 500.0) {
      const double half = 0.5 * mean;
      return poisson(half) + poisson(mean - half);
    }
    const double limit = std::exp(-mean);
    uint64_t k = 0;
    double prod = u01();
    while (prod > limit) {
      ++k;
      prod *= u01();
    }
    return k;
  }

 private:
  void refill() {
    block_ = detail::philox4x32({counter_, sub_lo_, sub_hi_, stream_}, key_);
    ++counter_;
    pos_ = 0;
  }

  std::array<uint32_t, 2> key_;
  uint32_t stream_;
  uint32_t sub_lo_, sub_hi_;
  uint32_t counter_ = 0;
  std::array<uint32_t, 4> block_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// Deterministically derives an independent 64-bit seed from (seed, index).
/// Used by parameter sweeps and by experiments needing several independent
/// ensembles under one user-facing seed.
inline uint64_t derive_seed(uint64_t seed, uint64_t index) {
  const auto b = detail::philox4x32(
      {uint32_t(index), uint32_t(index >> 32), 0x5EEDu, 0xD321u},
      {uint32_t(seed), uint32_t(seed >> 32)});
  return uint64_t(b[0]) | (uint64_t(b[1]) << 32);
}

}  // namespace pitchfork
