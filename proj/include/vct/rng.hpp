#pragma once

#include <array>
#include <cmath>
#include <cstdint>

// Counter-based random streams. Every stream is addressed by
// (master seed, participant id, purpose), so any participant's noise
// sequence can be regenerated in isolation and the schedule of worker
// threads cannot change what anyone draws.

namespace vct {

enum class StreamPurpose : std::uint32_t {
  Sampling = 0,
  ProcessNoise = 1,
  MeasurementNoise = 2,
  Protocol = 3,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

} // namespace detail

// Philox 4x32, 10 rounds (Salmon et al.). Pure integer function of
// counter and key; no state beyond the caller's counter.
struct Philox4x32 {
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> c,
                                            std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{kM0} * c[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * c[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
      k[0] += kW0;
      k[1] += kW1;
    }
    return c;
  }
};

// One independent stream of uniforms/normals. Cheap to construct; holds
// only a block counter plus a small output buffer.
class NoiseStream {
public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t participant_id,
              StreamPurpose purpose)
      : pid_lo_(static_cast<std::uint32_t>(participant_id)),
        pid_hi_(static_cast<std::uint32_t>(participant_id >> 32) ^
                (static_cast<std::uint32_t>(purpose) << 28)) {
    const std::uint64_t k = detail::splitmix64(master_seed);
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  }

  std::uint64_t next_u64() {
    if (word_pos_ >= 4) refill();
    const std::uint64_t lo = buf_[word_pos_];
    const std::uint64_t hi = buf_[word_pos_ + 1];
    word_pos_ += 2;
    return lo | (hi << 32);
  }

  // strictly inside (0,1): bin midpoints of a 2^53 grid
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  // N(0,1) via Box-Muller; second value of each pair is cached
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // unbiased integer in [0, n) by rejection on the top of the 64-bit range
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = n * (~0ULL / n);
    for (;;) {
      const std::uint64_t v = next_u64();
      if (v < limit) return v % n;
    }
  }

private:
  void refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
        pid_lo_, pid_hi_};
    buf_ = Philox4x32::block(ctr, key_);
    ++block_;
    word_pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_{};
  std::uint32_t pid_lo_ = 0;
  std::uint32_t pid_hi_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int word_pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

} // namespace vct
