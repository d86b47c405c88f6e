#pragma once

#include <cmath>
#include <cstdint>

namespace amoment {

// SplitMix64 finalizer; full-period bijection on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// Derives an independent seed from (seed, tag, index). Used to give every
// center, neighbor and study cell its own stream so that parallel sampling
// is reproducible regardless of thread count.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t index = 0) noexcept {
  return mix64(seed ^ mix64(tag * kGolden + 0x632be59bd9b4e019ULL) ^
               mix64(index + 0x9e6c63d0876a9a47ULL));
}

// Counter-based generator: output i is mix64(key + i*golden). Stateless per
// call, so a stream can be replayed or split at any counter value.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed + kGolden * (stream + 1))) {}

  std::uint64_t next_u64() { return mix64(key_ + (counter_++) * kGolden); }

  // Uniform on [0,1), 53-bit resolution.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0,1]; safe as a log() argument.
  double next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the sine partner is cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit_open();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, bound) by rejection from the top of the range.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % bound;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream tags; keep distinct so sub-streams never collide.
namespace stream_tag {
constexpr std::uint64_t center = 0x01;
constexpr std::uint64_t ball_choice = 0x02;
constexpr std::uint64_t neighbor = 0x03;
constexpr std::uint64_t exact_point = 0x04;
constexpr std::uint64_t ball_mass = 0x05;
constexpr std::uint64_t study_cell = 0x06;
constexpr std::uint64_t probe = 0x07;
constexpr std::uint64_t replication = 0x08;
}  // namespace stream_tag

}  // namespace amoment
