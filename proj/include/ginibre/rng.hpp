#pragma once

// Counter-based random numbers. Every Gaussian variate is a pure function of
// (seed, shard, sample index, entry index), so sharded Monte-Carlo runs are
// reproducible regardless of thread scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ginibre {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Standard normal variates for one (seed, shard, sample) triple, indexed by
/// entry. Entries 2j and 2j+1 come from one Philox block via Box-Muller.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint32_t shard, std::uint64_t sample)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        shard_(shard),
        sample_(sample) {}

  /// Variate number `entry` of this stream; independent of call order.
  double at(std::uint64_t entry) const {
    const auto pair = gaussian_pair(entry >> 1);
    return (entry & 1u) ? pair[1] : pair[0];
  }

  /// Next variate in entry order.
  double operator()() {
    if (next_ & 1u) {
      ++next_;
      return cached_;
    }
    const auto pair = gaussian_pair(next_ >> 1);
    cached_ = pair[1];
    ++next_;
    return pair[0];
  }

  std::uint64_t position() const { return next_; }

 private:
  std::array<double, 2> gaussian_pair(std::uint64_t block) const {
    const PhiloxCounter ctr{static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(sample_),
                            static_cast<std::uint32_t>(sample_ >> 32), shard_};
    const auto r = philox4x32_10(ctr, key_);
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    // u1 in (0, 1], u2 in [0, 1)
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  PhiloxKey key_;
  std::uint32_t shard_;
  std::uint64_t sample_;
  std::uint64_t next_ = 0;
  double cached_ = 0.0;
};

}  // namespace ginibre
