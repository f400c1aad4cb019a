#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sojourn {

/// Philox4x32-10 (Salmon et al., SC'11). Counter-based: block(ctr, key) is a
/// pure function, so any replicate's stream can be generated independently.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Standard normal pairs for (master_seed, replicate, index): the key is the
/// seed, the counter is (replicate, index). Box–Muller on two 53-bit uniforms
/// in the open interval (0, 1).
inline std::array<double, 2> normal_pair(std::uint64_t master_seed, std::uint64_t replicate,
                                         std::uint64_t index) {
  const Philox4x32::Key key{static_cast<std::uint32_t>(master_seed),
                            static_cast<std::uint32_t>(master_seed >> 32)};
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(replicate),
                                static_cast<std::uint32_t>(replicate >> 32),
                                static_cast<std::uint32_t>(index),
                                static_cast<std::uint32_t>(index >> 32)};
  const auto r = Philox4x32::block(ctr, key);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  auto uniform = [](std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * kScale;
  };
  const double u1 = uniform(r[0], r[1]);
  const double u2 = uniform(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace sojourn
