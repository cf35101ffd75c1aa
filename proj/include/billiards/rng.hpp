#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace billiards {

/// Philox4x64-10 block function (Salmon et al., Random123).
inline std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr, std::array<std::uint64_t, 2> key) {
  constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL, kMul1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL, kWeyl1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    const unsigned __int128 p0 = static_cast<unsigned __int128>(ctr[0]) * kMul0;
    const unsigned __int128 p1 = static_cast<unsigned __int128>(ctr[2]) * kMul1;
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64), lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64), lo1 = static_cast<std::uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Counter-based random stream addressed by (seed, stream, index).
///
/// Every Monte Carlo sample owns the stream at its own index, so the numbers
/// it consumes do not depend on how samples are split across workers.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : key_{seed, 0x243F6A8885A308D3ULL}, ctr_{0, index, stream, 0} {}

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      buf_ = philox4x64(ctr_, key_);
      ++ctr_[0];
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1).
  double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    const double u1 = uniform_open(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_;
  std::array<std::uint64_t, 4> buf_{};
  int pos_ = 4;
};

/// Stream identifiers keep independent consumers of one seed apart.
namespace streams {
inline constexpr std::uint64_t boundary_sampler = 1;
inline constexpr std::uint64_t uniform_fiber = 2;
inline constexpr std::uint64_t pilot = 3;
inline constexpr std::uint64_t domain_points = 4;
inline constexpr std::uint64_t boxes = 5;
inline constexpr std::uint64_t starters = 6;
inline constexpr std::uint64_t validation = 7;
}  // namespace streams

}  // namespace billiards
