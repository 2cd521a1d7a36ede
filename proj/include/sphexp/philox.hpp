// sphexp/philox.hpp
//
// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
#ifndef SPHEXP_PHILOX_HPP
#define SPHEXP_PHILOX_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace sphexp {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

constexpr PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
    const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
    const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
    const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

/// Uniform double in (0, 1] from the top 53 bits of a 64-bit word.
inline double unit_open_closed(std::uint64_t bits) noexcept {
  return double((bits >> 11) + 1) * 0x1.0p-53;
}

/// One Philox block turned into a standard complex normal (E|z|^2 = 1)
/// by Box-Muller.
inline std::array<double, 2> philox_complex_normal(const PhiloxCounter& ctr, const PhiloxKey& key) {
  const auto out = philox4x32_10(ctr, key);
  const std::uint64_t w0 = (std::uint64_t(out[0]) << 32) | out[1];
  const std::uint64_t w1 = (std::uint64_t(out[2]) << 32) | out[3];
  const double radius = std::sqrt(-std::log(unit_open_closed(w0)));
  const double angle = 2.0 * std::numbers::pi * unit_open_closed(w1);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace sphexp

#endif  // SPHEXP_PHILOX_HPP
