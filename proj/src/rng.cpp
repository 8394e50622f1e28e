#include "reflectspde/rng.hpp"

#include <cmath>
#include <numbers>

namespace rspde {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

}  // namespace

Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<double, 2> KeyedRng::uniform2(std::uint32_t a, std::uint32_t b,
                                         std::uint32_t c) const {
  const auto w = philox4x32_10({c, b, a, stream_}, key_);
  return {to_unit(w[0], w[1]), to_unit(w[2], w[3])};
}

std::array<double, 2> KeyedRng::normal2(std::uint32_t a, std::uint32_t b,
                                        std::uint32_t c) const {
  const auto [u1, u2] = uniform2(a, b, c);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double th = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

void KeyedRng::normals(std::uint32_t a, std::uint32_t b, std::span<double> out) const {
  const std::size_t n = out.size();
  for (std::size_t m = 0; m < n; m += 2) {
    const auto z = normal2(a, b, static_cast<std::uint32_t>(m / 2));
    out[m] = z[0];
    if (m + 1 < n) out[m + 1] = z[1];
  }
}

}  // namespace rspde
