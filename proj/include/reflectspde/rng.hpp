#pragma once

// Counter-based random numbers: Philox4x32-10 (Salmon et al., SC'11). Every
// draw is a pure function of (seed, stream, a, b, c), so streams can be split
// by path, step and mode without sharing generator state between threads.

#include <array>
#include <cstdint>
#include <span>

namespace rspde {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key);

enum class Stream : std::uint32_t {
  Brownian = 0,
  Sampler = 1,
  TestPaths = 2,
};

class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, Stream stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(static_cast<std::uint32_t>(stream)) {}

  // Two uniforms in (0, 1] from one Philox block.
  std::array<double, 2> uniform2(std::uint32_t a, std::uint32_t b, std::uint32_t c) const;

  // Two independent standard normals (Box–Muller on one block).
  std::array<double, 2> normal2(std::uint32_t a, std::uint32_t b, std::uint32_t c) const;

  // out[m] = N(0,1) draw keyed on (a, b, m).
  void normals(std::uint32_t a, std::uint32_t b, std::span<double> out) const;

 private:
  Philox4x32Key key_;
  std::uint32_t stream_;
};

}  // namespace rspde
