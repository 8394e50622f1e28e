#pragma once

#include <cmath>
#include <random>

#include "reflectspde/hilbert.hpp"
#include "reflectspde/models.hpp"

namespace testutil {

// Gaussian coefficients scaled to H-norm `radius`; std RNG, not the library's.
inline rspde::SpectralField random_field(const rspde::SpacePtr& space, std::mt19937_64& gen,
                                         double radius) {
  std::normal_distribution<double> nd;
  rspde::SpectralField f(space);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = nd(gen) / std::sqrt(space->h_weights()[i]);
  const double r = rspde::norm_h(f);
  return r > 0 ? f * (radius / r) : f;
}

inline rspde::SpacePtr line_space() { return rspde::SpaceSpec::euclidean(1); }

// A = 0, B = 0 on `space`.
inline rspde::ModelSpec still_model(const rspde::SpacePtr& space) {
  rspde::ModelSpec m;
  m.name = "still";
  m.space = space;
  return m;
}

inline rspde::NoiseSpec ac_noise(const rspde::SpaceSpec& space, std::size_t K, double lambda = 0.0) {
  return rspde::NoiseSpec::with_decay(space, K, 0.01, 1.0, 1.0, lambda);
}

// Physical values of sin(k x) or cos(k x) as a 1-D field.
inline rspde::SpectralField trig(const rspde::SpacePtr& space, int k, bool sine, double amp = 1.0) {
  // unit basis elements are sqrt(2/2pi) cos(kx); the constant is 1/sqrt(2pi)
  const double s = k == 0 ? std::sqrt(2.0 * M_PI) : std::sqrt(M_PI);
  rspde::SpectralField f = sine ? rspde::sine_mode(space, k) : rspde::cosine_mode(space, k);
  return f * (amp * s);
}

}  // namespace testutil
