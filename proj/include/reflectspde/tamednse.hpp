#pragma once

// Tamed 3D Navier–Stokes on the periodic torus at toy spectral resolution:
// divergence-free, zero-mean velocity fields reflected in the unit ball of ℍ¹.

#include <array>
#include <complex>

#include "reflectspde/hilbert.hpp"
#include "reflectspde/models.hpp"

namespace rspde::tamed {

struct TamedSpec {
  double nu = 1.0;
  double taming_n = 1.0;
  int modes = 4;

  void validate() const;
};

// Velocity fields are SpectralFields over h1_space(): three components per
// retained wavevector, conjugate symmetry implicit in the real packing.
using VelocityField3D = SpectralField;

constexpr int kMinModes = 4;

// ℍ¹ pivot (weights 1+|k|²), V = ℍ² (weights (1+|k|²)²), α = 2.
SpacePtr h1_space(int modes);

// û_k ← û_k − k (k·û_k)/|k|² on every retained wavevector.
SpectralField leray_project(const SpectralField& f);

// Complex Fourier coefficient û_k ∈ ℂ³ (û_{−k} = conj(û_k); zero if k is not
// retained).
std::array<std::complex<double>, 3> fourier_coefficient(const SpectralField& u,
                                                        std::array<int, 3> k);

// max_k |k·û_k|.
double divergence_residual(const SpectralField& u);

// Smooth taming g_N: zero on [0, N], (r − N)/ν on [N+1, ∞), C¹ cubic
// Hermite (−s³ + 2s²)/ν with s = r − N in between.
double taming_g(double r, const TamedSpec& spec);
double taming_g_prime(double r, const TamedSpec& spec);

// P((u·∇)u).
SpectralField convection(const SpectralField& u);
// P(g_N(|u|²) u).
SpectralField taming_term(const SpectralField& u, const TamedSpec& spec);
// νPΔu − P((u·∇)u) − P(g_N(|u|²)u).
SpectralField tamed_drift(const SpectralField& u, const TamedSpec& spec);

// Max over grid points of |u(x)|².
double max_pointwise_speed2(const SpectralField& u);

// Additive noise on the first noise.modes() basis entries (the lowest shell
// by default), Leray-projected.
ModelSpec tamed_model(const TamedSpec& spec, const NoiseSpec& noise);
NoiseSpec lowest_shell_noise(const SpaceSpec& space, double amplitude);

}  // namespace rspde::tamed
