#pragma once

// Pseudo-spectral transform between packed real coefficients and an
// equispaced physical grid with N = 2·(2K+1) points per dimension. N > 4K, so
// products of up to three band-limited fields project back onto the retained
// modes without aliasing.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "reflectspde/hilbert.hpp"

namespace rspde {

class SpectralGrid {
 public:
  explicit SpectralGrid(const SpaceSpec& space);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int points_per_dim() const { return n_; }
  std::size_t points() const { return npoints_; }
  // Quadrature weight of a single grid point, (2π/N)^d.
  double cell_volume() const { return cell_; }

  // Values of component `comp` at the grid points (row-major, last axis fastest).
  void to_physical(std::span<const double> coeffs, int comp,
                   std::span<double> out) const;
  std::vector<double> to_physical(std::span<const double> coeffs, int comp) const;

  // Discrete projection of grid values onto the retained modes of `comp`;
  // entries of other components are left untouched.
  void from_physical(std::span<const double> values, int comp,
                     std::span<double> coeffs) const;

  double integrate(std::span<const double> values) const;

  // Coefficients of ∂f/∂x_axis; purely spectral, no grid round trip.
  void derivative(std::span<const double> coeffs, int axis,
                  std::span<double> out) const;

  // Physical coordinate of grid point `idx` along `axis`.
  double coordinate(std::size_t idx, int axis) const;

 private:
  struct Slot {
    std::size_t index;      // position in the half-complex array
    std::size_t mirror;     // conjugate position on the k_last = 0 plane, or npos
    int component;
    BasisKind kind;
  };

  const SpaceSpec& space_;
  int dim_;
  int n_;
  std::size_t npoints_;
  std::size_t nfreq_;
  double cell_;
  double to_phys_scale_;
  double from_phys_scale_;
  std::vector<Slot> slots_;
  void* plan_c2r_ = nullptr;
  void* plan_r2c_ = nullptr;
};

}  // namespace rspde
