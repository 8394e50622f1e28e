#include "reflectspde/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

namespace rspde {

namespace {

// FFTW's planner is not re-entrant; execution on fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

}  // namespace

SpectralGrid::SpectralGrid(const SpaceSpec& space)
    : space_(space), dim_(space.dimension()), n_(2 * (2 * space.modes() + 1)) {
  npoints_ = 1;
  for (int d = 0; d < dim_; ++d) npoints_ *= static_cast<std::size_t>(n_);
  nfreq_ = npoints_ / static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_ / 2 + 1);
  const double two_pi = 2.0 * std::numbers::pi;
  cell_ = std::pow(two_pi / n_, dim_);
  const double vol = space.volume();
  to_phys_scale_ = 1.0 / std::sqrt(vol);
  from_phys_scale_ = std::sqrt(vol) / static_cast<double>(npoints_);

  auto flat = [&](const std::array<int, 3>& k) {
    std::size_t idx = 0;
    for (int d = 0; d < dim_ - 1; ++d) {
      const int i = ((k[d] % n_) + n_) % n_;
      idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
    }
    return idx * static_cast<std::size_t>(n_ / 2 + 1) + static_cast<std::size_t>(k[dim_ - 1]);
  };

  slots_.reserve(space.size());
  for (const auto& e : space.basis()) {
    Slot s{flat(e.k), npos, e.component, e.kind};
    if (e.kind != BasisKind::Constant && e.k[dim_ - 1] == 0) {
      std::array<int, 3> neg{-e.k[0], -e.k[1], -e.k[2]};
      s.mirror = flat(neg);
    }
    slots_.push_back(s);
  }

  std::vector<int> dims(static_cast<std::size_t>(dim_), n_);
  std::lock_guard lock(planner_mutex());
  auto* cbuf = fftw_alloc_complex(nfreq_);
  auto* rbuf = fftw_alloc_real(npoints_);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plan_c2r_ = fftw_plan_dft_c2r(dim_, dims.data(), cbuf, rbuf, flags);
  plan_r2c_ = fftw_plan_dft_r2c(dim_, dims.data(), rbuf, cbuf, flags);
  fftw_free(cbuf);
  fftw_free(rbuf);
}

SpectralGrid::~SpectralGrid() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_c2r_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_r2c_));
}

void SpectralGrid::to_physical(std::span<const double> coeffs, int comp,
                               std::span<double> out) const {
  if (coeffs.size() != slots_.size() || out.size() != npoints_)
    throw DimensionError("to_physical: size mismatch");
  std::vector<std::complex<double>> buf(nfreq_);
  const double s = to_phys_scale_;
  const double r = s / std::numbers::sqrt2;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const Slot& sl = slots_[i];
    if (sl.component != comp) continue;
    const double c = coeffs[i];
    switch (sl.kind) {
      case BasisKind::Constant:
        buf[sl.index] += c * s;
        break;
      case BasisKind::Cosine:
        buf[sl.index] += c * r;
        if (sl.mirror != npos) buf[sl.mirror] += c * r;
        break;
      case BasisKind::Sine:
        buf[sl.index] += std::complex<double>(0.0, -c * r);
        if (sl.mirror != npos) buf[sl.mirror] += std::complex<double>(0.0, c * r);
        break;
    }
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_c2r_),
                       reinterpret_cast<fftw_complex*>(buf.data()), out.data());
}

std::vector<double> SpectralGrid::to_physical(std::span<const double> coeffs,
                                              int comp) const {
  std::vector<double> out(npoints_);
  to_physical(coeffs, comp, out);
  return out;
}

void SpectralGrid::from_physical(std::span<const double> values, int comp,
                                 std::span<double> coeffs) const {
  if (coeffs.size() != slots_.size() || values.size() != npoints_)
    throw DimensionError("from_physical: size mismatch");
  std::vector<double> in(values.begin(), values.end());
  std::vector<std::complex<double>> buf(nfreq_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_r2c_), in.data(),
                       reinterpret_cast<fftw_complex*>(buf.data()));
  const double s = from_phys_scale_;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const Slot& sl = slots_[i];
    if (sl.component != comp) continue;
    const std::complex<double> u = buf[sl.index] * s;
    switch (sl.kind) {
      case BasisKind::Constant:
        coeffs[i] = u.real();
        break;
      case BasisKind::Cosine:
        coeffs[i] = std::numbers::sqrt2 * u.real();
        break;
      case BasisKind::Sine:
        coeffs[i] = -std::numbers::sqrt2 * u.imag();
        break;
    }
  }
}

double SpectralGrid::integrate(std::span<const double> values) const {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * cell_;
}

void SpectralGrid::derivative(std::span<const double> coeffs, int axis,
                              std::span<double> out) const {
  if (coeffs.size() != slots_.size() || out.size() != slots_.size())
    throw DimensionError("derivative: size mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const auto& basis = space_.basis();
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    const auto& e = basis[i];
    const double ka = e.k[axis];
    if (e.kind == BasisKind::Cosine) {
      out[space_.partner(i)] -= ka * coeffs[i];
    } else if (e.kind == BasisKind::Sine) {
      out[space_.partner(i)] += ka * coeffs[i];
    }
  }
}

double SpectralGrid::coordinate(std::size_t idx, int axis) const {
  std::size_t rem = idx;
  int i = 0;
  for (int d = dim_ - 1; d >= 0; --d) {
    const auto q = static_cast<std::size_t>(n_);
    if (d == axis) i = static_cast<int>(rem % q);
    rem /= q;
  }
  return 2.0 * std::numbers::pi * i / n_;
}

}  // namespace rspde
