#include "reflectspde/tamednse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "reflectspde/grid.hpp"

namespace rspde::tamed {

void TamedSpec::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ConfigError("tamed_nse: nu must be > 0");
  if (!(taming_n > 0.0) || !std::isfinite(taming_n))
    throw ConfigError("tamed_nse: taming_n must be > 0");
  if (modes < kMinModes)
    throw ConfigError("tamed_nse: needs modes >= " + std::to_string(kMinModes) +
                      " per dimension, got " + std::to_string(modes));
}

SpacePtr h1_space(int modes) {
  TorusOptions o;
  o.dimension = 3;
  o.components = 3;
  o.modes = modes;
  o.zero_mean = true;
  o.h = Sobolev::H1;
  o.v = Sobolev::H2;
  o.alpha = 2.0;
  return SpaceSpec::torus(o);
}

namespace {

void require_velocity_space(const SpaceSpec& s) {
  if (s.dimension() != 3 || s.components() != 3 || !s.zero_mean())
    throw DimensionError("expected a zero-mean 3-component field on the 3-torus");
}

// Calls fn(first index) for every (k, kind) triple of consecutive components.
template <class Fn>
void for_each_triple(const SpaceSpec& s, Fn&& fn) {
  const auto& b = s.basis();
  for (std::size_t i = 0; i + 2 < b.size(); i += 3) fn(i, b[i].k, b[i].k2);
}

}  // namespace

SpectralField leray_project(const SpectralField& f) {
  require_velocity_space(f.space());
  SpectralField out = f;
  for_each_triple(f.space(), [&](std::size_t i, const std::array<int, 3>& k, int k2) {
    const double kd = k[0] * out[i] + k[1] * out[i + 1] + k[2] * out[i + 2];
    const double s = kd / k2;
    for (int c = 0; c < 3; ++c) out[i + static_cast<std::size_t>(c)] -= k[c] * s;
  });
  return out;
}

std::array<std::complex<double>, 3> fourier_coefficient(const SpectralField& u,
                                                        std::array<int, 3> k) {
  const SpaceSpec& s = u.space();
  require_velocity_space(s);
  std::array<std::complex<double>, 3> out{};
  bool conj = false;
  std::size_t ic = s.find(k, 0, BasisKind::Cosine);
  if (ic == s.size()) {
    ic = s.find({-k[0], -k[1], -k[2]}, 0, BasisKind::Cosine);
    if (ic == s.size()) return out;
    conj = true;
  }
  const std::size_t is = s.partner(ic);
  for (std::size_t c = 0; c < 3; ++c) {
    const std::complex<double> z(u[ic + c] / std::numbers::sqrt2,
                                 -u[is + c] / std::numbers::sqrt2);
    out[c] = conj ? std::conj(z) : z;
  }
  return out;
}

double divergence_residual(const SpectralField& u) {
  require_velocity_space(u.space());
  double worst = 0.0;
  for_each_triple(u.space(), [&](std::size_t i, const std::array<int, 3>& k, int) {
    worst = std::max(worst, std::abs(k[0] * u[i] + k[1] * u[i + 1] + k[2] * u[i + 2]));
  });
  return worst;
}

double taming_g(double r, const TamedSpec& spec) {
  if (r < 0.0) throw std::domain_error("taming function needs r >= 0");
  const double s = r - spec.taming_n;
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return s / spec.nu;
  return (-s * s * s + 2.0 * s * s) / spec.nu;
}

double taming_g_prime(double r, const TamedSpec& spec) {
  if (r < 0.0) throw std::domain_error("taming function needs r >= 0");
  const double s = r - spec.taming_n;
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0 / spec.nu;
  return (-3.0 * s * s + 4.0 * s) / spec.nu;
}

namespace {

using Components = std::array<std::vector<double>, 3>;

Components velocity_on_grid(const SpectralField& u) {
  const SpectralGrid& g = *u.space().grid();
  Components v;
  for (int c = 0; c < 3; ++c) v[static_cast<std::size_t>(c)] = g.to_physical(u.coeffs(), c);
  return v;
}

SpectralField from_components(const SpectralField& like, const Components& w) {
  const SpectralGrid& g = *like.space().grid();
  SpectralField out(like.space_ptr());
  for (int c = 0; c < 3; ++c) g.from_physical(w[static_cast<std::size_t>(c)], c, out.coeffs());
  return out;
}

}  // namespace

SpectralField convection(const SpectralField& u) {
  require_velocity_space(u.space());
  const SpectralGrid& g = *u.space().grid();
  const Components v = velocity_on_grid(u);
  Components w;
  for (auto& x : w) x.assign(g.points(), 0.0);
  std::vector<double> du(u.size());
  std::vector<double> vals(g.points());
  for (int j = 0; j < 3; ++j) {
    g.derivative(u.coeffs(), j, du);
    const auto& uj = v[static_cast<std::size_t>(j)];
    for (int c = 0; c < 3; ++c) {
      g.to_physical(du, c, vals);
      auto& wc = w[static_cast<std::size_t>(c)];
      for (std::size_t p = 0; p < vals.size(); ++p) wc[p] += uj[p] * vals[p];
    }
  }
  return leray_project(from_components(u, w));
}

SpectralField taming_term(const SpectralField& u, const TamedSpec& spec) {
  require_velocity_space(u.space());
  Components v = velocity_on_grid(u);
  const std::size_t np = v[0].size();
  for (std::size_t p = 0; p < np; ++p) {
    const double r = v[0][p] * v[0][p] + v[1][p] * v[1][p] + v[2][p] * v[2][p];
    const double gr = taming_g(r, spec);
    for (auto& x : v) x[p] *= gr;
  }
  return leray_project(from_components(u, v));
}

SpectralField tamed_drift(const SpectralField& u, const TamedSpec& spec) {
  spec.validate();
  if (u.space().modes() < kMinModes)
    throw ConfigError("tamed_nse: field resolution below " + std::to_string(kMinModes) + " modes");
  SpectralField out = convection(u);
  out += taming_term(u, spec);
  out *= -1.0;
  const auto& b = u.space().basis();
  for (std::size_t i = 0; i < u.size(); ++i) out[i] -= spec.nu * b[i].k2 * u[i];
  return out;
}

double max_pointwise_speed2(const SpectralField& u) {
  require_velocity_space(u.space());
  const Components v = velocity_on_grid(u);
  double m = 0.0;
  for (std::size_t p = 0; p < v[0].size(); ++p)
    m = std::max(m, v[0][p] * v[0][p] + v[1][p] * v[1][p] + v[2][p] * v[2][p]);
  return m;
}

NoiseSpec lowest_shell_noise(const SpaceSpec& space, double amplitude) {
  std::size_t K = 0;
  while (K < space.size() && space.basis()[K].k2 == 1) ++K;
  NoiseSpec n;
  n.q.assign(K, 1.0);
  n.mu = amplitude;
  n.lambda = 0.0;
  return n;
}

ModelSpec tamed_model(const TamedSpec& spec, const NoiseSpec& noise) {
  spec.validate();
  ModelSpec m;
  m.name = "tamed_nse";
  m.space = h1_space(spec.modes);
  noise.validate(*m.space);
  m.linear.resize(m.space->size());
  for (std::size_t i = 0; i < m.linear.size(); ++i)
    m.linear[i] = -spec.nu * m.space->basis()[i].k2;
  m.nonlinear = [spec](double, const SpectralField& u) {
    SpectralField out = convection(u);
    out += taming_term(u, spec);
    out *= -1.0;
    return out;
  };
  m.noise_params = noise;
  m.noise_modes = noise.modes();
  m.noise = [noise](double, const SpectralField& u, std::span<const double> dW) {
    return leray_project(apply_noise(noise, u, dW));
  };
  m.constrain = [](const SpectralField& u) { return leray_project(u); };
  m.alpha = 2.0;
  m.beta = 6.0;
  m.gamma = 4.0;
  m.c = spec.nu / 2.0;
  // Only the noise bounds are known in closed form; the coercivity and
  // monotonicity constants are estimated by the audits.
  m.c0 = std::max({1.0, noise_lipschitz2(noise, *m.space), noise_hs_bound(noise, *m.space)});
  m.growth_c = 1.0;
  auto weight = [](const SpectralField& u) {
    const double v = norm_v(u);
    const double h = norm_h(u);
    return v * v + h * h * h * h;
  };
  m.rho = weight;
  m.eta = weight;
  m.validate();
  return m;
}

}  // namespace rspde::tamed
