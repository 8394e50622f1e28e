#include "reflectspde/models.hpp"

#include <algorithm>
#include <cmath>

#include "reflectspde/grid.hpp"

namespace rspde {

double NoiseSpec::max_q() const {
  double m = 0.0;
  for (double v : q) m = std::max(m, v);
  return m;
}

NoiseSpec NoiseSpec::with_decay(const SpaceSpec& space, std::size_t K, double scale,
                                double decay, double mu, double lambda) {
  if (K > space.size()) throw ConfigError("noise.K exceeds the number of retained modes");
  NoiseSpec s;
  s.mu = mu;
  s.lambda = lambda;
  s.q.resize(K);
  for (std::size_t k = 0; k < K; ++k)
    s.q[k] = scale * std::pow(1.0 + space.basis()[k].k2, -decay);
  return s;
}

void NoiseSpec::validate(const SpaceSpec& space) const {
  if (q.size() > space.size()) throw ConfigError("noise.K exceeds the number of retained modes");
  for (double v : q)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("noise q_k must be finite and >= 0");
  if (!std::isfinite(mu) || !std::isfinite(lambda))
    throw ConfigError("noise amplitudes must be finite");
}

double unit_clamp(double x) { return std::clamp(x, -1.0, 1.0); }

SpectralField apply_noise(const NoiseSpec& spec, const SpectralField& u,
                          std::span<const double> dW) {
  if (dW.size() != spec.modes())
    throw DimensionError("noise increment has length " + std::to_string(dW.size()) +
                         ", expected " + std::to_string(spec.modes()));
  if (spec.modes() > u.size()) throw DimensionError("noise modes exceed field size");
  SpectralField out(u.space_ptr());
  for (std::size_t k = 0; k < spec.modes(); ++k) {
    if (dW[k] == 0.0) continue;
    out[k] = std::sqrt(spec.q[k]) * (spec.mu + spec.lambda * unit_clamp(u[k])) * dW[k];
  }
  return out;
}

double noise_hs_bound(const NoiseSpec& spec, const SpaceSpec& space) {
  const double a = std::abs(spec.mu) + std::abs(spec.lambda);
  double acc = 0.0;
  for (std::size_t k = 0; k < spec.modes(); ++k) acc += spec.q[k] * a * a * space.h_weights()[k];
  return acc;
}

double noise_lipschitz2(const NoiseSpec& spec, const SpaceSpec& space) {
  double m = 0.0;
  for (std::size_t k = 0; k < spec.modes(); ++k) m = std::max(m, spec.q[k] * space.h_weights()[k]);
  return spec.lambda * spec.lambda * m;
}

SpectralField ModelSpec::drift(double t, const SpectralField& u) const {
  SpectralField a = nonlinear ? nonlinear(t, u) : SpectralField(u.space_ptr());
  for (std::size_t i = 0; i < linear.size(); ++i) a[i] += linear[i] * u[i];
  return a;
}

SpectralField ModelSpec::diffusion(double t, const SpectralField& u,
                                   std::span<const double> dW) const {
  if (!noise) return SpectralField(u.space_ptr());
  return noise(t, u, dW);
}

SpectralField ModelSpec::admissible(const SpectralField& u) const {
  return constrain ? constrain(u) : u;
}

void ModelSpec::validate() const {
  if (!space) throw ConfigError("model " + name + " has no space");
  if (!(alpha > 1.0)) throw ConfigError("model " + name + ": alpha must exceed 1");
  if (!(beta >= 0.0) || !(gamma >= 0.0))
    throw ConfigError("model " + name + ": beta and gamma must be >= 0");
  if (!(c > 0.0)) throw ConfigError("model " + name + ": c must be > 0");
  if (!(c0 >= 0.0)) throw ConfigError("model " + name + ": C0 must be >= 0");
  if (!linear.empty() && linear.size() != space->size())
    throw ConfigError("model " + name + ": linear part has wrong length");
  if (noise_params.modes() != noise_modes)
    throw ConfigError("model " + name + ": noise mode count mismatch");
  noise_params.validate(*space);
  if (noise_lipschitz2(noise_params, *space) > c0 * (1.0 + 1e-12))
    throw ConfigError("model " + name + ": lambda^2 max q exceeds C0");
}

double hs_dist2(const ModelSpec& m, const SpectralField& u, const SpectralField& v) {
  std::vector<double> dW(m.noise_modes, 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < m.noise_modes; ++k) {
    dW[k] = 1.0;
    SpectralField d = m.diffusion(0.0, u, dW) - m.diffusion(0.0, v, dW);
    const double r = norm_h(d);
    acc += r * r;
    dW[k] = 0.0;
  }
  return acc;
}

double hs_norm2(const ModelSpec& m, const SpectralField& u) {
  std::vector<double> dW(m.noise_modes, 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < m.noise_modes; ++k) {
    dW[k] = 1.0;
    const double r = norm_h(m.diffusion(0.0, u, dW));
    acc += r * r;
    dW[k] = 0.0;
  }
  return acc;
}

namespace {

const SpectralGrid& scalar_grid(const SpectralField& u, const char* what) {
  const SpaceSpec& s = u.space();
  if (s.grid() == nullptr || s.components() != 1)
    throw ConfigError(std::string(what) + " needs a scalar torus space");
  if (s.grid()->points_per_dim() <= 4 * s.modes())
    throw ConfigError(std::string(what) + ": grid too coarse for alias-free cubic terms");
  return *s.grid();
}

SpectralField cubic_term(const SpectralField& u) {
  const SpectralGrid& g = scalar_grid(u, "cubic term");
  std::vector<double> vals = g.to_physical(u.coeffs(), 0);
  for (double& v : vals) v = v * v * v;
  SpectralField out(u.space_ptr());
  g.from_physical(vals, 0, out.coeffs());
  return out;
}

std::vector<double> laplacian_symbol(const SpaceSpec& s, double scale) {
  std::vector<double> l(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) l[i] = -scale * s.basis()[i].k2;
  return l;
}

}  // namespace

SpectralField allen_cahn_drift(const SpectralField& u) {
  SpectralField out = u - cubic_term(u);
  for (std::size_t i = 0; i < u.size(); ++i) out[i] -= u.space().basis()[i].k2 * u[i];
  return out;
}

SpectralField p_laplacian_drift(const SpectralField& u, double p) {
  if (!(p >= 2.0)) throw ConfigError("p-Laplacian needs p >= 2");
  const SpectralGrid& g = scalar_grid(u, "p-Laplacian");
  const SpaceSpec& s = u.space();
  const int dim = s.dimension();
  std::vector<std::vector<double>> grad(static_cast<std::size_t>(dim));
  std::vector<double> dcoef(u.size());
  for (int a = 0; a < dim; ++a) {
    g.derivative(u.coeffs(), a, dcoef);
    grad[static_cast<std::size_t>(a)] = g.to_physical(dcoef, 0);
  }
  std::vector<double> weight(g.points());
  for (std::size_t j = 0; j < g.points(); ++j) {
    double n2 = 0.0;
    for (const auto& ga : grad) n2 += ga[j] * ga[j];
    weight[j] = p == 2.0 ? 1.0 : std::pow(n2, 0.5 * (p - 2.0));
  }
  SpectralField out(u.space_ptr());
  std::vector<double> flux_coef(u.size());
  for (int a = 0; a < dim; ++a) {
    auto& ga = grad[static_cast<std::size_t>(a)];
    for (std::size_t j = 0; j < ga.size(); ++j) ga[j] *= weight[j];
    g.from_physical(ga, 0, flux_coef);
    g.derivative(flux_coef, a, dcoef);
    for (std::size_t i = 0; i < u.size(); ++i) out[i] += dcoef[i];
  }
  return out;
}

double oracle_drift_1d(double u, double kappa) { return kappa * u; }

SpacePtr allen_cahn_space(int modes) {
  TorusOptions o;
  o.dimension = 1;
  o.modes = modes;
  o.h = Sobolev::L2;
  o.v = Sobolev::H1;
  o.alpha = 2.0;
  return SpaceSpec::torus(o);
}

SpacePtr p_laplacian_space(int modes, double p) {
  if (!(p >= 2.0)) throw ConfigError("p-Laplacian needs p >= 2");
  TorusOptions o;
  o.dimension = 1;
  o.modes = modes;
  o.zero_mean = true;
  o.h = Sobolev::L2;
  o.v_kind = VNormKind::GradientLp;
  o.p = p;
  o.alpha = p;
  return SpaceSpec::torus(o);
}

namespace {

void attach_noise(ModelSpec& m, const NoiseSpec& noise) {
  noise.validate(*m.space);
  m.noise_params = noise;
  m.noise_modes = noise.modes();
  m.noise = [noise](double, const SpectralField& u, std::span<const double> dW) {
    return apply_noise(noise, u, dW);
  };
}

}  // namespace

ModelSpec allen_cahn_model(int modes, const NoiseSpec& noise) {
  ModelSpec m;
  m.name = "allen_cahn";
  m.space = allen_cahn_space(modes);
  m.linear = laplacian_symbol(*m.space, 1.0);
  m.nonlinear = [](double, const SpectralField& u) { return u - cubic_term(u); };
  attach_noise(m, noise);
  // 2⟨A(u),u⟩ = −2‖u‖²_V + 4|u|² − 2‖u‖⁴_{L⁴}; 2⟨A(u)−A(v),u−v⟩ ≤ 2|u−v|².
  m.alpha = 2.0;
  m.beta = 4.0;
  m.gamma = 4.0;
  m.c = 2.0;
  m.c0 = std::max({4.0, 2.0 + noise_lipschitz2(noise, *m.space),
                   noise_hs_bound(noise, *m.space)});
  // ‖Δu+u‖_{H⁻¹} ≤ ‖u‖_{H¹}, ‖u³‖_{H⁻¹} ≤ (coth π / 2)‖u‖_{H¹}|u|².
  m.growth_c = 2.0;
  m.rho = [](const SpectralField&) { return 0.0; };
  m.eta = [](const SpectralField&) { return 0.0; };
  m.validate();
  return m;
}

ModelSpec p_laplacian_model(int modes, double p, const NoiseSpec& noise) {
  ModelSpec m;
  m.name = "p_laplacian";
  m.space = p_laplacian_space(modes, p);
  m.nonlinear = [p](double, const SpectralField& u) { return p_laplacian_drift(u, p); };
  attach_noise(m, noise);
  m.alpha = p;
  m.beta = 0.0;
  m.gamma = 0.0;
  m.c = 2.0;
  m.c0 = std::max({1.0, noise_lipschitz2(noise, *m.space), noise_hs_bound(noise, *m.space)});
  // ‖A(u)‖_{V*} ≤ ‖∇u‖_p^{p−1} by Hölder.
  m.growth_c = 1.0;
  m.rho = [](const SpectralField&) { return 0.0; };
  m.eta = [](const SpectralField&) { return 0.0; };
  m.validate();
  return m;
}

ModelSpec oracle_1d_model(double kappa, double sigma) {
  ModelSpec m;
  m.name = "oracle_1d";
  m.space = SpaceSpec::euclidean(1);
  m.nonlinear = [kappa](double, const SpectralField& u) {
    SpectralField out(u.space_ptr());
    out[0] = oracle_drift_1d(u[0], kappa);
    return out;
  };
  NoiseSpec noise;
  noise.q = {1.0};
  noise.mu = sigma;
  attach_noise(m, noise);
  m.alpha = 2.0;
  m.c = 1.0;
  m.c0 = 2.0 * std::max(kappa, 0.0) + 1.0 + sigma * sigma;
  m.growth_c = std::max(kappa * kappa, 1.0);
  m.validate();
  return m;
}

ModelSpec linear_model(const SpacePtr& space, double scale) {
  ModelSpec m;
  m.name = "linear";
  m.space = space;
  m.linear = laplacian_symbol(*space, scale);
  m.nonlinear = [](double, const SpectralField& u) { return SpectralField(u.space_ptr()); };
  m.c = scale;
  m.c0 = 2.0 * scale;
  m.growth_c = scale * scale;
  m.validate();
  return m;
}

double ModelParams::get(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

}  // namespace rspde
