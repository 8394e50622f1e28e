#include "reflectspde/penalize.hpp"

#include <cmath>
#include <string>

#include "reflectspde/rng.hpp"

namespace rspde {

const char* method_name(Method m) { return m == Method::Explicit ? "explicit" : "splitting"; }

Method parse_method(const std::string& s) {
  if (s == "explicit") return Method::Explicit;
  if (s == "splitting") return Method::Splitting;
  throw ConfigError("scheme.method must be 'explicit' or 'splitting', got '" + s + "'");
}

void SchemeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("scheme.dt must be > 0");
  if (steps < 1) throw ConfigError("scheme.steps must be >= 1");
  if (!(n >= 0.0) || !std::isfinite(n)) throw ConfigError("penalization level n must be >= 0");
  if (method == Method::Explicit && n * dt > 1.0)
    throw ConfigError("explicit stepper is unstable for n*dt > 1 (n=" + std::to_string(n) +
                      ", dt=" + std::to_string(dt) + "); use method=splitting or a smaller dt");
}

BlowUpError::BlowUpError(std::size_t step_, double t_, double norm_)
    : std::runtime_error("path blew up at step " + std::to_string(step_) + " (t=" +
                         std::to_string(t_) + ", |X|=" + std::to_string(norm_) + ")"),
      step(step_),
      t(t_),
      norm(norm_) {}

void brownian_row(std::uint64_t seed, std::uint64_t path_index, std::size_t step, double dt,
                  std::span<double> out) {
  const KeyedRng rng(seed, Stream::Brownian);
  rng.normals(static_cast<std::uint32_t>(path_index), static_cast<std::uint32_t>(step), out);
  const double s = std::sqrt(dt);
  for (double& x : out) x *= s;
}

Increments brownian_increments(std::uint64_t seed, std::uint64_t path_index, std::size_t K,
                               std::size_t steps, double dt) {
  Increments m;
  m.steps = steps;
  m.K = K;
  m.data.resize(steps * K);
  for (std::size_t j = 0; j < steps; ++j)
    brownian_row(seed, path_index, j, dt, {m.data.data() + j * K, K});
  return m;
}

NoiseSource keyed_noise(std::uint64_t seed, std::uint64_t path_index, double dt) {
  return [=](std::size_t step, std::span<double> dW) {
    brownian_row(seed, path_index, step, dt, dW);
  };
}

namespace {

class Stepper {
 public:
  Stepper(const ModelSpec& model, const SchemeConfig& cfg) : model_(model), cfg_(cfg) {
    factor_.assign(model.space->size(), 1.0);
    for (std::size_t i = 0; i < model.linear.size(); ++i)
      factor_[i] = std::exp(cfg.dt * model.linear[i]);
    relax_ = std::exp(-cfg.n * cfg.dt);
  }

  StepResult step(const SpectralField& x, double t, std::span<const double> dW) const {
    SpectralField tilde = x;
    if (model_.nonlinear) tilde.axpy(cfg_.dt, model_.nonlinear(t, x));
    if (model_.noise && model_.noise_modes > 0) tilde += model_.noise(t, x, dW);
    for (std::size_t i = 0; i < tilde.size(); ++i) tilde[i] *= factor_[i];

    SpectralField dL(x.space_ptr());
    if (cfg_.method == Method::Explicit) {
      const double r = norm_h(x);
      if (r > 1.0) dL.axpy(-cfg_.n * cfg_.dt * (1.0 - 1.0 / r), x);
    } else {
      const double r = norm_h(tilde);
      if (r > 1.0) {
        const double target = 1.0 + (r - 1.0) * relax_;
        dL.axpy(target / r - 1.0, tilde);
      }
    }
    SpectralField next = tilde;
    next += dL;
    return {std::move(next), std::move(dL), std::move(tilde)};
  }

 private:
  const ModelSpec& model_;
  const SchemeConfig& cfg_;
  std::vector<double> factor_;
  double relax_ = 1.0;
};

double pow_alpha(double v, double alpha) { return alpha == 2.0 ? v * v : std::pow(v, alpha); }

}  // namespace

StepResult step_penalized(const SpectralField& state, double t, const SchemeConfig& cfg,
                          const ModelSpec& model, std::span<const double> dW) {
  cfg.validate();
  if (!state.is_finite()) throw BlowUpError(0, t, norm_h(state));
  if (dW.size() != model.noise_modes)
    throw DimensionError("noise increment length does not match the model");
  StepResult r = Stepper(model, cfg).step(state, t, dW);
  if (!r.state.is_finite()) throw BlowUpError(0, t, norm_h(state));
  return r;
}

PathRecord simulate_path(const ModelSpec& model, const SchemeConfig& cfg, const SpectralField& x0,
                         std::uint64_t path_index, SimulateOptions opts) {
  return simulate_path(model, cfg, x0, keyed_noise(cfg.seed, path_index, cfg.dt), opts);
}

PathRecord simulate_path(const ModelSpec& model, const SchemeConfig& cfg, const SpectralField& x0,
                         const NoiseSource& noise, SimulateOptions opts) {
  cfg.validate();
  if (x0.space_ptr() != model.space) throw DimensionError("x0 is not in the model's space");
  const double r0 = norm_h(x0);
  if (!(r0 <= 1.0 + 1e-12))
    throw std::invalid_argument("initial state must lie in the closed unit ball (|x0|=" +
                                std::to_string(r0) + ")");

  const Stepper stepper(model, cfg);
  const double alpha = model.space->alpha();
  const std::size_t steps = cfg.steps;

  PathRecord rec{.n = cfg.n,
                 .dt = cfg.dt,
                 .times = {},
                 .states = {},
                 .l_increments = {},
                 .unconstrained_total = SpectralField(model.space),
                 .l_total = SpectralField(model.space),
                 .masses = {},
                 .radii = {}};
  rec.times.resize(steps + 1);
  rec.masses.reserve(steps);
  rec.radii.reserve(steps + 1);
  if (opts.keep_states) {
    rec.states.reserve(steps + 1);
    rec.l_increments.reserve(steps);
  }

  std::vector<double> dW(model.noise_modes);
  SpectralField x = x0;
  auto observe = [&](const SpectralField& s) {
    const double r = norm_h(s);
    const double gap = r > 1.0 ? r - 1.0 : 0.0;
    rec.radii.push_back(r);
    rec.sup_h = std::max(rec.sup_h, r);
    rec.sup_gap = std::max(rec.sup_gap, gap);
    if (opts.keep_states) rec.states.push_back(s);
    return std::pair{r, gap};
  };

  for (std::size_t j = 0; j < steps; ++j) {
    const double t = cfg.dt * static_cast<double>(j);
    rec.times[j] = t;
    const auto [r, gap] = observe(x);
    rec.pen_l1 += cfg.dt * gap;
    rec.pen_l2 += cfg.dt * gap * gap;
    // (X, X − π(X)) = r·gap for the radial projection.
    rec.weighted_pen += cfg.dt * r * r * r * gap;
    rec.v_energy += cfg.dt * pow_alpha(norm_v(x), alpha);

    if (!dW.empty()) noise(j, dW);
    StepResult s = stepper.step(x, t, dW);
    if (!s.state.is_finite() || norm_h(s.state) > 1e12) throw BlowUpError(j, t, r);

    rec.unconstrained_total += s.unconstrained;
    rec.unconstrained_total -= x;
    rec.l_total += s.dL;
    const double m = norm_h(s.dL);
    rec.masses.push_back(m);
    rec.total_variation += m;
    if (opts.keep_states) rec.l_increments.push_back(std::move(s.dL));
    x = std::move(s.state);
  }
  rec.times[steps] = cfg.dt * static_cast<double>(steps);
  observe(x);
  return rec;
}

}  // namespace rspde
