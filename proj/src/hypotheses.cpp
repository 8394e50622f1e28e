#include "reflectspde/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "reflectspde/rng.hpp"

namespace rspde {

FieldSampler::FieldSampler(SpacePtr space, std::uint64_t seed, double decay, ProjectFn constrain)
    : space_(std::move(space)), seed_(seed), decay_(decay), constrain_(std::move(constrain)) {}

FieldSampler FieldSampler::for_model(const ModelSpec& model, std::uint64_t seed, double decay) {
  return FieldSampler(model.space, seed, decay, model.constrain);
}

SpectralField FieldSampler::sample(std::size_t index) const {
  SpectralField f(space_);
  const KeyedRng rng(seed_, Stream::Sampler);
  rng.normals(static_cast<std::uint32_t>(index), 0, f.coeffs());
  const auto& b = space_->basis();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double k = std::sqrt(static_cast<double>(b[i].k2));
    f[i] *= std::pow(std::max(1.0, k), -decay_);
    // Coefficients are H-orthonormal only after dividing by √h.
    f[i] /= std::sqrt(space_->h_weights()[i]);
  }
  if (constrain_) f = constrain_(f);
  const double r = norm_h(f);
  if (r == 0.0) return f;
  return f * (kRadii[index % 4] / r);
}

namespace {

const char* kNote =
    "randomized audit: a negative margin falsifies the condition on this sample; "
    "nonnegative margins do not prove it";

bool violated(double margin, double scale) { return margin < -(1e-9 * scale + 1e-12); }

// Second differences of the increments at spacing `stride`.
double jump_detector(const std::vector<double>& f, std::size_t stride) {
  double worst = 0.0;
  const std::size_t n = (f.size() - 1) / stride;
  auto d = [&](std::size_t i) { return f[(i + 1) * stride] - f[i * stride]; };
  for (std::size_t i = 1; i + 1 < n; ++i)
    worst = std::max(worst, std::abs(d(i) - 0.5 * (d(i - 1) + d(i + 1))));
  return worst;
}

struct Sampled {
  Margin m;
  double scale = 0.0;
  std::vector<SpectralField> inputs;
};

template <class Eval>
AuditReport run_audit(const char* id, std::size_t count, const FieldSampler& s,
                      const AuditOptions& opt, Eval&& eval) {
  if (count < 1) throw std::invalid_argument(std::string(id) + " audit needs count >= 1");
  std::vector<std::optional<Sampled>> res(count);
  std::optional<std::string> error;
#pragma omp parallel for schedule(dynamic, 4) num_threads(opt.threads)
  for (std::size_t i = 0; i < count; ++i) {
    try {
      res[i] = eval(i);
    } catch (const std::exception& e) {
#pragma omp critical
      if (!error) error = e.what();
    }
  }
  if (error) throw ModelError(std::string(id) + " audit: " + *error);

  AuditReport rep;
  rep.hypothesis = id;
  rep.seed = s.seed();
  rep.note = kNote;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.constant = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    if (!res[i]) continue;
    const Sampled& r = *res[i];
    if (!std::isfinite(r.m.margin) || !std::isfinite(r.m.value))
      throw ModelError(std::string(id) + " audit: non-finite operator output at sample " +
                       std::to_string(i));
    ++rep.samples;
    if (violated(r.m.margin, r.scale)) ++rep.violations;
    if (r.m.margin < rep.worst_margin) {
      rep.worst_margin = r.m.margin;
      rep.witness = r.inputs;
    }
    rep.constant = std::max(rep.constant, r.m.value);
  }
  if (rep.samples == 0) rep.worst_margin = rep.constant = 0.0;
  return rep;
}

// Pair partner: every fourth pair is a near-coincident perturbation.
SpectralField pair_second(const FieldSampler& s, std::size_t i, const SpectralField& u) {
  SpectralField w = s.sample(2 * i + 1);
  if (i % 4 != 3) return w;
  const double r = norm_h(w);
  return r > 0.0 ? u + w * (0.05 / r) : u + w;
}

double pow_alpha(double v, double a) { return a == 2.0 ? v * v : std::pow(v, a); }

}  // namespace

Margin hemicontinuity_margin(const ModelSpec& m, const SpectralField& u, const SpectralField& v,
                             const SpectralField& x, const AuditOptions& opt) {
  const std::size_t n = (std::size_t{1} << opt.levels) + 1;
  std::vector<double> f(n);
  double fmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    SpectralField w = u;
    w.axpy(lam, v);
    f[i] = dual_pairing(m.drift(0.0, w), x);
    fmax = std::max(fmax, std::abs(f[i]));
  }
  const double j = std::min(jump_detector(f, 1), jump_detector(f, 2));
  const double tol = opt.jump_tol * std::max(1.0, fmax);
  return {tol - j, j};
}

Margin monotonicity_margin(const ModelSpec& m, const SpectralField& u, const SpectralField& v) {
  const SpectralField d = u - v;
  const double d2 = inner_h(d, d);
  const double lhs = 2.0 * dual_pairing(m.drift(0.0, u) - m.drift(0.0, v), d) + hs_dist2(m, u, v);
  const double bound = (m.c0 + m.rho_of(u) + m.eta_of(v)) * d2;
  return {bound - lhs, bound > 0.0 ? lhs / bound : 0.0};
}

Margin coercivity_margin(const ModelSpec& m, const SpectralField& u) {
  const double h2 = inner_h(u, u);
  const double vn = pow_alpha(norm_v(u), m.alpha);
  const double lhs = 2.0 * dual_pairing(m.drift(0.0, u), u) + hs_norm2(m, u);
  const double rhs = m.c0 * (1.0 + h2) - m.c * vn;
  return {rhs - lhs, (lhs + m.c * vn) / (1.0 + h2)};
}

double dual_norm_estimate(const SpectralField& a, const std::vector<SpectralField>& probes) {
  if (a.space().v_kind() == VNormKind::Weighted) return dual_norm(a);
  double best = 0.0;
  auto probe = [&](const SpectralField& w) {
    const double nv = norm_v(w);
    if (nv > 0.0) best = std::max(best, std::abs(dual_pairing(a, w)) / nv);
  };
  probe(a);
  for (const auto& w : probes) probe(w);
  return best;
}

Margin growth_margin(const ModelSpec& m, const SpectralField& u,
                     const std::vector<SpectralField>& probes) {
  std::vector<SpectralField> all = probes;
  all.push_back(u);
  const double a = dual_norm_estimate(m.drift(0.0, u), all);
  const double q = m.alpha / (m.alpha - 1.0);
  const double lhs = std::pow(a, q);
  const double rhs = (1.0 + pow_alpha(norm_v(u), m.alpha)) * (1.0 + std::pow(norm_h(u), m.beta));
  const double ratio = lhs / rhs;
  return {m.growth_c - ratio, ratio};
}

Margin lipschitz_margin(const ModelSpec& m, const SpectralField& u, const SpectralField& v) {
  const SpectralField d = u - v;
  const double d2 = inner_h(d, d);
  double ratio = hs_norm2(m, u) / (1.0 + inner_h(u, u));
  if (d2 > 0.0) ratio = std::max(ratio, hs_dist2(m, u, v) / d2);
  return {m.c0 - ratio, ratio};
}

AuditReport check_hemicontinuity(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                                 const AuditOptions& opt) {
  return run_audit("H1", count, s, opt, [&](std::size_t i) -> std::optional<Sampled> {
    SpectralField u = s.sample(3 * i), v = s.sample(3 * i + 1), x = s.sample(3 * i + 2);
    const Margin mg = hemicontinuity_margin(m, u, v, x, opt);
    return Sampled{mg, 0.0, {u, v, x}};
  });
}

AuditReport check_local_monotonicity(const ModelSpec& m, const FieldSampler& s,
                                     std::size_t count, const AuditOptions& opt) {
  if (count < 2) throw std::invalid_argument("H2 audit needs count >= 2");
  return run_audit("H2", count, s, opt, [&](std::size_t i) -> std::optional<Sampled> {
    SpectralField u = s.sample(2 * i);
    SpectralField v = pair_second(s, i, u);
    const Margin mg = monotonicity_margin(m, u, v);
    const double scale = std::abs(mg.margin) + std::abs(mg.value) * m.c0 * inner_h(u - v, u - v);
    return Sampled{mg, scale, {u, v}};
  });
}

AuditReport check_coercivity(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                             const AuditOptions& opt) {
  return run_audit("H3", count, s, opt, [&](std::size_t i) -> std::optional<Sampled> {
    SpectralField u = s.sample(i);
    const Margin mg = coercivity_margin(m, u);
    return Sampled{mg, mg.value * (1.0 + inner_h(u, u)), {u}};
  });
}

AuditReport check_growth(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                         const AuditOptions& opt) {
  if (count < 2) throw std::invalid_argument("H4 audit needs count >= 2");
  std::vector<SpectralField> probes;
  if (m.space->v_kind() != VNormKind::Weighted) {
    const FieldSampler ps(m.space, s.seed() ^ 0x9E3779B97F4A7C15ull, 1.0, m.constrain);
    for (std::size_t k = 0; k < 16; ++k) probes.push_back(ps.sample(k));
  }
  AuditReport r = run_audit("H4", count, s, opt, [&](std::size_t i) -> std::optional<Sampled> {
    SpectralField u = s.sample(i);
    std::vector<SpectralField> pr = probes;
    if (!probes.empty()) pr.push_back(m.drift(0.0, u));
    const Margin mg = growth_margin(m, u, pr);
    return Sampled{mg, m.growth_c, {u}};
  });
  if (!probes.empty())
    r.note += "; V* norm is a sampled lower bound (GradientLp V norm)";
  return r;
}

AuditReport check_lipschitz(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                            const AuditOptions& opt) {
  if (count < 2) throw std::invalid_argument("H5 audit needs count >= 2");
  return run_audit("H5", count, s, opt, [&](std::size_t i) -> std::optional<Sampled> {
    SpectralField u = s.sample(2 * i);
    SpectralField v = pair_second(s, i, u);
    if (u == v) return std::nullopt;
    const Margin mg = lipschitz_margin(m, u, v);
    return Sampled{mg, m.c0, {u, v}};
  });
}

GrowthLipschitz check_growth_and_lipschitz(const ModelSpec& m, const FieldSampler& s,
                                           std::size_t count, const AuditOptions& opt) {
  return {check_growth(m, s, count, opt), check_lipschitz(m, s, count, opt)};
}

std::vector<AuditReport> audit_all(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                                   const AuditOptions& opt) {
  std::vector<AuditReport> out;
  out.push_back(check_hemicontinuity(m, s, count, opt));
  out.push_back(check_local_monotonicity(m, s, count, opt));
  out.push_back(check_coercivity(m, s, count, opt));
  auto gl = check_growth_and_lipschitz(m, s, count, opt);
  out.push_back(std::move(gl.growth));
  out.push_back(std::move(gl.lipschitz));
  return out;
}

}  // namespace rspde
