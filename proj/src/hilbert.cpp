#include "reflectspde/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "reflectspde/grid.hpp"

namespace rspde {

namespace {

double sobolev_weight(Sobolev s, int k2) {
  switch (s) {
    case Sobolev::L2:
      return 1.0;
    case Sobolev::H1:
      return 1.0 + k2;
    case Sobolev::H2:
      return (1.0 + k2) * (1.0 + k2);
  }
  return 1.0;
}

// Representative of {k, −k}: the last nonzero axis (scanning from the
// FFT-halved last axis backwards) is positive.
bool is_representative(const std::array<int, 3>& k, int dim) {
  for (int d = dim - 1; d >= 0; --d) {
    if (k[d] > 0) return true;
    if (k[d] < 0) return false;
  }
  return false;
}

}  // namespace

SpaceSpec::~SpaceSpec() = default;

std::shared_ptr<const SpaceSpec> SpaceSpec::euclidean(std::size_t size, double alpha) {
  if (size == 0) throw ConfigError("euclidean space needs size >= 1");
  std::shared_ptr<SpaceSpec> s(new SpaceSpec());
  s->dimension_ = 0;
  s->alpha_ = alpha;
  s->basis_.resize(size);
  for (std::size_t i = 0; i < size; ++i) s->basis_[i].component = static_cast<int>(i);
  s->components_ = static_cast<int>(size);
  s->h_weights_.assign(size, 1.0);
  s->v_weights_.assign(size, 1.0);
  s->partner_.resize(size);
  for (std::size_t i = 0; i < size; ++i) s->partner_[i] = i;
  return s;
}

std::shared_ptr<const SpaceSpec> SpaceSpec::torus(const TorusOptions& o) {
  if (o.dimension != 1 && o.dimension != 3)
    throw ConfigError("torus dimension must be 1 or 3");
  if (o.components != 1 && o.components != 3)
    throw ConfigError("torus components must be 1 or 3");
  if (o.modes < 1) throw ConfigError("torus needs modes >= 1");
  if (!(o.alpha > 1.0)) throw ConfigError("alpha must exceed 1");
  if (o.v_kind == VNormKind::GradientLp) {
    if (!(o.p >= 2.0)) throw ConfigError("GradientLp norm needs p >= 2");
    if (!o.zero_mean) throw ConfigError("GradientLp norm needs a zero-mean space");
  }

  std::shared_ptr<SpaceSpec> s(new SpaceSpec());
  s->dimension_ = o.dimension;
  s->components_ = o.components;
  s->modes_ = o.modes;
  s->zero_mean_ = o.zero_mean;
  s->alpha_ = o.alpha;
  s->p_ = o.p;
  s->v_kind_ = o.v_kind;

  const int K = o.modes;
  const int d = o.dimension;
  const int ky = d == 3 ? K : 0;
  for (int kz = -ky; kz <= ky; ++kz) {
    for (int k1 = -ky; k1 <= ky; ++k1) {
      for (int k0 = -K; k0 <= K; ++k0) {
        std::array<int, 3> k{k0, k1, kz};
        const int k2 = k0 * k0 + k1 * k1 + kz * kz;
        if (k2 == 0) {
          if (o.zero_mean) continue;
          for (int c = 0; c < o.components; ++c)
            s->basis_.push_back({k, c, BasisKind::Constant, 0});
          continue;
        }
        if (!is_representative(k, d)) continue;
        for (auto kind : {BasisKind::Cosine, BasisKind::Sine})
          for (int c = 0; c < o.components; ++c) s->basis_.push_back({k, c, kind, k2});
      }
    }
  }
  std::stable_sort(s->basis_.begin(), s->basis_.end(),
                   [](const BasisEntry& a, const BasisEntry& b) {
                     return std::tie(a.k2, a.k, a.kind, a.component) <
                            std::tie(b.k2, b.k, b.kind, b.component);
                   });

  for (const auto& e : s->basis_) {
    s->h_weights_.push_back(sobolev_weight(o.h, e.k2));
    if (o.v_kind == VNormKind::Weighted) s->v_weights_.push_back(sobolev_weight(o.v, e.k2));
  }
  s->finalize();
  s->grid_ = std::make_unique<SpectralGrid>(*s);
  return s;
}

void SpaceSpec::finalize() {
  partner_.resize(basis_.size());
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const auto& e = basis_[i];
    if (e.kind == BasisKind::Constant) {
      partner_[i] = i;
      continue;
    }
    const auto other = e.kind == BasisKind::Cosine ? BasisKind::Sine : BasisKind::Cosine;
    partner_[i] = find(e.k, e.component, other);
  }
}

double SpaceSpec::volume() const {
  return std::pow(2.0 * std::numbers::pi, dimension_);
}

std::size_t SpaceSpec::find(std::array<int, 3> k, int component, BasisKind kind) const {
  // Basis is sorted by (|k|², k, kind, component).
  const int k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  BasisEntry key{k, component, kind, k2};
  auto it = std::lower_bound(basis_.begin(), basis_.end(), key,
                             [](const BasisEntry& a, const BasisEntry& b) {
                               return std::tie(a.k2, a.k, a.kind, a.component) <
                                      std::tie(b.k2, b.k, b.kind, b.component);
                             });
  if (it == basis_.end() || it->k != k || it->component != component || it->kind != kind)
    return basis_.size();
  return static_cast<std::size_t>(it - basis_.begin());
}

double SpaceSpec::embedding_constant() const {
  double c2 = std::numeric_limits<double>::infinity();
  if (v_kind_ == VNormKind::Weighted) {
    for (std::size_t i = 0; i < basis_.size(); ++i)
      c2 = std::min(c2, v_weights_[i] / h_weights_[i]);
    return std::sqrt(c2);
  }
  // ‖∇f‖_p ≥ vol^{1/p − 1/2} ‖∇f‖_2 for p ≥ 2, and ‖∇f‖²_2 = Σ k² f_k².
  for (std::size_t i = 0; i < basis_.size(); ++i)
    c2 = std::min(c2, basis_[i].k2 / h_weights_[i]);
  return std::pow(volume(), 1.0 / p_ - 0.5) * std::sqrt(c2);
}

SpectralField::SpectralField(SpacePtr space)
    : space_(std::move(space)), coeffs_(space_->size(), 0.0) {}

SpectralField::SpectralField(SpacePtr space, std::vector<double> coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != space_->size())
    throw DimensionError("coefficient length " + std::to_string(coeffs_.size()) +
                         " does not match space size " + std::to_string(space_->size()));
}

SpectralField SpectralField::unit(SpacePtr space, std::size_t index) {
  SpectralField f(std::move(space));
  if (index >= f.size()) throw DimensionError("unit: index out of range");
  f.coeffs_[index] = 1.0;
  return f;
}

void require_same_space(const SpectralField& a, const SpectralField& b) {
  if (a.space_ptr() != b.space_ptr())
    throw DimensionError("fields live in different spaces");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  require_same_space(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  require_same_space(*this, o);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (double& c : coeffs_) c *= a;
  return *this;
}

SpectralField& SpectralField::axpy(double a, const SpectralField& x) {
  require_same_space(*this, x);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
  return *this;
}

bool SpectralField::is_finite() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isfinite(c); });
}

bool SpectralField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

double inner_h(const SpectralField& f, const SpectralField& g) {
  require_same_space(f, g);
  const auto w = f.space().h_weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * g[i];
  return acc;
}

double norm_h(const SpectralField& f) {
  const auto w = f.space().h_weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * f[i];
  return std::sqrt(acc);
}

double norm_v(const SpectralField& f) {
  const SpaceSpec& s = f.space();
  if (s.v_kind() == VNormKind::Weighted) {
    const auto w = s.v_weights();
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += w[i] * f[i] * f[i];
    return std::sqrt(acc);
  }
  const SpectralGrid& g = *s.grid();
  std::vector<double> grad2(g.points(), 0.0);
  std::vector<double> dcoef(f.size());
  std::vector<double> vals(g.points());
  for (int c = 0; c < s.components(); ++c) {
    for (int a = 0; a < s.dimension(); ++a) {
      g.derivative(f.coeffs(), a, dcoef);
      g.to_physical(dcoef, c, vals);
      for (std::size_t j = 0; j < vals.size(); ++j) grad2[j] += vals[j] * vals[j];
    }
  }
  const double p = s.p();
  for (double& v : grad2) v = std::pow(v, 0.5 * p);
  return std::pow(g.integrate(grad2), 1.0 / p);
}

double dual_pairing(const SpectralField& a, const SpectralField& v) {
  return inner_h(a, v);
}

double dual_norm(const SpectralField& a) {
  const SpaceSpec& s = a.space();
  if (s.v_kind() != VNormKind::Weighted)
    throw ConfigError("exact dual norm needs a weighted V norm");
  const auto h = s.h_weights();
  const auto v = s.v_weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ha = h[i] * a[i];
    acc += ha * ha / v[i];
  }
  return std::sqrt(acc);
}

SpectralField project_ball(const SpectralField& f) {
  const double r = norm_h(f);
  if (r <= 1.0) return f;
  return f * (1.0 / r);
}

PenaltyGap penalty_gap(const SpectralField& f) {
  const double r = norm_h(f);
  if (r <= 1.0) return {SpectralField(f.space_ptr()), 0.0};
  return {f * (1.0 - 1.0 / r), 0.5 * (r - 1.0) * (r - 1.0)};
}

SpectralField cosine_mode(const SpacePtr& space, int k) {
  const auto kind = k == 0 ? BasisKind::Constant : BasisKind::Cosine;
  const std::size_t i = space->find({k, 0, 0}, 0, kind);
  if (i == space->size()) throw DimensionError("mode not retained");
  return SpectralField::unit(space, i);
}

SpectralField sine_mode(const SpacePtr& space, int k) {
  const std::size_t i = space->find({k, 0, 0}, 0, BasisKind::Sine);
  if (i == space->size()) throw DimensionError("mode not retained");
  return SpectralField::unit(space, i);
}

}  // namespace rspde
