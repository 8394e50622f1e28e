#pragma once

// Randomized audits of the hemicontinuity, local monotonicity, coercivity,
// growth and noise-Lipschitz conditions. A finite sample can only falsify a
// condition or fail to; every report says so in its note.

#include <cstdint>
#include <string>
#include <vector>

#include "reflectspde/hilbert.hpp"
#include "reflectspde/models.hpp"

namespace rspde {

// Gaussian coefficients with amplitude max(1, |k|)^{−decay}, mapped through
// `constrain` and rescaled to H-radius {0.5, 1, 2, 4}[index mod 4].
class FieldSampler {
 public:
  FieldSampler(SpacePtr space, std::uint64_t seed, double decay = 1.0, ProjectFn constrain = {});
  static FieldSampler for_model(const ModelSpec& model, std::uint64_t seed, double decay = 1.0);

  SpectralField sample(std::size_t index) const;
  std::uint64_t seed() const { return seed_; }

  static constexpr double kRadii[4] = {0.5, 1.0, 2.0, 4.0};

 private:
  SpacePtr space_;
  std::uint64_t seed_;
  double decay_;
  ProjectFn constrain_;
};

struct AuditReport {
  std::string hypothesis;  // "H1".."H5"
  std::size_t samples = 0;
  double worst_margin = 0.0;  // negative = violation
  double constant = 0.0;      // estimated constant (meaning depends on the hypothesis)
  std::size_t violations = 0;
  std::vector<SpectralField> witness;  // inputs of the worst margin
  std::string note;
  std::uint64_t seed = 0;
};

struct AuditOptions {
  int threads = 1;
  // Jump tolerance of the hemicontinuity detector, relative to max(1, max|f|).
  double jump_tol = 1e-6;
  // Grid of the hemicontinuity check: 2^levels + 1 points on [−1, 1].
  int levels = 11;
};

// Margin functions, reused for witness re-evaluation.
struct Margin {
  double margin = 0.0;
  double value = 0.0;  // the quantity whose sample maximum is the reported constant
};
Margin hemicontinuity_margin(const ModelSpec& m, const SpectralField& u, const SpectralField& v,
                             const SpectralField& x, const AuditOptions& opt = {});
Margin monotonicity_margin(const ModelSpec& m, const SpectralField& u, const SpectralField& v);
Margin coercivity_margin(const ModelSpec& m, const SpectralField& u);
// `probes` are extra test directions for the sampled V* norm (GradientLp V).
Margin growth_margin(const ModelSpec& m, const SpectralField& u,
                     const std::vector<SpectralField>& probes = {});
Margin lipschitz_margin(const ModelSpec& m, const SpectralField& u, const SpectralField& v);

// ‖a‖_{V*}: exact for weighted V; otherwise the lower bound
// max_w ⟨a, w⟩/‖w‖_V over `probes` ∪ {a}.
double dual_norm_estimate(const SpectralField& a, const std::vector<SpectralField>& probes);

AuditReport check_hemicontinuity(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                                 const AuditOptions& opt = {});
AuditReport check_local_monotonicity(const ModelSpec& m, const FieldSampler& s,
                                     std::size_t count, const AuditOptions& opt = {});
AuditReport check_coercivity(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                             const AuditOptions& opt = {});
AuditReport check_growth(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                         const AuditOptions& opt = {});
AuditReport check_lipschitz(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                            const AuditOptions& opt = {});

struct GrowthLipschitz {
  AuditReport growth;
  AuditReport lipschitz;
};
GrowthLipschitz check_growth_and_lipschitz(const ModelSpec& m, const FieldSampler& s,
                                           std::size_t count, const AuditOptions& opt = {});

// All five, in order H1..H5.
std::vector<AuditReport> audit_all(const ModelSpec& m, const FieldSampler& s, std::size_t count,
                                   const AuditOptions& opt = {});

}  // namespace rspde
