#pragma once

// Drift/diffusion pairs (A, B) on a truncated spectral space, with the
// constants each model declares for the hemicontinuity, local monotonicity,
// coercivity, growth and noise-Lipschitz conditions.

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "reflectspde/hilbert.hpp"

namespace rspde {

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Diagonal Q-Wiener noise: B(u)dW = Σ_k √q_k (μ + λ·s(û_k)) dW_k e_k with the
// unit clamp s, over the first K basis indices.
struct NoiseSpec {
  std::vector<double> q;
  double mu = 0.0;
  double lambda = 0.0;

  std::size_t modes() const { return q.size(); }
  double max_q() const;

  // q_k = scale·(1 + |k|²)^(−decay) on the first K basis entries.
  static NoiseSpec with_decay(const SpaceSpec& space, std::size_t K, double scale,
                              double decay, double mu, double lambda);

  // Throws ConfigError when q is negative/non-finite or K exceeds the space.
  void validate(const SpaceSpec& space) const;
};

double unit_clamp(double x);

SpectralField apply_noise(const NoiseSpec& spec, const SpectralField& u,
                          std::span<const double> dW);

// Upper bound of Σ_k q_k (|μ| + |λ|)² h_k for ‖B(u)‖²_{L₂} over all u.
double noise_hs_bound(const NoiseSpec& spec, const SpaceSpec& space);
// Lipschitz constant λ²·max_k q_k h_k of the clamp noise.
double noise_lipschitz2(const NoiseSpec& spec, const SpaceSpec& space);

using DriftFn = std::function<SpectralField(double, const SpectralField&)>;
using NoiseFn =
    std::function<SpectralField(double, const SpectralField&, std::span<const double>)>;
using WeightFn = std::function<double(const SpectralField&)>;
using ProjectFn = std::function<SpectralField(const SpectralField&)>;

struct ModelSpec {
  std::string name;
  SpacePtr space;
  // A(t,u) = linear ⊙ u + nonlinear(t,u). The diagonal part is integrated
  // exactly by the steppers; empty means zero.
  std::vector<double> linear;
  DriftFn nonlinear;
  NoiseFn noise;
  std::size_t noise_modes = 0;
  NoiseSpec noise_params;

  double alpha = 2.0;
  double beta = 0.0;
  double gamma = 0.0;
  double c0 = 1.0;
  double c = 1.0;
  double growth_c = 1.0;  // declared constant of the growth bound
  WeightFn rho;
  WeightFn eta;
  ProjectFn constrain;  // projection onto admissible fields (divergence-free, ...)

  SpectralField drift(double t, const SpectralField& u) const;
  SpectralField diffusion(double t, const SpectralField& u, std::span<const double> dW) const;
  SpectralField admissible(const SpectralField& u) const;
  double rho_of(const SpectralField& u) const { return rho ? rho(u) : 0.0; }
  double eta_of(const SpectralField& u) const { return eta ? eta(u) : 0.0; }

  // Checks the declared-constant invariants; throws ConfigError.
  void validate() const;
};

// Hilbert–Schmidt norm² of B(t,u) − B(t,v) (v may equal the zero field).
double hs_norm2(const ModelSpec& m, const SpectralField& u);
double hs_dist2(const ModelSpec& m, const SpectralField& u, const SpectralField& v);

// Δu + u − u³, cubic term pseudo-spectral and alias-free.
SpectralField allen_cahn_drift(const SpectralField& u);
// div(|∇u|^{p−2}∇u).
SpectralField p_laplacian_drift(const SpectralField& u, double p);
double oracle_drift_1d(double u, double kappa);

SpacePtr allen_cahn_space(int modes);
SpacePtr p_laplacian_space(int modes, double p);

ModelSpec allen_cahn_model(int modes, const NoiseSpec& noise);
ModelSpec p_laplacian_model(int modes, double p, const NoiseSpec& noise);
// H = ℝ, A(u) = κu, B = σ (additive).
ModelSpec oracle_1d_model(double kappa, double sigma);
ModelSpec linear_model(const SpacePtr& space, double scale);

// Registry: "allen_cahn", "p_laplacian", "oracle_1d", "tamed_nse".
struct ModelParams {
  std::map<std::string, double> values;
  // Noise: K (count), q_scale, q_decay, mu, lambda.
  double get(const std::string& key, double fallback) const;
};
std::vector<std::string> registered_models();
ModelSpec make_model(const std::string& name, const ModelParams& params);

}  // namespace rspde
