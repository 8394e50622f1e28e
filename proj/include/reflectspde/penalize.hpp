#pragma once

// Time stepping of the penalized equation
//   dX = A(X) dt + B(X) dW − n (X − π(X)) dt
// with the reflection approximant L(t) = −n ∫ (X − π(X)) ds recorded per step.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "reflectspde/hilbert.hpp"
#include "reflectspde/models.hpp"

namespace rspde {

enum class Method { Explicit, Splitting };

const char* method_name(Method m);
Method parse_method(const std::string& s);

struct SchemeConfig {
  double dt = 1e-3;
  std::size_t steps = 1000;
  double n = 1.0;
  Method method = Method::Explicit;
  std::uint64_t seed = 0;

  double horizon() const { return dt * static_cast<double>(steps); }
  // dt > 0, steps ≥ 1, n ≥ 0, and n·dt ≤ 1 for the explicit stepper.
  void validate() const;
};

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(std::size_t step, double t, double norm);
  std::size_t step;
  double t;
  double norm;
};

// steps×K matrix of N(0, dt) increments, row j keyed on (seed, path, j).
struct Increments {
  std::size_t steps = 0;
  std::size_t K = 0;
  std::vector<double> data;
  std::span<const double> row(std::size_t j) const { return {data.data() + j * K, K}; }
};

Increments brownian_increments(std::uint64_t seed, std::uint64_t path_index, std::size_t K,
                               std::size_t steps, double dt);
// One row of the same matrix, without materializing the rest.
void brownian_row(std::uint64_t seed, std::uint64_t path_index, std::size_t step, double dt,
                  std::span<double> out);

// Fills dW for step j.
using NoiseSource = std::function<void(std::size_t step, std::span<double> dW)>;
NoiseSource keyed_noise(std::uint64_t seed, std::uint64_t path_index, double dt);

struct StepResult {
  SpectralField state;
  SpectralField dL;
  // x̃: the state after drift and noise, before the penalty acts.
  SpectralField unconstrained;
};

// One step from `state` at time t. The diagonal linear part of the drift is
// integrated exactly (integrating factor); the penalty is explicit or, for
// Splitting, the exact radial flow r' = 1 + (r − 1)e^{−n dt}.
StepResult step_penalized(const SpectralField& state, double t, const SchemeConfig& cfg,
                          const ModelSpec& model, std::span<const double> dW);

struct PathRecord {
  double n = 0.0;
  double dt = 0.0;
  std::vector<double> times;                // steps + 1
  std::vector<SpectralField> states;        // steps + 1 (empty if not kept)
  std::vector<SpectralField> l_increments;  // steps (empty if not kept)
  SpectralField unconstrained_total;        // Σ (x̃_j − X_j)
  SpectralField l_total;                    // Σ ΔL_j

  // Left-endpoint quadratures and sups over the grid.
  double pen_l1 = 0.0;        // ∫ |X − π(X)| dt
  double pen_l2 = 0.0;        // ∫ |X − π(X)|² dt
  double weighted_pen = 0.0;  // ∫ |X|² (X, X − π(X)) dt
  double v_energy = 0.0;      // ∫ ‖X‖_V^α dt
  double sup_h = 0.0;         // max_j |X_j|
  double sup_gap = 0.0;       // max_j |X_j − π(X_j)|
  double total_variation = 0.0;  // Σ |ΔL_j|

  std::vector<double> masses;  // |ΔL_j| (always kept)
  std::vector<double> radii;   // |X_j| for j = 0..steps (always kept)
};

struct SimulateOptions {
  bool keep_states = true;
};

// Requires |x0| ≤ 1. Noise defaults to keyed_noise(cfg.seed, path_index, dt).
PathRecord simulate_path(const ModelSpec& model, const SchemeConfig& cfg, const SpectralField& x0,
                         std::uint64_t path_index, SimulateOptions opts = {});
PathRecord simulate_path(const ModelSpec& model, const SchemeConfig& cfg, const SpectralField& x0,
                         const NoiseSource& noise, SimulateOptions opts = {});

}  // namespace rspde
