#pragma once

// Ensembles of penalized paths on common random numbers: every path index
// consumes the same Brownian increments at every penalization level n.

#include <cstdint>
#include <vector>

#include "reflectspde/hilbert.hpp"
#include "reflectspde/localtime.hpp"
#include "reflectspde/models.hpp"
#include "reflectspde/penalize.hpp"

namespace rspde {

struct Stat {
  double mean = 0.0;
  double se = 0.0;
};

struct EnsembleSpec {
  SchemeConfig scheme;  // scheme.n is overridden by each grid level
  std::vector<double> n_grid{1, 4, 16, 64, 256};
  std::size_t paths = 2;
  std::size_t batches = 10;
  int threads = 1;

  bool cauchy = false;
  bool inequality = false;
  std::size_t test_paths = 200;
  double delta = 0.1;

  void validate() const;
};

struct EstimateRow {
  double n = 0.0;
  Stat sup4;          // E sup_t |X|⁴
  Stat weighted_pen;  // n E ∫ |X|² (X, X − π(X)) dt
  Stat var2;          // E (n ∫ |X − π(X)| dt)²
  Stat pen_l2;        // n E ∫ |X − π(X)|² dt
  Stat v_energy;      // E ∫ ‖X‖_V^α dt
  Stat pen_sup4;      // E sup_t |X − π(X)|⁴
  std::size_t failures = 0;
};

struct CauchyRow {
  double n_lo = 0.0;
  double n_hi = 0.0;
  Stat supdiff2;  // E sup_t |X^{n_lo} − X^{n_hi}|²
  std::size_t failures = 0;
};

struct InequalityRow {
  double n = 0.0;
  std::size_t path_index = 0;
  double total_variation = 0.0;
  double min_gap = 0.0;  // over the test family
  double boundary_leak = 0.0;
  double shadow_gap = 0.0;
};

struct EnsembleResult {
  std::vector<EstimateRow> estimates;
  std::vector<CauchyRow> cauchy;
  std::vector<InequalityRow> inequality;  // ordered by (n, path_index), failures omitted
  std::size_t total_failures() const;
};

// Paths run in parallel; the reduction is ordered by (n, path index) so the
// result does not depend on the thread count.
EnsembleResult run_ensemble(const ModelSpec& model, const SpectralField& x0,
                            const EnsembleSpec& spec);

std::vector<EstimateRow> run_estimates(const ModelSpec& model, const SpectralField& x0,
                                       const EnsembleSpec& spec);
// Needs ≥ 2 grid levels.
std::vector<CauchyRow> cauchy_study(const ModelSpec& model, const SpectralField& x0,
                                    const EnsembleSpec& spec);

// Batch-means estimate: the samples are split into `batches` contiguous blocks.
Stat batch_stat(const std::vector<double>& samples, std::size_t batches);

struct UniquenessReport {
  double perturbation = 0.0;
  double sup_diff = 0.0;       // max_j |X_j − X'_j|
  double terminal_diff = 0.0;  // |X_T − X'_T|
  double stability = 0.0;      // sup_diff / perturbation (0 if perturbation = 0)
  bool bitwise_identical = false;
};

// Twin runs on identical noise from x0 and from x0 moved radially (inwards
// if the outward move would leave the ball) by `perturbation`.
UniquenessReport uniqueness_check(const ModelSpec& model, const SchemeConfig& cfg,
                                  const SpectralField& x0, double perturbation,
                                  std::uint64_t path_index = 0);

struct OracleRow {
  double n = 0.0;
  Stat sup_diff;       // E sup_t |X^n − X^oracle|
  Stat local_time_diff;  // E |Var(L^n) − Var(L^oracle)|
  Stat terminal_diff;  // E |X^n_T − X^oracle_T|
};

// Projected Euler oracle on H = ℝ, D̄ = [−1, 1]:
//   X' = clamp(X + κX dt + σ dW), local time increment = clamp displacement.
struct OraclePath {
  std::vector<double> states;
  double local_time_variation = 0.0;
};
OraclePath projected_euler_1d(double kappa, double sigma, double x0, double dt,
                              std::size_t steps, const NoiseSource& noise);

std::vector<OracleRow> oracle_compare_1d(double kappa, double sigma, double x0,
                                         const SchemeConfig& cfg,
                                         const std::vector<double>& n_grid, std::size_t paths,
                                         int threads = 1);

}  // namespace rspde
