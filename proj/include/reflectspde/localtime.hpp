#pragma once

// Accounting for the reflection measure of a simulated path: total variation,
// the discrete variational inequality Σ (φ − X, ΔL), and how much reflection
// mass is spent away from the sphere.

#include <cstdint>
#include <span>
#include <vector>

#include "reflectspde/hilbert.hpp"
#include "reflectspde/models.hpp"
#include "reflectspde/penalize.hpp"

namespace rspde {

double total_variation(std::span<const SpectralField> increments);
double total_variation(const PathRecord& path);

// Σ_j (φ_j − X_j, ΔL_j), left endpoints. test has one entry per time point
// (steps + 1; the last is unused). Throws std::invalid_argument if some
// |φ_j| > 1.
double variational_gap(const PathRecord& path, std::span<const SpectralField> test);

// The same sum with φ_j = π(X_j).
double shadow_gap(const PathRecord& path);

// (1 − δ − r)² for r < 1 − δ, else 0.
double psi_bump(double r, double delta);
// Σ_j ψ_δ(|X_j|)·|ΔL_j|. Needs 0 < δ < 1.
double boundary_leak(const PathRecord& path, double delta);

// Ball-valued test paths φ_p(t) = Σ_i c_{p,i}(t) d_i over a few H-orthonormal
// directions d_i shared by the whole family. Members 0, 1, 2 are the constants
// 0, d_0 and −d_0; the rest are random trigonometric curves rescaled into the
// ball.
class TestPathFamily {
 public:
  std::size_t count() const { return coef_.size(); }
  std::size_t directions() const { return dirs_.size(); }
  const std::vector<double>& times() const { return times_; }
  const SpectralField& direction(std::size_t i) const { return dirs_[i]; }

  double coefficient(std::size_t p, std::size_t i, std::size_t j) const {
    return coef_[p][i * times_.size() + j];
  }
  SpectralField value(std::size_t p, std::size_t j) const;
  std::vector<SpectralField> path(std::size_t p) const;
  double max_norm(std::size_t p) const;

  // Gap of every member against one path, sharing the per-step projections.
  std::vector<double> gaps(const PathRecord& path) const;

 private:
  friend TestPathFamily make_test_paths(std::uint64_t, std::size_t, std::span<const double>,
                                        const SpacePtr&, const ProjectFn&);
  std::vector<double> times_;
  std::vector<SpectralField> dirs_;
  std::vector<std::vector<double>> coef_;
};

// `constrain` (optional) maps basis vectors to admissible directions, e.g.
// the Leray projection.
TestPathFamily make_test_paths(std::uint64_t seed, std::size_t count,
                               std::span<const double> times, const SpacePtr& space,
                               const ProjectFn& constrain = {});

struct ReflectionSummary {
  double total_variation = 0.0;
  std::vector<double> masses;
  // Histogram of |X_j| weighted by |ΔL_j| on [0, profile_max), last bin open.
  std::vector<double> support_profile;
  double profile_max = 2.0;
};

ReflectionSummary summarize(const PathRecord& path, std::size_t bins = 40,
                            double profile_max = 2.0);

}  // namespace rspde
