#pragma once

// Truncated spectral representation of the Gelfand triple V ⊆ H ⊆ V* on the
// periodic torus [0, 2π)^d, together with the radial projection onto the
// closed unit ball of H.
//
// Real fields are stored as coefficients with respect to the real orthonormal
// L² basis {1, √2 cos(k·x), √2 sin(k·x)} / √vol, one cos/sin pair per
// wavevector k of the half-space. This is the packed real form of the
// conjugate-symmetric complex Fourier coefficients: û_k = (a_k − i b_k)/√2.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rspde {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class BasisKind { Constant, Cosine, Sine };

struct BasisEntry {
  std::array<int, 3> k{};
  int component = 0;
  BasisKind kind = BasisKind::Constant;
  int k2 = 0;
};

// Per-mode weight families, as multipliers of the squared L² coefficient.
enum class Sobolev { L2, H1, H2 };

enum class VNormKind {
  Weighted,    // ‖f‖²_V = Σ v_k f_k²
  GradientLp,  // ‖f‖_V = (∫ |∇f|^p dx)^{1/p}, grid quadrature
};

struct TorusOptions {
  int dimension = 1;   // 1 or 3
  int components = 1;  // 1 (scalar) or 3 (vector field)
  int modes = 8;       // retained wavenumbers |k|_∞ ≤ modes
  bool zero_mean = false;
  Sobolev h = Sobolev::L2;
  Sobolev v = Sobolev::H1;
  VNormKind v_kind = VNormKind::Weighted;
  double p = 2.0;  // only for GradientLp
  double alpha = 2.0;
};

class SpectralGrid;

class SpaceSpec {
 public:
  // Grid-free ℝ^size with unit weights; size 1 is the scalar oracle space.
  static std::shared_ptr<const SpaceSpec> euclidean(std::size_t size,
                                                    double alpha = 2.0);
  static std::shared_ptr<const SpaceSpec> torus(const TorusOptions& opts);

  ~SpaceSpec();
  SpaceSpec(const SpaceSpec&) = delete;
  SpaceSpec& operator=(const SpaceSpec&) = delete;

  std::size_t size() const { return basis_.size(); }
  int dimension() const { return dimension_; }
  int components() const { return components_; }
  int modes() const { return modes_; }
  bool zero_mean() const { return zero_mean_; }
  double alpha() const { return alpha_; }
  double p() const { return p_; }
  VNormKind v_kind() const { return v_kind_; }
  double volume() const;

  const std::vector<BasisEntry>& basis() const { return basis_; }
  std::span<const double> h_weights() const { return h_weights_; }
  // Empty for GradientLp.
  std::span<const double> v_weights() const { return v_weights_; }

  // Index of the sin entry for a cos entry and vice versa; self for constants.
  std::size_t partner(std::size_t i) const { return partner_[i]; }

  // Index of the basis entry with the given wavevector, component and kind,
  // or size() if not retained.
  std::size_t find(std::array<int, 3> k, int component, BasisKind kind) const;

  // Lower bound c with ‖f‖_V ≥ c·|f|_H on the retained modes.
  double embedding_constant() const;

  const SpectralGrid* grid() const { return grid_.get(); }

 private:
  SpaceSpec() = default;
  void finalize();

  int dimension_ = 0;
  int components_ = 1;
  int modes_ = 0;
  bool zero_mean_ = false;
  double alpha_ = 2.0;
  double p_ = 2.0;
  VNormKind v_kind_ = VNormKind::Weighted;
  std::vector<BasisEntry> basis_;
  std::vector<double> h_weights_;
  std::vector<double> v_weights_;
  std::vector<std::size_t> partner_;
  std::unique_ptr<SpectralGrid> grid_;
};

using SpacePtr = std::shared_ptr<const SpaceSpec>;

class SpectralField {
 public:
  explicit SpectralField(SpacePtr space);
  SpectralField(SpacePtr space, std::vector<double> coeffs);

  static SpectralField unit(SpacePtr space, std::size_t index);

  const SpaceSpec& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  std::size_t size() const { return coeffs_.size(); }

  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double a);
  // this += a·x
  SpectralField& axpy(double a, const SpectralField& x);

  bool is_finite() const;
  bool is_zero() const;

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend bool operator==(const SpectralField& a, const SpectralField& b) {
    return a.space_ == b.space_ && a.coeffs_ == b.coeffs_;
  }

 private:
  SpacePtr space_;
  std::vector<double> coeffs_;
};

void require_same_space(const SpectralField& a, const SpectralField& b);

double inner_h(const SpectralField& f, const SpectralField& g);
double norm_h(const SpectralField& f);
double norm_v(const SpectralField& f);

// Coefficient contraction ⟨a, v⟩ with the H-Riesz identification, so that
// dual_pairing(a, v) == inner_h(a, v) whenever a ∈ H.
double dual_pairing(const SpectralField& a, const SpectralField& v);

// ‖a‖_{V*} for weighted V (exact, reciprocal weights). Throws ConfigError for
// GradientLp spaces; use hypotheses' sampled lower bound there.
double dual_norm(const SpectralField& a);

// π: H → closed unit ball.
SpectralField project_ball(const SpectralField& f);

struct PenaltyGap {
  SpectralField gap;    // f − π(f)
  double half_sq_dist;  // ½ dist(f, D̄)²
};
PenaltyGap penalty_gap(const SpectralField& f);

// 1-D helper: the cos (or constant, for k = 0) basis element of wavenumber k.
SpectralField cosine_mode(const SpacePtr& space, int k);
SpectralField sine_mode(const SpacePtr& space, int k);

}  // namespace rspde
