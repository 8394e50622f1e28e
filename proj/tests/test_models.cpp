#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "reflectspde/grid.hpp"
#include "reflectspde/models.hpp"
#include "reference_values.hpp"
#include "test_util.hpp"

using namespace rspde;
using testutil::trig;

namespace {

void expect_physical(const SpectralField& f, double (*g)(double), double tol) {
  const auto* grid = f.space().grid();
  auto vals = grid->to_physical(f.coeffs(), 0);
  for (std::size_t i = 0; i < vals.size(); ++i)
    EXPECT_NEAR(vals[i], g(grid->coordinate(i, 0)), tol) << "grid point " << i;
}

// u³ by direct convolution of the complex Fourier coefficients of u(x) =
// Σ c_k e^{ikx}, truncated back to the retained band.
SpectralField cube_by_convolution(const SpectralField& u) {
  const auto& s = u.space();
  const int K = s.modes();
  std::vector<std::complex<double>> c(2 * K + 1);
  const double r2pi = std::sqrt(2.0 * M_PI), two_rpi = 2.0 * std::sqrt(M_PI);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& b = s.basis()[i];
    const int k = b.k[0];
    if (b.kind == BasisKind::Constant) c[K] += u[i] / r2pi;
    if (b.kind == BasisKind::Cosine) {
      c[K + k] += u[i] / two_rpi;
      c[K - k] += u[i] / two_rpi;
    }
    if (b.kind == BasisKind::Sine) {
      c[K + k] += std::complex<double>(0, -u[i] / two_rpi);
      c[K - k] += std::complex<double>(0, u[i] / two_rpi);
    }
  }
  std::vector<std::complex<double>> cube(6 * K + 1);
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b)
      for (int d = -K; d <= K; ++d) cube[3 * K + a + b + d] += c[K + a] * c[K + b] * c[K + d];
  SpectralField out(u.space_ptr());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& b = s.basis()[i];
    const auto ck = cube[3 * K + b.k[0]];
    if (b.kind == BasisKind::Constant) out[i] = r2pi * ck.real();
    if (b.kind == BasisKind::Cosine) out[i] = two_rpi * ck.real();
    if (b.kind == BasisKind::Sine) out[i] = -two_rpi * ck.imag();
  }
  return out;
}

}  // namespace

TEST(AllenCahnDrift, Examples) {
  auto s = allen_cahn_space(8);
  auto two = trig(s, 0, false, 2.0);
  expect_physical(allen_cahn_drift(two), [](double) { return -6.0; }, 1e-12);
  expect_physical(allen_cahn_drift(trig(s, 1, true)),
                  [](double x) { return -(3.0 * std::sin(x) - std::sin(3.0 * x)) / 4.0; }, 1e-12);
  EXPECT_TRUE(allen_cahn_drift(SpectralField(s)).is_zero());
}

TEST(AllenCahnDrift, CubicMatchesDirectConvolution) {
  std::mt19937_64 gen(21);
  for (int modes : {1, 2, 5, 8}) {
    auto s = allen_cahn_space(modes);
    for (int rep = 0; rep < 5; ++rep) {
      auto u = testutil::random_field(s, gen, 1.5);
      SpectralField lap_plus_id(s);
      for (std::size_t i = 0; i < u.size(); ++i)
        lap_plus_id[i] = (1.0 - s->basis()[i].k2) * u[i];
      const auto cubic = lap_plus_id - allen_cahn_drift(u);
      EXPECT_LT(norm_h(cubic - cube_by_convolution(u)), 1e-10) << "modes " << modes;
    }
  }
}

TEST(PLaplacianDrift, Examples) {
  auto s = p_laplacian_space(8, 4.0);
  EXPECT_LT(norm_h(p_laplacian_drift(SpectralField(s), 4.0)), 1e-15);
  auto s2 = p_laplacian_space(8, 2.0);
  expect_physical(p_laplacian_drift(trig(s2, 1, true), 2.0),
                  [](double x) { return -std::sin(x); }, 1e-12);
  expect_physical(p_laplacian_drift(trig(s, 1, true), 4.0),
                  [](double x) { return -3.0 * std::cos(x) * std::cos(x) * std::sin(x); }, 1e-12);
}

TEST(Noise, AdditiveBranch) {
  auto s = SpaceSpec::euclidean(3);
  NoiseSpec n;
  n.q = {0.25, 0.1, 0.1};
  n.mu = 1.0;
  std::vector<double> dW{1.0, 0.0, 0.0};
  auto out = apply_noise(n, SpectralField(s), dW);
  EXPECT_DOUBLE_EQ(out[0], 0.5);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_EQ(out[2], 0.0);
}

TEST(Noise, ClampSaturates) {
  auto s = SpaceSpec::euclidean(3);
  NoiseSpec n;
  n.q = {0.25, 0.1, 0.1};
  n.lambda = 1.0;
  SpectralField u(s);
  u[0] = 2.0;
  std::vector<double> dW{0.3, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(apply_noise(n, u, dW)[0], 0.5 * 0.3);
  EXPECT_TRUE(apply_noise(n, u, std::vector<double>(3, 0.0)).is_zero());
  EXPECT_THROW(apply_noise(n, u, std::vector<double>(2, 0.0)), DimensionError);
}

TEST(DualPairing, Examples) {
  auto s = allen_cahn_space(4);
  auto e1 = cosine_mode(s, 1);
  EXPECT_DOUBLE_EQ(dual_pairing(e1, e1), 1.0);
  auto lap = linear_model(s, 1.0).drift(0.0, e1);
  EXPECT_DOUBLE_EQ(dual_pairing(lap, e1), -1.0);
  EXPECT_EQ(dual_pairing(SpectralField(s), e1), 0.0);
}

TEST(OracleDrift, Examples) {
  EXPECT_EQ(oracle_drift_1d(0.5, 1.0), 0.5);
  EXPECT_EQ(oracle_drift_1d(-0.5, 1.0), -0.5);
  EXPECT_EQ(oracle_drift_1d(0.7, 0.0), 0.0);
}

TEST(AllenCahnModel, DeclaredConstantsMatchReference) {
  auto s = allen_cahn_space(64);
  auto m = allen_cahn_model(64, testutil::ac_noise(*s, 129));
  EXPECT_NEAR(noise_hs_bound(m.noise_params, *m.space), ref::kAllenCahnNoiseBound, 1e-15);
  EXPECT_EQ(m.c0, ref::kAllenCahnC0);
  EXPECT_EQ(m.c, 2.0);
}

// Property: coercivity with c = 2 and the explicitly computed C0.
TEST(AllenCahnModel, CoercivityOnRandomFields) {
  auto s = allen_cahn_space(64);
  auto m = allen_cahn_model(64, testutil::ac_noise(*s, 129));
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> rad(0.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    auto u = testutil::random_field(s, gen, rad(gen));
    for (std::size_t j = 0; j < u.size(); ++j) u[j] /= std::max(1.0, std::sqrt(s->basis()[j].k2));
    const double lhs = 2.0 * dual_pairing(m.drift(0.0, u), u) + hs_norm2(m, u);
    const double nv = norm_v(u);
    const double rhs = ref::kAllenCahnC0 * (1.0 + inner_h(u, u)) - 2.0 * nv * nv;
    EXPECT_LE(lhs, rhs + 1e-9 * (1.0 + std::abs(rhs)));
  }
}

TEST(AllenCahnModel, ClampNoiseIsLipschitz) {
  auto s = allen_cahn_space(16);
  auto m = allen_cahn_model(16, testutil::ac_noise(*s, 33, 1.0));
  std::mt19937_64 gen(3);
  for (int i = 0; i < 500; ++i) {
    auto u = testutil::random_field(s, gen, 2.0), v = testutil::random_field(s, gen, 0.5);
    if (i % 3 == 0) v = u + testutil::random_field(s, gen, 0.01);
    EXPECT_LE(std::sqrt(hs_dist2(m, u, v)), std::sqrt(m.c0) * norm_h(u - v) + 1e-14);
  }
}

TEST(PLaplacianModel, MonotoneOnRandomPairs) {
  for (double p : {2.0, 3.0, 4.0}) {
    auto s = p_laplacian_space(16, p);
    std::mt19937_64 gen(static_cast<unsigned>(p * 10));
    for (int i = 0; i < 300; ++i) {
      auto u = testutil::random_field(s, gen, 1.0), v = testutil::random_field(s, gen, 2.0);
      const double m = dual_pairing(p_laplacian_drift(u, p) - p_laplacian_drift(v, p), u - v);
      EXPECT_LE(m, 1e-10) << "p = " << p;
    }
  }
}

TEST(Registry, NamesAndErrors) {
  const auto names = registered_models();
  EXPECT_EQ(names, (std::vector<std::string>{"allen_cahn", "p_laplacian", "oracle_1d", "tamed_nse"}));
  for (const auto& n : names) EXPECT_NO_THROW(make_model(n, {}));
  EXPECT_THROW(make_model("heat", {}), ConfigError);
  ModelParams bad;
  bad.values["K"] = 1e6;
  EXPECT_THROW(make_model("allen_cahn", bad), ConfigError);
}

TEST(ModelValidate, RejectsLipschitzAboveC0) {
  auto s = allen_cahn_space(4);
  auto m = allen_cahn_model(4, NoiseSpec::with_decay(*s, 9, 1.0, 0.0, 0.0, 1.0));
  m.c0 = 0.5;
  EXPECT_THROW(m.validate(), ConfigError);
}
