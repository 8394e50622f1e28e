#include <gtest/gtest.h>

#include <cmath>

#include "reflectspde/experiment.hpp"
#include "reflectspde/models.hpp"
#include "reflectspde/montecarlo.hpp"
#include "reference_values.hpp"
#include "test_util.hpp"

using namespace rspde;

namespace {

ModelSpec allen_cahn(int modes) {
  auto s = allen_cahn_space(modes);
  return allen_cahn_model(modes, testutil::ac_noise(*s, 2 * modes + 1));
}

SpectralField ac_start(const ModelSpec& m) {
  SpectralField x(m.space);
  x[0] = 0.7;
  x[1] = std::sqrt(0.51);
  return x;
}

EnsembleSpec small_spec(std::vector<double> grid, std::size_t paths, double dt, std::size_t steps) {
  EnsembleSpec e;
  e.scheme = {.dt = dt, .steps = steps, .n = 1, .method = Method::Explicit, .seed = 8};
  e.n_grid = std::move(grid);
  e.paths = paths;
  e.batches = std::min<std::size_t>(10, paths);
  return e;
}

}  // namespace

TEST(BatchStat, KnownSamples) {
  std::vector<double> v(20);
  for (int i = 0; i < 20; ++i) v[i] = i + 1;
  auto s = batch_stat(v, 10);
  EXPECT_DOUBLE_EQ(s.mean, 10.5);
  EXPECT_NEAR(s.se, std::sqrt(11.0 / 3.0), 1e-14);
  EXPECT_EQ(batch_stat({}, 10).mean, 0.0);
}

TEST(Estimates, ZeroForStillModel) {
  auto m = testutil::still_model(allen_cahn_space(4));
  SpectralField x0(m.space);
  x0[1] = 0.3;
  auto rows = run_estimates(m, x0, small_spec({1, 10, 100}, 4, 1e-3, 100));
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.weighted_pen.mean, 0.0);
    EXPECT_EQ(r.var2.mean, 0.0);
    EXPECT_EQ(r.pen_l2.mean, 0.0);
    EXPECT_EQ(r.pen_sup4.mean, 0.0);
    EXPECT_EQ(r.failures, 0u);
  }
}

TEST(Estimates, OutwardDriftVariationConvergesToOracle) {
  auto m = oracle_1d_model(1.0, 0.0);
  auto rows = run_estimates(m, SpectralField(m.space, {0.5}), small_spec({100, 1000, 10000}, 2, 1e-4, 10000));
  const double refs[] = {ref::kOutward[0].var2, ref::kOutward[2].var2, ref::kOutward[5].var2};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].var2.mean, rows[0].var2.mean, 0.05 * rows[0].var2.mean);
    EXPECT_NEAR(rows[i].var2.mean, refs[i], 2e-3 * refs[i]);
  }
}

TEST(Cauchy, DuplicateLevelsGiveZero) {
  auto m = allen_cahn(8);
  auto rows = cauchy_study(m, ac_start(m), small_spec({16, 16}, 4, 1e-3, 200));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].supdiff2.mean, 0.0);
}

TEST(Cauchy, OutwardDriftShrinksPerLevel) {
  auto m = oracle_1d_model(1.0, 0.0);
  auto rows = cauchy_study(m, SpectralField(m.space, {0.5}),
                           small_spec({100, 400, 1600, 6400}, 2, 1e-4, 10000));
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].supdiff2.mean, ref::kOutwardCauchy[i], 0.05 * ref::kOutwardCauchy[i]);
    if (i > 0) EXPECT_LE(std::sqrt(rows[i].supdiff2.mean), std::sqrt(rows[i - 1].supdiff2.mean) / 2);
  }
}

TEST(Ensemble, ThreadCountDoesNotChangeResults) {
  auto m = allen_cahn(8);
  auto e = small_spec({1, 16, 256}, 12, 1e-3, 200);
  e.cauchy = e.inequality = true;
  e.test_paths = 10;
  auto a = run_ensemble(m, ac_start(m), e);
  e.threads = 4;
  auto b = run_ensemble(m, ac_start(m), e);
  EXPECT_EQ(estimates_csv(a.estimates), estimates_csv(b.estimates));
  EXPECT_EQ(cauchy_csv(a.cauchy), cauchy_csv(b.cauchy));
  EXPECT_EQ(inequality_csv(a.inequality), inequality_csv(b.inequality));
  EXPECT_EQ(a.inequality.size(), 3u * 12u);
}

TEST(Ensemble, CommonNoiseAcrossLevels) {
  auto m = allen_cahn(4);
  std::vector<std::vector<double>> seen[2];
  for (int lvl = 0; lvl < 2; ++lvl) {
    auto base = keyed_noise(8, 3, 1e-3);
    NoiseSource spy = [&, lvl](std::size_t j, std::span<double> dW) {
      base(j, dW);
      seen[lvl].emplace_back(dW.begin(), dW.end());
    };
    SchemeConfig cfg{.dt = 1e-3, .steps = 50, .n = lvl == 0 ? 1.0 : 256.0,
                     .method = Method::Explicit, .seed = 8};
    simulate_path(m, cfg, ac_start(m), spy);
  }
  EXPECT_EQ(seen[0], seen[1]);
  EXPECT_EQ(seen[0].size(), 50u);
}

TEST(Ensemble, SeedChangeWithinThreeStandardErrors) {
  auto m = allen_cahn(8);
  auto e = small_spec({4, 64}, 40, 1e-3, 300);
  auto a = run_estimates(m, ac_start(m), e);
  e.scheme.seed = 99;
  auto b = run_estimates(m, ac_start(m), e);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double tol = 3.0 * std::hypot(a[i].sup4.se, b[i].sup4.se);
    EXPECT_NEAR(a[i].sup4.mean, b[i].sup4.mean, tol);
    const double tol2 = 3.0 * std::hypot(a[i].v_energy.se, b[i].v_energy.se);
    EXPECT_NEAR(a[i].v_energy.mean, b[i].v_energy.mean, tol2);
  }
}

TEST(Ensemble, RejectsBadSpecs) {
  auto m = allen_cahn(4);
  auto e = small_spec({1}, 1, 1e-3, 10);
  EXPECT_THROW(run_estimates(m, ac_start(m), e), ConfigError);
  e.paths = 4;
  e.cauchy = true;
  EXPECT_THROW(run_ensemble(m, ac_start(m), e), ConfigError);
}

TEST(Uniqueness, ZeroPerturbationIsBitwise) {
  auto m = allen_cahn(16);
  SchemeConfig cfg{.dt = 1e-3, .steps = 500, .n = 64, .method = Method::Explicit, .seed = 1};
  auto rep = uniqueness_check(m, cfg, ac_start(m), 0.0);
  EXPECT_TRUE(rep.bitwise_identical);
  EXPECT_EQ(rep.sup_diff, 0.0);
}

TEST(Uniqueness, LinearContraction) {
  auto m = oracle_1d_model(-1.0, 0.1);
  SchemeConfig cfg{.dt = 1e-3, .steps = 1000, .n = 100, .method = Method::Explicit, .seed = 1};
  auto rep = uniqueness_check(m, cfg, SpectralField(m.space, {0.2}), 1e-3);
  EXPECT_LE(rep.terminal_diff, 1e-3);
  EXPECT_NEAR(rep.terminal_diff, ref::kContractedEuler, 1e-9 * ref::kContractedEuler);
  EXPECT_NEAR(rep.terminal_diff, ref::kContractedOde, 1e-3 * ref::kContractedOde);
}

TEST(Uniqueness, AllenCahnStability) {
  auto m = allen_cahn(64);
  SchemeConfig cfg{.dt = 1e-3, .steps = 1000, .n = 64, .method = Method::Explicit, .seed = 1};
  auto rep = uniqueness_check(m, cfg, ac_start(m), 1e-6);
  EXPECT_LE(rep.sup_diff, 1e-2);
  EXPECT_GT(rep.sup_diff, 0.0);
}

TEST(Oracle1d, StillSystemHasNoDifference) {
  SchemeConfig cfg{.dt = 1e-3, .steps = 500, .n = 0, .method = Method::Explicit, .seed = 1};
  auto rows = oracle_compare_1d(0.0, 0.0, 0.3, cfg, {10, 100}, 4);
  for (const auto& r : rows) {
    EXPECT_EQ(r.sup_diff.mean, 0.0);
    EXPECT_EQ(r.terminal_diff.mean, 0.0);
  }
}

TEST(Oracle1d, EquilibriumOffset) {
  SchemeConfig cfg{.dt = 1e-4, .steps = 10000, .n = 0, .method = Method::Explicit, .seed = 1};
  auto rows = oracle_compare_1d(1.0, 0.0, 0.5, cfg, {100, 1000}, 2);
  for (const auto& r : rows) EXPECT_NEAR(r.terminal_diff.mean, 1.0 / (r.n - 1.0), 1e-3 / r.n);
}

TEST(Oracle1d, NoisySupDifferenceDecreases) {
  SchemeConfig cfg{.dt = 1e-3, .steps = 1000, .n = 0, .method = Method::Explicit, .seed = 1};
  auto rows = oracle_compare_1d(1.0, 0.5, 0.0, cfg, {10, 100, 1000}, 100, 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_GT(rows[0].sup_diff.mean, rows[1].sup_diff.mean);
  EXPECT_GT(rows[1].sup_diff.mean, rows[2].sup_diff.mean);
}
