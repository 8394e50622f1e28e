// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "reflectspde/experiment.hpp"
#include "reflectspde/hypotheses.hpp"
#include "reflectspde/localtime.hpp"
#include "reflectspde/montecarlo.hpp"

using namespace rspde;
namespace fs = std::filesystem;

namespace {

int failed = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  if (!ok) ++failed;
  fmt::print("criterion {:2d} {} {}: {}\n", id, ok ? "PASS" : "FAIL", title, detail);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_min_ratio(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0 ? *hi / *lo : INFINITY;
}

int inversions(const std::vector<double>& v) {
  int k = 0;
  for (std::size_t i = 1; i < v.size(); ++i) k += v[i] >= v[i - 1];
  return k;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += fmt::format("{}{:.4g}", s.empty() ? "" : " ", x);
  return "[" + s + "]";
}

ExperimentConfig config(const char* name) { return load_config(fs::path(CONFIG_DIR) / name); }

void projection_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(20240601);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> rad(0.0, 3.0);
  std::uniform_int_distribution<int> dim(1, 128);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    auto s = SpaceSpec::euclidean(dim(gen));
    auto draw = [&](double r) {
      SpectralField f(s);
      for (auto& c : f.coeffs()) c = nd(gen);
      return f * (r / norm_h(f));
    };
    auto x = draw(rad(gen)), y = draw(rad(gen));
    auto px = project_ball(x), py = project_ball(y), g = x - px;
    worst = std::max(worst, norm_h(px - py) - norm_h(x - y));
    worst = std::max(worst, std::abs(inner_h(px, g) - norm_h(g)));
    worst = std::max(worst, std::abs(inner_h(x, g) - norm_h(x) * norm_h(g)));
    worst = std::max(worst, -inner_h(x - py, g));
    worst = std::max(worst, norm_h(project_ball(px) - px));
  }
  const double t = seconds_since(t0);
  report(1, "projection suite", worst <= 1e-10 && t < 1.0,
         fmt::format("10^4 pairs, dims 1..128, worst defect {:.3g}, {:.2f} s", worst, t));
}

void hypothesis_audit() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = true;
  for (const char* cfgname : {"allen_cahn_desk.cfg", "p_laplacian.cfg"}) {
    auto cfg = config(cfgname);
    auto m = build_model(cfg);
    auto reps = audit_all(m, FieldSampler::for_model(m, cfg.scheme.seed), 1000);
    std::size_t v = 0;
    for (const auto& r : reps) v += r.violations;
    ok &= v == 0;
    detail += fmt::format("{} violations {}; ", cfg.model_name, v);
  }
  auto tc = config("tamed_nse.cfg");
  auto tm = build_model(tc);
  auto sampler = FieldSampler::for_model(tm, tc.scheme.seed);
  const std::size_t n = tc.hypothesis_count;
  using Check = AuditReport (*)(const ModelSpec&, const FieldSampler&, std::size_t, const AuditOptions&);
  const std::pair<const char*, Check> checks[] = {
      {"H3", check_coercivity}, {"H4", check_growth}, {"H5", check_lipschitz}};
  for (const auto& [id, fn] : checks) {
    auto a = fn(tm, sampler, n, {}), b = fn(tm, sampler, 2 * n, {});
    const double r = a.constant / b.constant;
    const bool stable = r >= 0.5 && r <= 2.0;
    ok &= stable && b.violations == 0;
    detail += fmt::format("tamed {} C {:.4g}->{:.4g} viol {}; ", id, a.constant, b.constant,
                          b.violations);
  }
  const double t = seconds_since(t0);
  ok &= t < 120.0;
  report(2, "hypothesis audit", ok, detail + fmt::format("{:.1f} s", t));
}

void oracle_1d() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& o = config("allen_cahn_desk.cfg").oracle;
  const std::size_t steps = static_cast<std::size_t>(std::lround(o.T / o.dt));
  auto m = oracle_1d_model(o.kappa, 0.0);
  SchemeConfig det{.dt = o.dt, .steps = steps, .n = 1000, .method = o.method, .seed = 1};
  const double xt = simulate_path(m, det, SpectralField(m.space, {0.5}), 0).states.back()[0];
  const double eq = 1.0 + o.kappa / (1000.0 - o.kappa);
  SchemeConfig noisy{.dt = o.dt, .steps = steps, .n = 0, .method = o.method, .seed = 1};
  auto rows = oracle_compare_1d(o.kappa, o.sigma, o.x0, noisy, o.n_grid, o.paths);
  std::vector<double> sup;
  for (const auto& r : rows) sup.push_back(r.sup_diff.mean);
  bool decreasing = true;
  for (std::size_t i = 1; i < sup.size(); ++i) decreasing &= sup[i] < sup[i - 1];
  const double t = seconds_since(t0);
  report(3, "1-D oracle equivalence", std::abs(xt - eq) <= 2e-3 && decreasing && t < 120,
         fmt::format("|X_T - equilibrium| {:.3g}; E sup diff over n {} = {}; {:.1f} s", std::abs(xt - eq),
                     list(o.n_grid), list(sup), t));
}

void desk_run() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = config("allen_cahn_desk.cfg");
  auto m = build_model(cfg);
  auto x0 = build_initial_state(m, cfg);
  auto e = build_ensemble(cfg, 1);
  e.cauchy = e.inequality = true;
  auto res = run_ensemble(m, x0, e);
  const double t = seconds_since(t0);
  std::vector<double> sup4, wpen, var2, venergy, pen4, cauchy;
  for (const auto& r : res.estimates) {
    sup4.push_back(r.sup4.mean);
    wpen.push_back(r.weighted_pen.mean);
    var2.push_back(r.var2.mean);
    venergy.push_back(r.v_energy.mean);
    pen4.push_back(r.pen_sup4.mean);
  }
  for (const auto& r : res.cauchy) cauchy.push_back(r.supdiff2.mean);
  const std::string fails = fmt::format("{} failed paths, {:.0f} s", res.total_failures(), t);
  const bool clean = res.total_failures() == 0;

  report(4, "penetration bounds", clean && t < 600 && max_min_ratio(sup4) <= 3 && max_min_ratio(wpen) <= 3,
         fmt::format("sup4 {} ratio {:.3g}; n*weighted {} ratio {:.3g}; {}", list(sup4),
                     max_min_ratio(sup4), list(wpen), max_min_ratio(wpen), fails));
  report(5, "uniform variation and energy", clean && max_min_ratio(var2) <= 3 && max_min_ratio(venergy) <= 3,
         fmt::format("var2 {} ratio {:.3g}; v_energy {} ratio {:.3g}", list(var2), max_min_ratio(var2),
                     list(venergy), max_min_ratio(venergy)));
  report(6, "penetration vanishes", clean && inversions(pen4) <= 1 && pen4.back() < pen4.front() / 10,
         fmt::format("pen_sup4 {} inversions {}", list(pen4), inversions(pen4)));
  report(7, "coupled Cauchy study", clean && inversions(cauchy) <= 1 && cauchy.back() < cauchy.front() / 4,
         fmt::format("supdiff2 {} inversions {}", list(cauchy), inversions(cauchy)));

  double worst_rel = INFINITY, worst_shadow = INFINITY;
  std::vector<double> leak_ratio;
  for (double n : e.n_grid) {
    double tv = 0, leak = 0;
    for (const auto& r : res.inequality) {
      if (r.n != n) continue;
      tv += r.total_variation;
      leak += r.boundary_leak;
      worst_rel = std::min(worst_rel, r.min_gap / std::max(r.total_variation, 1e-300));
      worst_shadow = std::min(worst_shadow, r.shadow_gap);
    }
    leak_ratio.push_back(tv > 0 ? leak / tv : 0.0);
  }
  report(8, "variational inequality", worst_rel >= -1e-3 && worst_shadow >= -1e-15,
         fmt::format("{} test paths; worst min_gap/TV {:.3g}; worst shadow gap {:.3g}", e.test_paths,
                     worst_rel, worst_shadow));
  int leak_inv = 0;
  for (std::size_t i = 1; i < leak_ratio.size(); ++i) leak_inv += leak_ratio[i] > leak_ratio[i - 1];
  report(9, "boundary support", leak_ratio.back() < 0.05 && leak_inv <= 1,
         fmt::format("leak/TV (delta {}) {} inversions {}", e.delta, list(leak_ratio), leak_inv));
}

void uniqueness() {
  auto cfg = config("allen_cahn_desk.cfg");
  auto m = build_model(cfg);
  SchemeConfig sc = cfg.scheme;
  sc.n = 256;
  auto twin = uniqueness_check(m, sc, build_initial_state(m, cfg), 0.0);
  auto lin = oracle_1d_model(-1.0, 0.1);
  SchemeConfig lc{.dt = 1e-3, .steps = 1000, .n = 100, .method = Method::Explicit, .seed = 1};
  const double pert = 1e-3;
  auto rep = uniqueness_check(lin, lc, SpectralField(lin.space, {0.2}), pert);
  const double exact = pert * std::pow(1.0 - lc.dt, static_cast<double>(lc.steps));
  const double err = std::abs(rep.terminal_diff - exact);
  report(10, "uniqueness", twin.bitwise_identical && err <= 1e-9,
         fmt::format("twin runs bitwise {}; contraction {:.12g} vs exact {:.12g} (error {:.2g})",
                     twin.bitwise_identical, rep.terminal_diff, exact, err));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void reproducibility() {
  const auto base = fs::temp_directory_path() / "reflectspde_acceptance";
  fs::remove_all(base);
  auto cfg = config("minimal.cfg");
  std::ostringstream log;
  bool ok = true;
  std::size_t files = 0;
  for (const auto& sub : subcommands()) {
    const fs::path a = base / (sub + "_t1"), b = base / (sub + "_t1_again"), c = base / (sub + "_t4");
    ok &= run_experiment(cfg, sub, {.out_dir = a, .seed = {}, .threads = 1}, log) == 0;
    ok &= run_experiment(cfg, sub, {.out_dir = b, .seed = {}, .threads = 1}, log) == 0;
    ok &= run_experiment(cfg, sub, {.out_dir = c, .seed = {}, .threads = 4}, log) == 0;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file()) continue;
      ++files;
      const auto rel = fs::relative(e.path(), a);
      const auto bytes = slurp(e.path());
      ok &= bytes == slurp(b / rel) && bytes == slurp(c / rel);
    }
    ok &= verify_manifest(a, log);
  }
  report(11, "reproducibility", ok, fmt::format("{} artifacts compared across reruns and --threads 1/4", files));
  fs::remove_all(base);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> parts = {
      {"projection", projection_suite}, {"hypotheses", hypothesis_audit}, {"oracle", oracle_1d},
      {"desk", desk_run},             {"uniqueness", uniqueness},      {"reproducibility", reproducibility}};
  for (const auto& [name, fn] : parts) {
    try {
      fn();
    } catch (const std::exception& e) {
      ++failed;
      fmt::print("error in {} stage: {}\n", name, e.what());
    }
  }
  fmt::print("{} criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
