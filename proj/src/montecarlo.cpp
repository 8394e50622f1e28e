#include "reflectspde/montecarlo.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace rspde {

void EnsembleSpec::validate() const {
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  if (paths < 2) throw ConfigError("ensembles need at least 2 paths");
  if (batches < 1) throw ConfigError("batches must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (cauchy && n_grid.size() < 2) throw ConfigError("the Cauchy study needs >= 2 grid levels");
  if (inequality && test_paths < 1) throw ConfigError("test_paths must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  for (double n : n_grid) {
    SchemeConfig c = scheme;
    c.n = n;
    c.validate();
  }
}

std::size_t EnsembleResult::total_failures() const {
  std::size_t f = 0;
  for (const auto& r : estimates) f += r.failures;
  return f;
}

Stat batch_stat(const std::vector<double>& samples, std::size_t batches) {
  Stat s;
  const std::size_t m = samples.size();
  if (m == 0) return s;
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(m);
  const std::size_t b = std::min(batches, m);
  if (b < 2) return s;
  std::vector<double> means(b, 0.0);
  for (std::size_t k = 0; k < b; ++k) {
    const std::size_t lo = k * m / b;
    const std::size_t hi = (k + 1) * m / b;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += samples[i];
    means[k] = acc / static_cast<double>(hi - lo);
  }
  double var = 0.0;
  for (double v : means) var += (v - s.mean) * (v - s.mean);
  var /= static_cast<double>(b - 1);
  s.se = std::sqrt(var / static_cast<double>(b));
  return s;
}

namespace {

struct LevelSample {
  bool ok = false;
  double sup4 = 0, weighted_pen = 0, var2 = 0, pen_l2 = 0, v_energy = 0, pen_sup4 = 0;
  double tv = 0, min_gap = 0, leak = 0, shadow = 0;
};

struct PathSample {
  std::vector<LevelSample> levels;
  std::vector<std::optional<double>> supdiff2;  // consecutive pairs
};

double sup_diff2(const std::vector<SpectralField>& a, const std::vector<SpectralField>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = norm_h(a[j] - b[j]);
    m = std::max(m, d * d);
  }
  return m;
}

PathSample run_one(const ModelSpec& model, const SpectralField& x0, const EnsembleSpec& spec,
                   const TestPathFamily* family, std::size_t p) {
  PathSample out;
  const std::size_t L = spec.n_grid.size();
  out.levels.resize(L);
  out.supdiff2.resize(L > 0 ? L - 1 : 0);
  const bool keep = spec.cauchy || spec.inequality;
  std::optional<std::vector<SpectralField>> prev;
  for (std::size_t l = 0; l < L; ++l) {
    SchemeConfig cfg = spec.scheme;
    cfg.n = spec.n_grid[l];
    std::optional<PathRecord> rec;
    try {
      rec = simulate_path(model, cfg, x0, p, {.keep_states = keep});
    } catch (const BlowUpError&) {
      prev.reset();
      continue;
    }
    const double n = cfg.n;
    LevelSample& s = out.levels[l];
    s.ok = true;
    s.sup4 = std::pow(rec->sup_h, 4);
    s.weighted_pen = n * rec->weighted_pen;
    s.var2 = (n * rec->pen_l1) * (n * rec->pen_l1);
    s.pen_l2 = n * rec->pen_l2;
    s.v_energy = rec->v_energy;
    s.pen_sup4 = std::pow(rec->sup_gap, 4);
    s.tv = rec->total_variation;
    if (spec.inequality) {
      const auto g = family->gaps(*rec);
      s.min_gap = *std::min_element(g.begin(), g.end());
      s.leak = boundary_leak(*rec, spec.delta);
      s.shadow = shadow_gap(*rec);
    }
    if (spec.cauchy) {
      if (prev && l > 0) out.supdiff2[l - 1] = sup_diff2(*prev, rec->states);
      prev = std::move(rec->states);
    }
  }
  return out;
}

}  // namespace

EnsembleResult run_ensemble(const ModelSpec& model, const SpectralField& x0,
                            const EnsembleSpec& spec) {
  spec.validate();
  const std::size_t M = spec.paths;
  const std::size_t L = spec.n_grid.size();

  std::optional<TestPathFamily> family;
  if (spec.inequality) {
    std::vector<double> times(spec.scheme.steps + 1);
    for (std::size_t j = 0; j < times.size(); ++j)
      times[j] = spec.scheme.dt * static_cast<double>(j);
    family = make_test_paths(spec.scheme.seed, spec.test_paths, times, model.space,
                             model.constrain);
  }

  std::vector<PathSample> samples(M);
  std::optional<std::string> error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(spec.threads)
  for (std::size_t p = 0; p < M; ++p) {
    try {
      samples[p] = run_one(model, x0, spec, family ? &*family : nullptr, p);
    } catch (const std::exception& e) {
#pragma omp critical
      if (!error) error = e.what();
    }
  }
  if (error) throw std::runtime_error(*error);

  EnsembleResult res;
  for (std::size_t l = 0; l < L; ++l) {
    EstimateRow row;
    row.n = spec.n_grid[l];
    std::vector<double> a, b, c, d, e, f;
    for (std::size_t p = 0; p < M; ++p) {
      const LevelSample& s = samples[p].levels[l];
      if (!s.ok) {
        ++row.failures;
        continue;
      }
      a.push_back(s.sup4);
      b.push_back(s.weighted_pen);
      c.push_back(s.var2);
      d.push_back(s.pen_l2);
      e.push_back(s.v_energy);
      f.push_back(s.pen_sup4);
      if (spec.inequality)
        res.inequality.push_back({row.n, p, s.tv, s.min_gap, s.leak, s.shadow});
    }
    row.sup4 = batch_stat(a, spec.batches);
    row.weighted_pen = batch_stat(b, spec.batches);
    row.var2 = batch_stat(c, spec.batches);
    row.pen_l2 = batch_stat(d, spec.batches);
    row.v_energy = batch_stat(e, spec.batches);
    row.pen_sup4 = batch_stat(f, spec.batches);
    res.estimates.push_back(row);
  }
  if (spec.cauchy) {
    for (std::size_t l = 0; l + 1 < L; ++l) {
      CauchyRow row{spec.n_grid[l], spec.n_grid[l + 1], {}, 0};
      std::vector<double> v;
      for (std::size_t p = 0; p < M; ++p) {
        const auto& d = samples[p].supdiff2[l];
        if (d) {
          v.push_back(*d);
        } else {
          ++row.failures;
        }
      }
      row.supdiff2 = batch_stat(v, spec.batches);
      res.cauchy.push_back(row);
    }
  }
  return res;
}

std::vector<EstimateRow> run_estimates(const ModelSpec& model, const SpectralField& x0,
                                       const EnsembleSpec& spec) {
  EnsembleSpec s = spec;
  s.cauchy = false;
  s.inequality = false;
  return run_ensemble(model, x0, s).estimates;
}

std::vector<CauchyRow> cauchy_study(const ModelSpec& model, const SpectralField& x0,
                                    const EnsembleSpec& spec) {
  EnsembleSpec s = spec;
  s.cauchy = true;
  s.inequality = false;
  return run_ensemble(model, x0, s).cauchy;
}

UniquenessReport uniqueness_check(const ModelSpec& model, const SchemeConfig& cfg,
                                  const SpectralField& x0, double perturbation,
                                  std::uint64_t path_index) {
  if (!(perturbation >= 0.0)) throw std::invalid_argument("perturbation must be >= 0");
  SpectralField x1 = x0;
  if (perturbation > 0.0) {
    const double r = norm_h(x0);
    SpectralField dir(x0.space_ptr());
    if (r > 0.0) {
      dir = x0 * (1.0 / r);
    } else {
      dir = SpectralField::unit(x0.space_ptr(), 0);
      dir = model.admissible(dir);
      dir *= 1.0 / norm_h(dir);
    }
    const double sign = r + perturbation <= 1.0 ? 1.0 : -1.0;
    x1.axpy(sign * perturbation, dir);
  }
  const PathRecord a = simulate_path(model, cfg, x0, path_index);
  const PathRecord b = simulate_path(model, cfg, x1, path_index);
  UniquenessReport rep;
  rep.perturbation = perturbation;
  rep.bitwise_identical = true;
  for (std::size_t j = 0; j < a.states.size(); ++j) {
    const double d = norm_h(a.states[j] - b.states[j]);
    rep.sup_diff = std::max(rep.sup_diff, d);
    if (!(a.states[j] == b.states[j])) rep.bitwise_identical = false;
  }
  rep.terminal_diff = norm_h(a.states.back() - b.states.back());
  rep.stability = perturbation > 0.0 ? rep.sup_diff / perturbation : 0.0;
  return rep;
}

OraclePath projected_euler_1d(double kappa, double sigma, double x0, double dt,
                              std::size_t steps, const NoiseSource& noise) {
  OraclePath out;
  out.states.reserve(steps + 1);
  double x = x0;
  out.states.push_back(x);
  double dW = 0.0;
  for (std::size_t j = 0; j < steps; ++j) {
    noise(j, {&dW, 1});
    const double free = x + kappa * x * dt + sigma * dW;
    x = std::clamp(free, -1.0, 1.0);
    out.local_time_variation += std::abs(x - free);
    out.states.push_back(x);
  }
  return out;
}

std::vector<OracleRow> oracle_compare_1d(double kappa, double sigma, double x0,
                                         const SchemeConfig& cfg,
                                         const std::vector<double>& n_grid, std::size_t paths,
                                         int threads) {
  if (n_grid.empty()) throw ConfigError("n_grid must not be empty");
  if (paths < 1) throw ConfigError("oracle comparison needs at least 1 path");
  if (!(std::abs(x0) <= 1.0)) throw std::invalid_argument("oracle x0 must lie in [-1, 1]");
  const ModelSpec model = oracle_1d_model(kappa, sigma);
  const SpectralField start(model.space, {x0});
  const std::size_t L = n_grid.size();
  for (double n : n_grid) {
    SchemeConfig c = cfg;
    c.n = n;
    c.validate();
  }

  std::vector<std::vector<std::array<double, 3>>> per(paths);
  std::optional<std::string> error;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::size_t p = 0; p < paths; ++p) {
    try {
      const NoiseSource noise = keyed_noise(cfg.seed, p, cfg.dt);
      const OraclePath orc = projected_euler_1d(kappa, sigma, x0, cfg.dt, cfg.steps, noise);
      per[p].resize(L);
      for (std::size_t l = 0; l < L; ++l) {
        SchemeConfig c = cfg;
        c.n = n_grid[l];
        const PathRecord rec = simulate_path(model, c, start, noise);
        double sup = 0.0;
        for (std::size_t j = 0; j < rec.states.size(); ++j)
          sup = std::max(sup, std::abs(rec.states[j][0] - orc.states[j]));
        per[p][l] = {sup, std::abs(rec.total_variation - orc.local_time_variation),
                     std::abs(rec.states.back()[0] - orc.states.back())};
      }
    } catch (const std::exception& e) {
#pragma omp critical
      if (!error) error = e.what();
    }
  }
  if (error) throw std::runtime_error(*error);

  std::vector<OracleRow> rows;
  for (std::size_t l = 0; l < L; ++l) {
    std::array<std::vector<double>, 3> v;
    for (std::size_t p = 0; p < paths; ++p)
      for (int k = 0; k < 3; ++k) v[static_cast<std::size_t>(k)].push_back(per[p][l][static_cast<std::size_t>(k)]);
    rows.push_back({n_grid[l], batch_stat(v[0], 10), batch_stat(v[1], 10), batch_stat(v[2], 10)});
  }
  return rows;
}

}  // namespace rspde
