#include "reflectspde/experiment.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "reflectspde/tamednse.hpp"

namespace rspde {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"model.name", "allen_cahn"},
      {"init.coeffs", "1"},
      {"init.radius", "1"},
      {"scheme.dt", "0.001"},
      {"scheme.T", "1"},
      {"scheme.method", "explicit"},
      {"scheme.seed", "1"},
      {"ensemble.n_grid", "1, 4, 16, 64, 256"},
      {"ensemble.paths", "20"},
      {"ensemble.batches", "10"},
      {"inequality.delta", "0.1"},
      {"inequality.test_paths", "200"},
      {"hypotheses.count", "100"},
      {"hypotheses.decay", "1"},
      {"oracle.kappa", "1"},
      {"oracle.sigma", "0.5"},
      {"oracle.x0", "0"},
      {"oracle.dt", "0.0001"},
      {"oracle.T", "1"},
      {"oracle.paths", "500"},
      {"oracle.n_grid", "100, 1000, 10000"},
      {"oracle.method", "explicit"},
      {"output.dir", "out"},
  };
  return d;
}

const std::map<std::string, std::set<std::string>>& model_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"allen_cahn", {"model.modes", "noise.K", "noise.q_scale", "noise.q_decay", "noise.mu",
                      "noise.lambda"}},
      {"p_laplacian", {"model.modes", "model.p", "noise.K", "noise.q_scale", "noise.q_decay",
                       "noise.mu", "noise.lambda"}},
      {"oracle_1d", {"model.kappa", "model.sigma"}},
      {"tamed_nse", {"model.nu", "model.taming_n", "model.modes", "noise.mu"}},
  };
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(x))
    throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  return x;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const double x = to_number(key, v);
  if (x < 0 || x != std::floor(x) || x > 1e12)
    throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(key, item));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
  return out;
}

std::size_t steps_for(const std::string& key, double T, double dt) {
  if (!(dt > 0.0)) throw ConfigError(key + ".dt must be > 0");
  if (!(T > 0.0)) throw ConfigError(key + ".T must be > 0");
  const double s = std::round(T / dt);
  if (s < 1 || std::abs(s * dt - T) > 1e-9 * T)
    throw ConfigError(key + ".T must be a whole number of steps dt");
  return static_cast<std::size_t>(s);
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

void write_file(const fs::path& p, const std::string& bytes) {
  fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + p.string());
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!model_keys().count(model_name)) {
    std::string names;
    for (const auto& n : registered_models()) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("model.name: unknown model '" + model_name + "' (registered: " + names + ")");
  }
  if (init_coeffs.empty()) throw ConfigError("init.coeffs: must not be empty");
  if (!(init_radius >= 0.0 && init_radius <= 1.0))
    throw ConfigError("init.radius: must lie in [0, 1]");
  if (paths < 2) throw ConfigError("ensemble.paths: must be >= 2");
  if (batches < 1) throw ConfigError("ensemble.batches: must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("inequality.delta: must lie in (0, 1)");
  if (test_paths < 1) throw ConfigError("inequality.test_paths: must be >= 1");
  if (hypothesis_count < 2) throw ConfigError("hypotheses.count: must be >= 2");
  for (double n : n_grid) {
    SchemeConfig c = scheme;
    c.n = n;
    try {
      c.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("scheme/ensemble.n_grid: ") + e.what());
    }
  }
  if (!(std::abs(oracle.x0) <= 1.0)) throw ConfigError("oracle.x0: must lie in [-1, 1]");
  if (oracle.paths < 1) throw ConfigError("oracle.paths: must be >= 1");
  for (double n : oracle.n_grid) {
    SchemeConfig c{oracle.dt, steps_for("oracle", oracle.T, oracle.dt), n, oracle.method, 0};
    try {
      c.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("oracle.n_grid: ") + e.what());
    }
  }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> given;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (given.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    given[key] = value;
  }

  ExperimentConfig cfg;
  cfg.resolved = defaults();
  const std::string name = given.count("model.name") ? given["model.name"] : "allen_cahn";
  const auto mk = model_keys().find(name);
  if (mk == model_keys().end()) {
    cfg.model_name = name;
    cfg.validate();  // throws with the list of registered models
  }
  for (const auto& [k, v] : given) {
    if (!defaults().count(k) && !mk->second.count(k))
      throw ConfigError(source + ": unknown key '" + k + "' for model '" + name + "'");
    cfg.resolved[k] = v;
  }

  const auto& r = cfg.resolved;
  cfg.model_name = r.at("model.name");
  for (const auto& [k, v] : r) {
    if (k.rfind("model.", 0) == 0 && k != "model.name")
      cfg.model_params.values[k.substr(6)] = to_number(k, v);
    if (k.rfind("noise.", 0) == 0) cfg.model_params.values[k.substr(6)] = to_number(k, v);
  }
  cfg.init_coeffs = to_list("init.coeffs", r.at("init.coeffs"));
  cfg.init_radius = to_number("init.radius", r.at("init.radius"));
  cfg.scheme.dt = to_number("scheme.dt", r.at("scheme.dt"));
  cfg.scheme.steps = steps_for("scheme", to_number("scheme.T", r.at("scheme.T")), cfg.scheme.dt);
  cfg.scheme.method = parse_method(r.at("scheme.method"));
  cfg.scheme.seed = to_count("scheme.seed", r.at("scheme.seed"));
  cfg.n_grid = to_list("ensemble.n_grid", r.at("ensemble.n_grid"));
  cfg.paths = to_count("ensemble.paths", r.at("ensemble.paths"));
  cfg.batches = to_count("ensemble.batches", r.at("ensemble.batches"));
  cfg.delta = to_number("inequality.delta", r.at("inequality.delta"));
  cfg.test_paths = to_count("inequality.test_paths", r.at("inequality.test_paths"));
  cfg.hypothesis_count = to_count("hypotheses.count", r.at("hypotheses.count"));
  cfg.hypothesis_decay = to_number("hypotheses.decay", r.at("hypotheses.decay"));
  cfg.oracle.kappa = to_number("oracle.kappa", r.at("oracle.kappa"));
  cfg.oracle.sigma = to_number("oracle.sigma", r.at("oracle.sigma"));
  cfg.oracle.x0 = to_number("oracle.x0", r.at("oracle.x0"));
  cfg.oracle.dt = to_number("oracle.dt", r.at("oracle.dt"));
  cfg.oracle.T = to_number("oracle.T", r.at("oracle.T"));
  cfg.oracle.paths = to_count("oracle.paths", r.at("oracle.paths"));
  cfg.oracle.n_grid = to_list("oracle.n_grid", r.at("oracle.n_grid"));
  cfg.oracle.method = parse_method(r.at("oracle.method"));
  cfg.out_dir = r.at("output.dir");
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path.string());
  return parse_config(f, path.string());
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : cfg.resolved) {
    if (k == "output.dir") continue;
    out += k + " = " + v + "\n";
  }
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string file_sha256(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return sha256_hex(ss.str());
}

ModelSpec build_model(const ExperimentConfig& cfg) {
  return make_model(cfg.model_name, cfg.model_params);
}

SpectralField build_initial_state(const ModelSpec& model, const ExperimentConfig& cfg) {
  SpectralField x(model.space);
  if (cfg.init_coeffs.size() > x.size())
    throw ConfigError("init.coeffs: more entries than retained modes");
  for (std::size_t i = 0; i < cfg.init_coeffs.size(); ++i) x[i] = cfg.init_coeffs[i];
  x = model.admissible(x);
  const double r = norm_h(x);
  if (r == 0.0) return x;
  return x * (cfg.init_radius / r);
}

EnsembleSpec build_ensemble(const ExperimentConfig& cfg, int threads) {
  EnsembleSpec e;
  e.scheme = cfg.scheme;
  e.n_grid = cfg.n_grid;
  e.paths = cfg.paths;
  e.batches = cfg.batches;
  e.threads = threads;
  e.delta = cfg.delta;
  e.test_paths = cfg.test_paths;
  return e;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"estimates", "cauchy",   "inequality",
                                             "hypotheses", "oracle1d", "all"};
  return s;
}

std::string estimates_csv(const std::vector<EstimateRow>& rows) {
  std::string s =
      "n,est_sup4,se_sup4,est_weighted_pen,se_weighted_pen,est_var2,se_var2,est_pen_l2,"
      "se_pen_l2,est_v_energy,se_v_energy,est_pen_sup4,se_pen_sup4,failures\n";
  for (const auto& r : rows) {
    s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", num(r.n), num(r.sup4.mean),
                     num(r.sup4.se), num(r.weighted_pen.mean), num(r.weighted_pen.se),
                     num(r.var2.mean), num(r.var2.se), num(r.pen_l2.mean), num(r.pen_l2.se),
                     num(r.v_energy.mean), num(r.v_energy.se), num(r.pen_sup4.mean),
                     num(r.pen_sup4.se), r.failures);
  }
  return s;
}

std::string cauchy_csv(const std::vector<CauchyRow>& rows) {
  std::string s = "n_lo,n_hi,est_supdiff2,se\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{}\n", num(r.n_lo), num(r.n_hi), num(r.supdiff2.mean),
                     num(r.supdiff2.se));
  return s;
}

std::string inequality_csv(const std::vector<InequalityRow>& rows) {
  std::string s = "n,path_index,total_variation,min_gap,boundary_leak\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{},{}\n", num(r.n), r.path_index, num(r.total_variation),
                     num(r.min_gap), num(r.boundary_leak));
  return s;
}

std::string oracle_csv(const std::vector<OracleRow>& rows) {
  std::string s =
      "n,est_supdiff,se_supdiff,est_local_time_diff,se_local_time_diff,est_terminal_diff,"
      "se_terminal_diff\n";
  for (const auto& r : rows)
    s += fmt::format("{},{},{},{},{},{},{}\n", num(r.n), num(r.sup_diff.mean),
                     num(r.sup_diff.se), num(r.local_time_diff.mean), num(r.local_time_diff.se),
                     num(r.terminal_diff.mean), num(r.terminal_diff.se));
  return s;
}

std::string hypotheses_csv(const std::vector<AuditReport>& reports) {
  std::string s = "hypothesis,margin,constant,seed\n";
  for (const auto& r : reports)
    s += fmt::format("{},{},{},{}\n", r.hypothesis, num(r.worst_margin), num(r.constant), r.seed);
  return s;
}

std::string xy_csv(const std::vector<std::pair<double, double>>& xy) {
  std::string s = "x,y\n";
  for (const auto& [x, y] : xy) s += fmt::format("{},{}\n", num(x), num(y));
  return s;
}

int run_experiment(ExperimentConfig cfg, const std::string& sub, const RunOptions& opts,
                   std::ostream& log) {
  bool known = false;
  for (const auto& s : subcommands()) known |= s == sub;
  if (!known) {
    log << "error: unknown subcommand '" << sub << "'\n";
    return kConfigError;
  }
  if (opts.seed) {
    cfg.scheme.seed = *opts.seed;
    cfg.resolved["scheme.seed"] = std::to_string(*opts.seed);
  }
  const fs::path out = opts.out_dir ? *opts.out_dir : fs::path(cfg.out_dir);
  const int threads = std::max(1, opts.threads);

  std::map<std::string, std::string> artifacts;  // relative name -> bytes
  bool numerical_failure = false;
  const bool all = sub == "all";

  try {
    cfg.validate();
    const bool need_model = sub != "oracle1d";
    std::optional<ModelSpec> model;
    std::optional<SpectralField> x0;
    if (need_model) {
      model = build_model(cfg);
      x0 = build_initial_state(*model, cfg);
    }

    if (all || sub == "estimates" || sub == "cauchy" || sub == "inequality") {
      EnsembleSpec e = build_ensemble(cfg, threads);
      e.cauchy = all || sub == "cauchy";
      e.inequality = all || sub == "inequality";
      if (e.cauchy && e.n_grid.size() < 2)
        throw ConfigError("ensemble.n_grid: the Cauchy study needs at least 2 levels");
      log << "running " << e.paths << " paths x " << e.n_grid.size() << " levels of "
          << cfg.model_name << "\n";
      const EnsembleResult res = run_ensemble(*model, *x0, e);
      if (all || sub == "estimates") {
        artifacts["estimates.csv"] = estimates_csv(res.estimates);
        std::vector<std::pair<double, double>> a, b;
        for (const auto& r : res.estimates) {
          a.emplace_back(r.n, r.pen_sup4.mean);
          b.emplace_back(r.n, r.var2.mean);
        }
        artifacts["plots/pen_sup4_vs_n.csv"] = xy_csv(a);
        artifacts["plots/var2_vs_n.csv"] = xy_csv(b);
      }
      if (e.cauchy) {
        artifacts["cauchy.csv"] = cauchy_csv(res.cauchy);
        std::vector<std::pair<double, double>> c;
        for (const auto& r : res.cauchy) c.emplace_back(r.n_hi, r.supdiff2.mean);
        artifacts["plots/cauchy_vs_n.csv"] = xy_csv(c);
      }
      if (e.inequality) {
        artifacts["inequality.csv"] = inequality_csv(res.inequality);
        std::vector<std::pair<double, double>> l;
        for (double n : e.n_grid) {
          double tv = 0.0, leak = 0.0;
          for (const auto& r : res.inequality)
            if (r.n == n) {
              tv += r.total_variation;
              leak += r.boundary_leak;
            }
          l.emplace_back(n, tv > 0.0 ? leak / tv : 0.0);
        }
        artifacts["plots/leak_ratio_vs_n.csv"] = xy_csv(l);
      }
      for (const auto& r : res.estimates) {
        if (r.failures > 0) {
          numerical_failure = true;
          log << "n=" << num(r.n) << ": " << r.failures << " of " << e.paths
              << " paths blew up\n";
        }
      }
    }

    if (all || sub == "hypotheses") {
      log << "auditing " << cfg.model_name << " on " << cfg.hypothesis_count << " samples\n";
      const FieldSampler sampler =
          FieldSampler::for_model(*model, cfg.scheme.seed, cfg.hypothesis_decay);
      AuditOptions ao;
      ao.threads = threads;
      std::vector<AuditReport> reps;
      // The hemicontinuity scan costs thousands of drift evaluations per
      // sample; for the 3-D model it is skipped.
      if (cfg.model_name != "tamed_nse") reps.push_back(check_hemicontinuity(*model, sampler, cfg.hypothesis_count, ao));
      reps.push_back(check_local_monotonicity(*model, sampler, cfg.hypothesis_count, ao));
      reps.push_back(check_coercivity(*model, sampler, cfg.hypothesis_count, ao));
      auto gl = check_growth_and_lipschitz(*model, sampler, cfg.hypothesis_count, ao);
      reps.push_back(std::move(gl.growth));
      reps.push_back(std::move(gl.lipschitz));
      artifacts["hypotheses.csv"] = hypotheses_csv(reps);
    }

    if (all || sub == "oracle1d") {
      const auto& o = cfg.oracle;
      SchemeConfig sc{o.dt, steps_for("oracle", o.T, o.dt), 0.0, o.method, cfg.scheme.seed};
      log << "oracle comparison over " << o.paths << " paths\n";
      const auto rows = oracle_compare_1d(o.kappa, o.sigma, o.x0, sc, o.n_grid, o.paths, threads);
      artifacts["oracle1d.csv"] = oracle_csv(rows);
      std::vector<std::pair<double, double>> d;
      for (const auto& r : rows) d.emplace_back(r.n, r.sup_diff.mean);
      artifacts["plots/oracle_supdiff_vs_n.csv"] = xy_csv(d);
    }
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DimensionError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    log << "numerical failure: " << e.what() << "\n";
    numerical_failure = true;
  }

  nlohmann::json manifest;
  manifest["config_hash"] = sha256_hex(canonical_text(cfg));
  manifest["seed"] = cfg.scheme.seed;
  manifest["subcommand"] = sub;
  manifest["model"] = cfg.model_name;
  manifest["numerical_failure"] = numerical_failure;
  nlohmann::json sums = nlohmann::json::object();
  try {
    for (const auto& [name, bytes] : artifacts) {
      write_file(out / name, bytes);
      sums[name] = sha256_hex(bytes);
    }
    manifest["artifacts"] = sums;
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  log << "wrote " << artifacts.size() << " artifacts to " << out.string() << "\n";
  return numerical_failure ? kNumericalFailure : kSuccess;
}

bool verify_manifest(const fs::path& dir, std::ostream& log) {
  std::ifstream f(dir / "manifest.json");
  if (!f) {
    log << "no manifest.json in " << dir.string() << "\n";
    return false;
  }
  nlohmann::json m;
  try {
    f >> m;
  } catch (const std::exception& e) {
    log << "manifest.json is not valid JSON: " << e.what() << "\n";
    return false;
  }
  bool ok = true;
  for (const auto& [name, sum] : m.at("artifacts").items()) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) {
      log << "missing " << name << "\n";
      ok = false;
      continue;
    }
    if (file_sha256(p) != sum.get<std::string>()) {
      log << "checksum mismatch: " << name << "\n";
      ok = false;
    }
  }
  return ok;
}

}  // namespace rspde
