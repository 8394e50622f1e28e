#pragma once

// Experiment runner behind the command-line tool: a flat `key = value`
// config with dotted keys, dispatch to the harness, CSV artifacts and a
// manifest of checksums.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reflectspde/hilbert.hpp"
#include "reflectspde/hypotheses.hpp"
#include "reflectspde/models.hpp"
#include "reflectspde/montecarlo.hpp"
#include "reflectspde/penalize.hpp"

namespace rspde {

struct OracleSettings {
  double kappa = 1.0;
  double sigma = 0.5;
  double x0 = 0.0;
  double dt = 1e-4;
  double T = 1.0;
  std::size_t paths = 500;
  std::vector<double> n_grid{1e2, 1e3, 1e4};
  Method method = Method::Explicit;
};

struct ExperimentConfig {
  std::string model_name = "allen_cahn";
  ModelParams model_params;

  // x0 = init_radius · normalize(Σ_i init_coeffs[i] e_i) (admissible part).
  std::vector<double> init_coeffs{1.0};
  double init_radius = 1.0;

  SchemeConfig scheme;
  std::vector<double> n_grid{1, 4, 16, 64, 256};
  std::size_t paths = 20;
  std::size_t batches = 10;

  double delta = 0.1;
  std::size_t test_paths = 200;

  std::size_t hypothesis_count = 100;
  double hypothesis_decay = 1.0;

  OracleSettings oracle;
  std::string out_dir = "out";

  // Resolved key/value pairs, defaults included; the config hash is taken
  // over this map.
  std::map<std::string, std::string> resolved;

  void validate() const;
};

// Throws ConfigError naming the offending line and key.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

std::string canonical_text(const ExperimentConfig& cfg);
std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);

ModelSpec build_model(const ExperimentConfig& cfg);
SpectralField build_initial_state(const ModelSpec& model, const ExperimentConfig& cfg);
EnsembleSpec build_ensemble(const ExperimentConfig& cfg, int threads);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kNumericalFailure = 3 };

const std::vector<std::string>& subcommands();

// Writes the artifacts of `subcommand` and manifest.json into the output
// directory; returns an ExitCode. Diagnostics go to `log`.
int run_experiment(ExperimentConfig cfg, const std::string& subcommand, const RunOptions& opts,
                   std::ostream& log);

// Re-reads manifest.json in `dir` and checks every artifact checksum.
bool verify_manifest(const std::filesystem::path& dir, std::ostream& log);

// CSV writers (17 significant digits, LF line endings).
std::string estimates_csv(const std::vector<EstimateRow>& rows);
std::string cauchy_csv(const std::vector<CauchyRow>& rows);
std::string inequality_csv(const std::vector<InequalityRow>& rows);
std::string oracle_csv(const std::vector<OracleRow>& rows);
std::string hypotheses_csv(const std::vector<AuditReport>& reports);
std::string xy_csv(const std::vector<std::pair<double, double>>& xy);

}  // namespace rspde
