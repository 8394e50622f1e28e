#include <cmath>

#include "reflectspde/models.hpp"
#include "reflectspde/tamednse.hpp"

namespace rspde {

namespace {

int as_int(const ModelParams& p, const std::string& key, int fallback) {
  const double v = p.get(key, fallback);
  if (!std::isfinite(v) || v != std::floor(v) || v < 0.0 || v > 1e6)
    throw ConfigError("model parameter " + key + " must be a nonnegative integer");
  return static_cast<int>(v);
}

NoiseSpec noise_from(const ModelParams& p, const SpaceSpec& space, std::size_t default_k) {
  const int K = as_int(p, "K", static_cast<int>(default_k));
  return NoiseSpec::with_decay(space, static_cast<std::size_t>(K), p.get("q_scale", 0.01),
                               p.get("q_decay", 1.0), p.get("mu", 1.0), p.get("lambda", 0.0));
}

}  // namespace

std::vector<std::string> registered_models() {
  return {"allen_cahn", "p_laplacian", "oracle_1d", "tamed_nse"};
}

ModelSpec make_model(const std::string& name, const ModelParams& params) {
  if (name == "allen_cahn") {
    const int modes = as_int(params, "modes", 64);
    const auto space = allen_cahn_space(modes);
    return allen_cahn_model(modes, noise_from(params, *space, space->size()));
  }
  if (name == "p_laplacian") {
    const int modes = as_int(params, "modes", 16);
    const double p = params.get("p", 4.0);
    const auto space = p_laplacian_space(modes, p);
    return p_laplacian_model(modes, p, noise_from(params, *space, space->size()));
  }
  if (name == "oracle_1d") {
    return oracle_1d_model(params.get("kappa", 1.0), params.get("sigma", 0.0));
  }
  if (name == "tamed_nse") {
    tamed::TamedSpec spec;
    spec.nu = params.get("nu", 1.0);
    spec.taming_n = params.get("taming_n", 1.0);
    spec.modes = as_int(params, "modes", 4);
    spec.validate();
    const auto space = tamed::h1_space(spec.modes);
    return tamed::tamed_model(spec,
                              tamed::lowest_shell_noise(*space, params.get("mu", 0.1)));
  }
  throw ConfigError("unknown model '" + name + "'");
}

}  // namespace rspde
