#pragma once

#include <map>
#include <string>
#include <vector>

#include "flp/levy_models.hpp"
#include "flp/time_grid.hpp"
#include "flp/types.hpp"

namespace flp {

// One structured JSON config per run, with blocks model / grid / experiment /
// solver / output plus a seed and optional tolerance overrides.  Parsing is
// strict: unknown keys and out-of-range values are rejected with the field
// name and reason.

struct ModelConfig {
  std::string kind = "two_point";  // two_point | gauss_mark | tempered_stable
  Scalar intensity = 1.0;
  Scalar jump_size = 1.0;   // two_point
  Scalar mark_std = 1.0;    // gauss_mark
  Scalar amplitude = 1.0;   // tempered_stable c
  Scalar decay = 1.0;       // tempered_stable
  Scalar epsilon = 1e-3;    // density truncation
  Index n_atoms = 32;       // atoms per side for density discretization
};

struct GridConfig {
  Scalar t_min = -2.0;
  Scalar t_max = 1.0;
  Index n_cells = 384;
};

struct ExperimentConfig {
  std::string kind = "simulate";  // simulate | wiener | volterra | sde
  Scalar beta = 0.25;
  Index n_paths = 1000;
  Scalar deficit_budget = 0.01;
  std::vector<Scalar> observe_times;  // defaults to {t_max}
};

struct SolverConfig {
  int chaos_order = 3;
  std::string backend = "chaos_picard";
  Scalar tol = 1e-10;
  Index max_iter = 64;
  Scalar gauge_p = 2.0;
  Index n_probes = 5;
  Scalar probe_gauge = 0.3;
  // deterministic kernel / coefficient presets
  std::string b_kind = "constant";  // constant | exponential | polynomial
  Scalar b_amplitude = 0.0;
  Scalar b_rate = 0.0;
  int b_degree = 0;
  std::string sigma_kind = "constant";
  Scalar sigma_amplitude = 0.0;
  Scalar sigma_rate = 0.0;
  int sigma_degree = 0;
  Scalar u0 = 1.0;       // sde initial value (constant)
  Scalar forcing = 1.0;  // volterra forcing a(t) (constant)
};

struct OutputConfig {
  std::string dir;  // empty: CLI decides (flag, env root, or cwd)
  Index max_paths_csv = 100;
};

struct Config {
  std::uint64_t seed = 20260818ull;
  ModelConfig model;
  GridConfig grid;
  ExperimentConfig experiment;
  SolverConfig solver;
  OutputConfig output;
  std::map<std::string, Scalar> tolerances;
  std::string raw_text;  // exact input text, for the manifest hash

  LevyModel make_model() const;
  TimeGrid make_grid() const;
  Scalar tolerance_or(const std::string& name, Scalar fallback) const;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

}  // namespace flp
