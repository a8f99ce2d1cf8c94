#include "flp/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace flp {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& reason) {
  throw std::invalid_argument(field + " " + reason);
}

void require_keys(const json& obj, const std::string& block,
                  const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      fail(block.empty() ? it.key() : block + "." + it.key(),
           "is not a recognized config key");
  }
}

Scalar get_scalar(const json& obj, const std::string& block,
                  const std::string& key, Scalar fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(block + "." + key, "must be a number");
  return v.get<Scalar>();
}

Index get_index(const json& obj, const std::string& block,
                const std::string& key, Index fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(block + "." + key, "must be an integer");
  return v.get<Index>();
}

std::string get_string(const json& obj, const std::string& block,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(block + "." + key, "must be a string");
  return v.get<std::string>();
}

std::string fmt(Scalar x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

void parse_model(const json& j, ModelConfig& m) {
  require_keys(j, "model",
               {"kind", "intensity", "jump_size", "mark_std", "amplitude",
                "decay", "epsilon", "n_atoms"});
  m.kind = get_string(j, "model", "kind", m.kind);
  if (m.kind != "two_point" && m.kind != "gauss_mark" &&
      m.kind != "tempered_stable")
    fail("model.kind",
         "must be one of two_point, gauss_mark, tempered_stable; got " +
             m.kind);
  m.intensity = get_scalar(j, "model", "intensity", m.intensity);
  if (!(m.intensity > 0)) fail("model.intensity", "must be positive");
  m.jump_size = get_scalar(j, "model", "jump_size", m.jump_size);
  if (m.jump_size == 0.0) fail("model.jump_size", "must be nonzero");
  m.mark_std = get_scalar(j, "model", "mark_std", m.mark_std);
  if (!(m.mark_std > 0)) fail("model.mark_std", "must be positive");
  m.amplitude = get_scalar(j, "model", "amplitude", m.amplitude);
  if (!(m.amplitude > 0)) fail("model.amplitude", "must be positive");
  m.decay = get_scalar(j, "model", "decay", m.decay);
  if (!(m.decay > 0)) fail("model.decay", "must be positive");
  m.epsilon = get_scalar(j, "model", "epsilon", m.epsilon);
  if (!(m.epsilon > 0)) fail("model.epsilon", "must be positive");
  m.n_atoms = get_index(j, "model", "n_atoms", m.n_atoms);
  if (m.n_atoms < 1) fail("model.n_atoms", "must be at least 1");
}

void parse_grid(const json& j, GridConfig& g) {
  require_keys(j, "grid", {"t_min", "t_max", "n_cells"});
  g.t_min = get_scalar(j, "grid", "t_min", g.t_min);
  g.t_max = get_scalar(j, "grid", "t_max", g.t_max);
  g.n_cells = get_index(j, "grid", "n_cells", g.n_cells);
  if (!(g.t_min < g.t_max))
    fail("grid.t_min", "must be strictly below grid.t_max");
  if (g.n_cells < 1) fail("grid.n_cells", "must be at least 1");
}

void parse_experiment(const json& j, ExperimentConfig& e) {
  require_keys(j, "experiment",
               {"kind", "beta", "n_paths", "deficit_budget", "observe_times"});
  e.kind = get_string(j, "experiment", "kind", e.kind);
  if (e.kind != "simulate" && e.kind != "wiener" && e.kind != "volterra" &&
      e.kind != "sde")
    fail("experiment.kind",
         "must be one of simulate, wiener, volterra, sde; got " + e.kind);
  e.beta = get_scalar(j, "experiment", "beta", e.beta);
  if (!(e.beta > 0.0 && e.beta < 0.5))
    fail("experiment.beta", "must lie in (0, 1/2); got " + fmt(e.beta));
  e.n_paths = get_index(j, "experiment", "n_paths", e.n_paths);
  if (e.n_paths < 1) fail("experiment.n_paths", "must be at least 1");
  e.deficit_budget = get_scalar(j, "experiment", "deficit_budget",
                                e.deficit_budget);
  if (!(e.deficit_budget > 0))
    fail("experiment.deficit_budget", "must be positive");
  if (j.contains("observe_times")) {
    const json& v = j.at("observe_times");
    if (!v.is_array()) fail("experiment.observe_times", "must be an array");
    e.observe_times.clear();
    for (const json& x : v) {
      if (!x.is_number())
        fail("experiment.observe_times", "must contain only numbers");
      e.observe_times.push_back(x.get<Scalar>());
    }
  }
}

void parse_kernel(const json& j, const std::string& block, std::string& kind,
                  Scalar& amplitude, Scalar& rate, int& degree) {
  require_keys(j, block, {"kind", "amplitude", "rate", "degree"});
  kind = get_string(j, block, "kind", kind);
  if (kind != "constant" && kind != "exponential" && kind != "polynomial")
    fail(block + ".kind",
         "must be one of constant, exponential, polynomial; got " + kind);
  amplitude = get_scalar(j, block, "amplitude", amplitude);
  rate = get_scalar(j, block, "rate", rate);
  degree = static_cast<int>(get_index(j, block, "degree", degree));
  if (degree < 0) fail(block + ".degree", "must be nonnegative");
}

void parse_solver(const json& j, SolverConfig& s) {
  require_keys(j, "solver",
               {"chaos_order", "backend", "tol", "max_iter", "gauge_p",
                "n_probes", "probe_gauge", "b", "sigma", "u0", "forcing"});
  s.chaos_order = static_cast<int>(
      get_index(j, "solver", "chaos_order", s.chaos_order));
  if (s.chaos_order < 0 || s.chaos_order > 12)
    fail("solver.chaos_order", "must lie in [0, 12]");
  s.backend = get_string(j, "solver", "backend", s.backend);
  if (s.backend != "chaos_picard" && s.backend != "chaos_resolvent" &&
      s.backend != "s_collocation")
    fail("solver.backend",
         "must be one of chaos_picard, chaos_resolvent, s_collocation; got " +
             s.backend);
  s.tol = get_scalar(j, "solver", "tol", s.tol);
  if (!(s.tol > 0)) fail("solver.tol", "must be positive");
  s.max_iter = get_index(j, "solver", "max_iter", s.max_iter);
  if (s.max_iter < 1) fail("solver.max_iter", "must be at least 1");
  s.gauge_p = get_scalar(j, "solver", "gauge_p", s.gauge_p);
  if (!(s.gauge_p > 0.5)) fail("solver.gauge_p", "must exceed 1/2");
  s.n_probes = get_index(j, "solver", "n_probes", s.n_probes);
  if (s.n_probes < 0) fail("solver.n_probes", "must be nonnegative");
  s.probe_gauge = get_scalar(j, "solver", "probe_gauge", s.probe_gauge);
  if (!(s.probe_gauge > 0 && s.probe_gauge < 1))
    fail("solver.probe_gauge", "must lie in (0, 1)");
  if (j.contains("b"))
    parse_kernel(j.at("b"), "solver.b", s.b_kind, s.b_amplitude, s.b_rate,
                 s.b_degree);
  if (j.contains("sigma"))
    parse_kernel(j.at("sigma"), "solver.sigma", s.sigma_kind,
                 s.sigma_amplitude, s.sigma_rate, s.sigma_degree);
  s.u0 = get_scalar(j, "solver", "u0", s.u0);
  s.forcing = get_scalar(j, "solver", "forcing", s.forcing);
}

void parse_output(const json& j, OutputConfig& o) {
  require_keys(j, "output", {"dir", "max_paths_csv"});
  o.dir = get_string(j, "output", "dir", o.dir);
  o.max_paths_csv = get_index(j, "output", "max_paths_csv", o.max_paths_csv);
  if (o.max_paths_csv < 1) fail("output.max_paths_csv", "must be at least 1");
}

}  // namespace

LevyModel Config::make_model() const {
  if (model.kind == "two_point")
    return two_point_model(model.intensity, model.jump_size);
  if (model.kind == "gauss_mark")
    return gauss_mark_model(model.intensity, model.mark_std, model.epsilon,
                            model.n_atoms);
  return tempered_stable_model(model.amplitude, model.decay, model.epsilon,
                               model.n_atoms);
}

TimeGrid Config::make_grid() const {
  return TimeGrid(grid.t_min, grid.t_max, grid.n_cells);
}

Scalar Config::tolerance_or(const std::string& name, Scalar fallback) const {
  auto it = tolerances.find(name);
  return it == tolerances.end() ? fallback : it->second;
}

Config parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid json: ") +
                                e.what());
  }
  if (!j.is_object()) fail("config", "must be a json object");
  require_keys(j, "",
               {"seed", "model", "grid", "experiment", "solver", "output",
                "tolerances"});

  Config c;
  c.raw_text = text;
  if (j.contains("seed")) {
    const json& v = j.at("seed");
    if (!v.is_number_integer() || v.is_number_float())
      fail("seed", "must be an integer");
    c.seed = v.get<std::uint64_t>();
  }
  if (j.contains("model")) {
    if (!j.at("model").is_object()) fail("model", "must be an object");
    parse_model(j.at("model"), c.model);
  }
  if (j.contains("grid")) {
    if (!j.at("grid").is_object()) fail("grid", "must be an object");
    parse_grid(j.at("grid"), c.grid);
  }
  if (j.contains("experiment")) {
    if (!j.at("experiment").is_object())
      fail("experiment", "must be an object");
    parse_experiment(j.at("experiment"), c.experiment);
  }
  if (j.contains("solver")) {
    if (!j.at("solver").is_object()) fail("solver", "must be an object");
    parse_solver(j.at("solver"), c.solver);
  }
  if (j.contains("output")) {
    if (!j.at("output").is_object()) fail("output", "must be an object");
    parse_output(j.at("output"), c.output);
  }
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    if (!t.is_object()) fail("tolerances", "must be an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!it.value().is_number())
        fail("tolerances." + it.key(), "must be a number");
      c.tolerances[it.key()] = it.value().get<Scalar>();
    }
  }
  if (c.experiment.observe_times.empty())
    c.experiment.observe_times.push_back(c.grid.t_max);
  for (Scalar t : c.experiment.observe_times)
    if (t < c.grid.t_min || t > c.grid.t_max)
      fail("experiment.observe_times",
           "must lie inside [grid.t_min, grid.t_max]; got " + fmt(t));
  return c;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace flp
