#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "flp/config.hpp"
#include "flp/io.hpp"
#include "flp/sde.hpp"
#include "flp/verify.hpp"

namespace fs = std::filesystem;

namespace {

std::string resolve_out_root(const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  if (const char* env = std::getenv("FLP_OUT_ROOT"); env && *env) return env;
  return "runs";
}

std::string fresh_run_dir(const std::string& root, const flp::Config& cfg) {
  const std::string tag = flp::fnv1a_hex(cfg.raw_text).substr(0, 8);
  std::string base = root + "/run-" + tag + "-" + std::to_string(cfg.seed);
  std::string dir = base;
  for (int k = 2; fs::exists(dir); ++k) dir = base + "-" + std::to_string(k);
  return dir;
}

int cmd_run(const std::string& config_path, const std::string& out,
            bool has_seed, std::uint64_t seed) {
  flp::Config cfg = flp::parse_config_file(config_path);
  if (has_seed) cfg.seed = seed;
  const std::string dir =
      flp::run_experiment(cfg, fresh_run_dir(resolve_out_root(out), cfg));
  std::cout << dir << "\n";
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& config_path,
               bool has_seed, std::uint64_t seed) {
  flp::VerifyOptions opt;
  if (!config_path.empty()) {
    const flp::Config cfg = flp::parse_config_file(config_path);
    opt.seed = cfg.seed;
    opt.tolerances = cfg.tolerances;
  }
  if (has_seed) opt.seed = seed;
  const auto results = flp::run_suite(suite, opt);
  std::cout << "name,measured,tolerance,pass\n";
  int failed = 0;
  for (const flp::CheckResult& r : results) {
    std::cout << r.name << "," << flp::format_scalar(r.measured) << ","
              << flp::format_scalar(r.tolerance) << "," << (r.pass ? 1 : 0)
              << "\n";
    std::fprintf(stderr, "[%s] %-32s measured=%-12.6g tol=%-10.4g %s\n",
                 r.pass ? "PASS" : "FAIL", r.name.c_str(), r.measured,
                 r.tolerance, r.detail.c_str());
    if (!r.pass) ++failed;
  }
  std::fprintf(stderr, "%zu checks, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}

int cmd_emit_plotdata(const std::string& run_dir) {
  const flp::ManifestInfo info = flp::read_manifest(run_dir);
  const fs::path plot = fs::path(run_dir) / "plot";
  fs::create_directories(plot);
  int copied = 0;
  for (const auto& [name, hash] : info.files) {
    if (name.size() < 4 || name.substr(name.size() - 4) != ".csv") continue;
    fs::copy_file(fs::path(run_dir) / name, plot / name,
                  fs::copy_options::overwrite_existing);
    ++copied;
  }
  // Refit the noise modulus for the run's parameters so every run has
  // plottable regression data, whatever experiment produced it.
  const flp::Config cfg =
      flp::parse_config_file((fs::path(run_dir) / "config.json").string());
  std::vector<std::pair<flp::Scalar, flp::Scalar>> pairs;
  for (int k = 0; k < 8; ++k)
    pairs.push_back({0.5 + 1e-3 * std::pow(100.0, k / 7.0), 0.5});
  const flp::HolderReport hr = flp::holder_noise_check(
      cfg.experiment.beta, cfg.solver.gauge_p, pairs, 256);
  flp::write_file((plot / "holder_fit.csv").string(),
                  flp::csv_holder_fit(hr.log_gap, hr.log_norm2, hr.slope,
                                      hr.intercept));
  std::cout << plot.string() << " (" << copied + 1 << " csv files)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional Levy calculus toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir, suite = "all", run_dir;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "run one configured experiment");
  run->add_option("--config", config_path, "json config file")->required();
  CLI::Option* run_seed =
      run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir,
                  "output root (default $FLP_OUT_ROOT, then ./runs)");

  CLI::App* verify =
      app.add_subcommand("verify", "run a named check suite");
  verify->add_option("--suite", suite,
                     "isometry|operators|wick|skorohod|volterra|sde|hoelder|all");
  verify->add_option("--config", config_path,
                     "json config supplying seed and tolerance overrides");
  CLI::Option* verify_seed =
      verify->add_option("--seed", seed, "override the seed");

  CLI::App* plot = app.add_subcommand(
      "emit-plotdata", "collect tidy csv files from a finished run");
  plot->add_option("run_dir", run_dir, "run directory with a manifest")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return cmd_run(config_path, out_dir, run_seed->count() > 0, seed);
    if (verify->parsed())
      return cmd_verify(suite, config_path, verify_seed->count() > 0, seed);
    return cmd_emit_plotdata(run_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
