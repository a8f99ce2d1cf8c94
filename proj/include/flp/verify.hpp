#pragma once

#include <map>
#include <string>
#include <vector>

#include "flp/config.hpp"
#include "flp/types.hpp"

namespace flp {

// One entry of the machine-readable verification report.  `pass` is the
// authoritative flag; most checks pass when measured <= tolerance, slope and
// ordering checks pass when measured >= tolerance (stated in `detail`).
struct CheckResult {
  std::string name;
  Scalar measured = 0;
  Scalar tolerance = 0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20260818ull;
  std::map<std::string, Scalar> tolerances;  // per-check overrides by name
  std::string scratch_dir;  // determinism-check workspace; empty = system tmp
};

// Suites: isometry, operators, wick, skorohod, volterra, sde, hoelder, all.
// "all" runs every suite plus the byte-determinism check.
std::vector<std::string> suite_names();
std::vector<CheckResult> run_suite(const std::string& suite,
                                   const VerifyOptions& opt);

// Executes the experiment described by the config into out_dir (created if
// needed) and finalizes a manifest there.  Returns the run directory.
std::string run_experiment(const Config& cfg, const std::string& out_dir);

}  // namespace flp
