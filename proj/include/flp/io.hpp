#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flp/flp_simulate.hpp"
#include "flp/types.hpp"

namespace flp {

inline constexpr const char* kVersion = "0.1.0";

// Shortest round-trip decimal rendering; all CSV bodies use it so identical
// runs produce byte-identical files.
std::string format_scalar(Scalar v);

std::uint64_t fnv1a(std::string_view data);
std::string fnv1a_hex(std::string_view data);

void write_file(const std::string& path, const std::string& body);
std::string read_file(const std::string& path);

// --- CSV builders (header row, comma-separated, LF endings) -------------

std::string csv_paths(const PathSample& sample, Index max_paths);
std::string csv_moments(const std::vector<MomentTable>& rows);
std::string csv_variance_vs_t(const Arr& t, const Arr& empirical_var,
                              const Arr& oracle_var, const Arr& stderr_var);
std::string csv_picard_decay(const Arr& update_norms);
// Long-form solution table: one row per (t, eta).
std::string csv_solution(const Arr& t, const Mat& values);
std::string csv_holder_fit(const Arr& log_gap, const Arr& log_norm2,
                           Scalar slope, Scalar intercept);

// --- run directories -----------------------------------------------------

// Collects output files and finishes with a manifest listing every file
// with its content hash, the config hash, the seed, and the version.
class RunDir {
 public:
  explicit RunDir(std::string root);
  void add_file(const std::string& name, const std::string& body);
  void finalize(const std::string& config_text, std::uint64_t seed);
  const std::string& root() const { return root_; }

 private:
  std::string root_;
  std::vector<std::pair<std::string, std::string>> entries_;
  bool finalized_ = false;
};

struct ManifestCheck {
  bool ok = false;
  std::vector<std::string> mismatched;
  std::vector<std::string> missing;
};

// Re-hashes every file listed in the run directory's manifest.
ManifestCheck verify_manifest(const std::string& run_dir);

// Parsed manifest fields needed by tooling.
struct ManifestInfo {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::pair<std::string, std::string>> files;  // name, hash
};

ManifestInfo read_manifest(const std::string& run_dir);

}  // namespace flp
