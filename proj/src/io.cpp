#include "flp/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace flp {

std::string format_scalar(Scalar v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string fnv1a_hex(std::string_view data) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(data)));
  return buf;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::string csv_paths(const PathSample& sample, Index max_paths) {
  const Index n_paths = std::min(max_paths, sample.values.rows());
  std::string out = "t,path_id,value\n";
  for (Index p = 0; p < n_paths; ++p)
    for (Index e = 0; e < sample.values.cols(); ++e) {
      out += format_scalar(sample.grid.edge(e));
      out += ',';
      out += std::to_string(p);
      out += ',';
      out += format_scalar(sample.values(p, e));
      out += '\n';
    }
  return out;
}

std::string csv_moments(const std::vector<MomentTable>& rows) {
  std::string out = "t,mean,variance,stderr_mean,stderr_var\n";
  for (const MomentTable& r : rows)
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      out += format_scalar(r.t[i]);
      out += ',';
      out += format_scalar(r.mean[i]);
      out += ',';
      out += format_scalar(r.variance[i]);
      out += ',';
      out += format_scalar(r.stderr_mean[i]);
      out += ',';
      out += format_scalar(r.stderr_var[i]);
      out += '\n';
    }
  return out;
}

std::string csv_variance_vs_t(const Arr& t, const Arr& empirical_var,
                              const Arr& oracle_var, const Arr& stderr_var) {
  if (t.size() != empirical_var.size() || t.size() != oracle_var.size() ||
      t.size() != stderr_var.size())
    throw std::invalid_argument("variance table columns differ in length");
  std::string out = "t,empirical_var,oracle_var,stderr\n";
  for (Index i = 0; i < t.size(); ++i) {
    out += format_scalar(t[i]);
    out += ',';
    out += format_scalar(empirical_var[i]);
    out += ',';
    out += format_scalar(oracle_var[i]);
    out += ',';
    out += format_scalar(stderr_var[i]);
    out += '\n';
  }
  return out;
}

std::string csv_picard_decay(const Arr& update_norms) {
  std::string out = "iteration,update_norm\n";
  for (Index i = 0; i < update_norms.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_scalar(update_norms[i]);
    out += '\n';
  }
  return out;
}

std::string csv_solution(const Arr& t, const Mat& values) {
  if (t.size() != values.rows())
    throw std::invalid_argument("solution table has mismatched row count");
  std::string out = "t,eta_id,value\n";
  for (Index i = 0; i < t.size(); ++i)
    for (Index q = 0; q < values.cols(); ++q) {
      out += format_scalar(t[i]);
      out += ',';
      out += std::to_string(q);
      out += ',';
      out += format_scalar(values(i, q));
      out += '\n';
    }
  return out;
}

std::string csv_holder_fit(const Arr& log_gap, const Arr& log_norm2,
                           Scalar slope, Scalar intercept) {
  if (log_gap.size() != log_norm2.size())
    throw std::invalid_argument("holder table columns differ in length");
  std::string out = "log_gap,log_norm2,fitted\n";
  for (Index i = 0; i < log_gap.size(); ++i) {
    out += format_scalar(log_gap[i]);
    out += ',';
    out += format_scalar(log_norm2[i]);
    out += ',';
    out += format_scalar(intercept + slope * log_gap[i]);
    out += '\n';
  }
  return out;
}

RunDir::RunDir(std::string root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void RunDir::add_file(const std::string& name, const std::string& body) {
  if (finalized_) throw std::logic_error("run directory already finalized");
  if (name.empty() || name.find('/') != std::string::npos)
    throw std::invalid_argument("artifact names must be plain file names");
  write_file(root_ + "/" + name, body);
  entries_.emplace_back(name, fnv1a_hex(body));
}

void RunDir::finalize(const std::string& config_text, std::uint64_t seed) {
  if (finalized_) throw std::logic_error("run directory already finalized");
  nlohmann::json manifest;
  manifest["config_hash"] = fnv1a_hex(config_text);
  manifest["seed"] = seed;
  manifest["version"] = kVersion;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, hash] : entries_) files[name] = hash;
  manifest["files"] = files;
  write_file(root_ + "/manifest.json", manifest.dump(2) + "\n");
  finalized_ = true;
}

ManifestInfo read_manifest(const std::string& run_dir) {
  const std::string path = run_dir + "/manifest.json";
  if (!std::filesystem::exists(path))
    throw std::runtime_error("missing manifest: " + path);
  const nlohmann::json m = nlohmann::json::parse(read_file(path));
  ManifestInfo info;
  info.config_hash = m.at("config_hash").get<std::string>();
  info.seed = m.at("seed").get<std::uint64_t>();
  info.version = m.at("version").get<std::string>();
  for (const auto& [name, hash] : m.at("files").items())
    info.files.emplace_back(name, hash.get<std::string>());
  return info;
}

ManifestCheck verify_manifest(const std::string& run_dir) {
  const ManifestInfo info = read_manifest(run_dir);
  ManifestCheck check;
  check.ok = true;
  for (const auto& [name, hash] : info.files) {
    const std::string path = run_dir + "/" + name;
    if (!std::filesystem::exists(path)) {
      check.missing.push_back(name);
      check.ok = false;
      continue;
    }
    if (fnv1a_hex(read_file(path)) != hash) {
      check.mismatched.push_back(name);
      check.ok = false;
    }
  }
  return check;
}

}  // namespace flp
