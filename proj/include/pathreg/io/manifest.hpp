#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathreg/io/hash.hpp"

namespace pathreg::io {

inline constexpr const char* kLibraryVersion = "0.1.0";

/// Execution record: config hash, timings, every warning any stage emitted,
/// and the produced files with checksums. A persisted config re-executes to
/// byte-identical outputs, which the checksums witness.
class RunManifest {
 public:
  explicit RunManifest(const nlohmann::json& config)
      : config_hash_(sha256_hex(config.dump())), start_(std::chrono::steady_clock::now()) {
    doc_["config"] = config;
    doc_["config_sha256"] = config_hash_;
    doc_["library_version"] = kLibraryVersion;
    doc_["seed_scheme"] = "seed_i = base_seed + i (per batch element)";
  }

  void add_warning(const std::string& w) { warnings_.push_back(w); }
  void add_warnings(const std::vector<std::string>& ws) {
    for (const auto& w : ws) warnings_.push_back(w);
  }

  void add_output(const std::string& path) {
    nlohmann::json entry;
    entry["path"] = path;
    entry["sha256"] = sha256_file(path);
    entry["bytes"] = std::filesystem::file_size(path);
    outputs_.push_back(entry);
  }

  void stage_done(const std::string& name) {
    const auto now = std::chrono::steady_clock::now();
    nlohmann::json entry;
    entry["stage"] = name;
    entry["ms"] = std::chrono::duration<double, std::milli>(now - last_stage_).count();
    stages_.push_back(entry);
    last_stage_ = now;
  }

  const std::string& config_hash() const { return config_hash_; }

  nlohmann::json finalize() {
    doc_["wall_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    doc_["stages"] = stages_;
    doc_["warnings"] = warnings_;
    doc_["outputs"] = outputs_;
    return doc_;
  }

  void write(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("RunManifest: cannot open " + path);
    out << finalize().dump(2) << "\n";
  }

 private:
  nlohmann::json doc_;
  std::string config_hash_;
  std::vector<std::string> warnings_;
  nlohmann::json stages_ = nlohmann::json::array();
  nlohmann::json outputs_ = nlohmann::json::array();
  std::chrono::steady_clock::time_point start_;
  std::chrono::steady_clock::time_point last_stage_ = std::chrono::steady_clock::now();
};

}  // namespace pathreg::io
