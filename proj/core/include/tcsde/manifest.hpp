#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tcsde {

// Reproducibility record written only after every output landed: replaying
// the embedded config with the recorded seed regenerates files matching the
// recorded checksums. The timestamp is the one field that varies between
// identical runs.
struct RunManifest {
  struct Output {
    std::string name;
    std::uint64_t bytes = 0;
    std::string fnv1a64;
  };

  std::string command;
  std::string version;
  std::string created_utc;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  nlohmann::json config;
  std::vector<Output> outputs;

  void record_output(const std::string& name, std::string_view content);
  nlohmann::json to_json() const;
};

RunManifest make_manifest(std::string command, nlohmann::json config,
                          std::uint64_t seed, unsigned threads);
RunManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);

std::string utc_timestamp_now();

}  // namespace tcsde
