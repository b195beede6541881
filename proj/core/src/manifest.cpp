#include "tcsde/manifest.hpp"

#include <ctime>

#include "tcsde/config.hpp"
#include "tcsde/csv.hpp"
#include "tcsde/version.hpp"

namespace tcsde {

std::string utc_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(std::string command, nlohmann::json config,
                          std::uint64_t seed, unsigned threads) {
  RunManifest m;
  m.command = std::move(command);
  m.version = std::string(kVersion);
  m.created_utc = utc_timestamp_now();
  m.seed = seed;
  m.threads = threads;
  m.config = std::move(config);
  return m;
}

void RunManifest::record_output(const std::string& name,
                                std::string_view content) {
  outputs.push_back({name, content.size(), fnv1a64_hex(content)});
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = version;
  j["created_utc"] = created_utc;
  j["seed"] = seed;
  j["threads"] = threads;
  j["config"] = config;
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& o : outputs) {
    outs.push_back(
        {{"name", o.name}, {"bytes", o.bytes}, {"fnv1a64", o.fnv1a64}});
  }
  j["outputs"] = std::move(outs);
  return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  StrictObject o(j, "manifest");
  RunManifest m;
  m.command = o.require_string("command");
  m.version = o.require_string("version");
  m.created_utc = o.require_string("created_utc");
  m.seed = o.require_u64("seed");
  m.threads = static_cast<unsigned>(o.optional_int("threads", 1));
  m.config = o.require_object("config");
  const nlohmann::json outs = o.require_array("outputs");
  for (const auto& e : outs) {
    StrictObject eo(e, "manifest: outputs entry");
    RunManifest::Output out;
    out.name = eo.require_string("name");
    out.bytes = eo.require_u64("bytes");
    out.fnv1a64 = eo.require_string("fnv1a64");
    eo.finish();
    m.outputs.push_back(std::move(out));
  }
  o.finish();
  return m;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_text_atomic(path, m.to_json().dump(2) + "\n");
}

}  // namespace tcsde
