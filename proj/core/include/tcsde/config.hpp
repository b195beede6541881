#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcsde/calculus.hpp"
#include "tcsde/sde.hpp"
#include "tcsde/stability.hpp"

namespace tcsde {

// View over a JSON object that tracks key consumption. finish() rejects
// leftovers by name, so config typos fail fast instead of being silently
// ignored.
class StrictObject {
 public:
  StrictObject(const nlohmann::json& j, std::string context);

  bool has(const std::string& key) const;

  double require_double(const std::string& key);
  double optional_double(const std::string& key, double fallback);
  std::uint64_t require_u64(const std::string& key);
  int optional_int(const std::string& key, int fallback);
  bool optional_bool(const std::string& key, bool fallback);
  std::string require_string(const std::string& key);
  std::string optional_string(const std::string& key, std::string fallback);
  std::vector<double> require_double_array(const std::string& key);
  std::optional<std::vector<double>> optional_double_array(
      const std::string& key);
  std::vector<std::string> optional_string_array(
      const std::string& key, std::vector<std::string> fallback);
  nlohmann::json require_object(const std::string& key);
  std::optional<nlohmann::json> optional_object(const std::string& key);
  nlohmann::json require_array(const std::string& key);
  std::optional<unsigned> optional_threads(const std::string& key);

  void finish() const;

  const std::string& context() const { return context_; }

 private:
  const nlohmann::json& fetch(const std::string& key);

  const nlohmann::json& j_;
  std::string context_;
  std::vector<std::string> consumed_;
};

// Reads and parses a JSON document; IoError when unreadable, DataError when
// not valid JSON or not an object.
nlohmann::json load_json_file(const std::filesystem::path& path);

SystemSpec system_spec_from_json(const nlohmann::json& j,
                                 const std::string& context);
nlohmann::json system_spec_to_json(const SystemSpec& spec);

struct SimulateConfig {
  double beta = 0.5;
  double horizon = 1.0;
  double delta = 1e-3;      // operational grid step
  double h = 1e-3;          // calendar output step
  SystemSpec system;
  std::uint64_t seed = 0;
  std::optional<unsigned> threads;
  double memory_budget_mb = 4096.0;
};

SimulateConfig simulate_config_from_json(const nlohmann::json& j);
nlohmann::json simulate_config_to_json(const SimulateConfig& cfg);

struct VerifyConfig {
  std::vector<CheckKind> checks;  // order preserved, duplicates rejected
  RefinementLadder ladder;
  int gronwall_paths = 100;
  std::uint64_t seed = 0;
  std::optional<unsigned> threads;
};

VerifyConfig verify_config_from_json(const nlohmann::json& j);
nlohmann::json verify_config_to_json(const VerifyConfig& cfg);

struct StabilityConfig {
  ExperimentDesign design;
  // When set, a power-law/exponential tail fit runs on the first moment
  // curve over [t_lo, t_hi].
  std::optional<std::pair<double, double>> tail_window;
  std::optional<unsigned> threads;
};

StabilityConfig stability_config_from_json(const nlohmann::json& j);
nlohmann::json stability_config_to_json(const StabilityConfig& cfg);

struct MlEvalPoint {
  double beta = 0.5;
  double z = 0.0;
};

struct MlEvalConfig {
  std::vector<MlEvalPoint> points;
  double rel_tol = 1e-10;
};

MlEvalConfig ml_eval_config_from_json(const nlohmann::json& j);
nlohmann::json ml_eval_config_to_json(const MlEvalConfig& cfg);

const char* check_kind_config_name(CheckKind kind);
CheckKind check_kind_from_config_name(const std::string& name,
                                      const std::string& context);

}  // namespace tcsde
