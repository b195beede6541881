#include "tcsde/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tcsde/errors.hpp"

namespace tcsde {

StrictObject::StrictObject(const nlohmann::json& j, std::string context)
    : j_(j), context_(std::move(context)) {
  if (!j_.is_object()) {
    throw DataError(context_ + ": expected a JSON object");
  }
}

bool StrictObject::has(const std::string& key) const {
  return j_.contains(key);
}

const nlohmann::json& StrictObject::fetch(const std::string& key) {
  auto it = j_.find(key);
  if (it == j_.end()) {
    throw ParameterError(context_ + ": missing required field \"" + key +
                         "\"");
  }
  consumed_.push_back(key);
  return *it;
}

double StrictObject::require_double(const std::string& key) {
  const auto& v = fetch(key);
  if (!v.is_number()) {
    throw ParameterError(context_ + ": field \"" + key +
                         "\" must be a number");
  }
  return v.get<double>();
}

double StrictObject::optional_double(const std::string& key, double fallback) {
  return has(key) ? require_double(key) : fallback;
}

std::uint64_t StrictObject::require_u64(const std::string& key) {
  const auto& v = fetch(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  throw ParameterError(context_ + ": field \"" + key +
                       "\" must be a nonnegative integer");
}

int StrictObject::optional_int(const std::string& key, int fallback) {
  if (!has(key)) return fallback;
  const auto& v = fetch(key);
  if (!v.is_number_integer()) {
    throw ParameterError(context_ + ": field \"" + key +
                         "\" must be an integer");
  }
  return v.get<int>();
}

bool StrictObject::optional_bool(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const auto& v = fetch(key);
  if (!v.is_boolean()) {
    throw ParameterError(context_ + ": field \"" + key +
                         "\" must be a boolean");
  }
  return v.get<bool>();
}

std::string StrictObject::require_string(const std::string& key) {
  const auto& v = fetch(key);
  if (!v.is_string()) {
    throw ParameterError(context_ + ": field \"" + key +
                         "\" must be a string");
  }
  return v.get<std::string>();
}

std::string StrictObject::optional_string(const std::string& key,
                                          std::string fallback) {
  return has(key) ? require_string(key) : std::move(fallback);
}

std::vector<double> StrictObject::require_double_array(
    const std::string& key) {
  const auto& v = fetch(key);
  if (!v.is_array()) {
    throw ParameterError(context_ + ": field \"" + key +
                         "\" must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number()) {
      throw ParameterError(context_ + ": field \"" + key +
                           "\" must contain only numbers");
    }
    out.push_back(e.get<double>());
  }
  return out;
}

std::optional<std::vector<double>> StrictObject::optional_double_array(
    const std::string& key) {
  if (!has(key)) return std::nullopt;
  return require_double_array(key);
}

std::vector<std::string> StrictObject::optional_string_array(
    const std::string& key, std::vector<std::string> fallback) {
  if (!has(key)) return fallback;
  const auto& v = fetch(key);
  if (!v.is_array()) {
    throw ParameterError(context_ + ": field \"" + key +
                         "\" must be an array of strings");
  }
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) {
      throw ParameterError(context_ + ": field \"" + key +
                           "\" must contain only strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

nlohmann::json StrictObject::require_object(const std::string& key) {
  const auto& v = fetch(key);
  if (!v.is_object()) {
    throw ParameterError(context_ + ": field \"" + key +
                         "\" must be an object");
  }
  return v;
}

std::optional<nlohmann::json> StrictObject::optional_object(
    const std::string& key) {
  if (!has(key)) return std::nullopt;
  return require_object(key);
}

nlohmann::json StrictObject::require_array(const std::string& key) {
  const auto& v = fetch(key);
  if (!v.is_array()) {
    throw ParameterError(context_ + ": field \"" + key +
                         "\" must be an array");
  }
  return v;
}

std::optional<unsigned> StrictObject::optional_threads(
    const std::string& key) {
  if (!has(key)) return std::nullopt;
  const int n = optional_int(key, 1);
  if (n < 1) {
    throw ParameterError(context_ + ": field \"" + key + "\" must be >= 1");
  }
  return static_cast<unsigned>(n);
}

void StrictObject::finish() const {
  std::vector<std::string> unknown;
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (std::find(consumed_.begin(), consumed_.end(), it.key()) ==
        consumed_.end()) {
      unknown.push_back(it.key());
    }
  }
  if (!unknown.empty()) {
    std::sort(unknown.begin(), unknown.end());
    std::string msg = context_ + ": unknown field";
    if (unknown.size() > 1) msg += 's';
    for (std::size_t i = 0; i < unknown.size(); ++i) {
      msg += (i == 0 ? " \"" : ", \"") + unknown[i] + "\"";
    }
    throw ParameterError(msg);
  }
}

nlohmann::json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError("config file " + path.string() +
                    " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw DataError("config file " + path.string() +
                    " must hold a JSON object");
  }
  return j;
}

namespace {

const char* clock_name(LinearClock c) {
  return c == LinearClock::natural ? "natural" : "operational";
}

LinearClock clock_from_name(const std::string& s, const std::string& ctx) {
  if (s == "natural") return LinearClock::natural;
  if (s == "operational") return LinearClock::operational;
  throw ParameterError(ctx + ": \"clock\" must be \"natural\" or "
                             "\"operational\", got \"" + s + "\"");
}

const char* perturbation_name(Perturbation p) {
  switch (p) {
    case Perturbation::none:
      return "none";
    case Perturbation::drift_in_clock:
      return "drift_in_clock";
    case Perturbation::diffusion_in_clock_brownian:
      return "diffusion_in_clock_brownian";
  }
  return "none";
}

Perturbation perturbation_from_name(const std::string& s,
                                    const std::string& ctx) {
  if (s == "none") return Perturbation::none;
  if (s == "drift_in_clock") return Perturbation::drift_in_clock;
  if (s == "diffusion_in_clock_brownian") {
    return Perturbation::diffusion_in_clock_brownian;
  }
  throw ParameterError(ctx +
                       ": \"perturbation\" must be one of \"none\", "
                       "\"drift_in_clock\", "
                       "\"diffusion_in_clock_brownian\", got \"" + s + "\"");
}

const char* gain_kind_name(GFunction::Kind k) {
  switch (k) {
    case GFunction::Kind::zero:
      return "zero";
    case GFunction::Kind::exp_decay:
      return "exp_decay";
    case GFunction::Kind::power:
      return "power";
    case GFunction::Kind::compact:
      return "compact";
  }
  return "zero";
}

GFunction gain_from_json(const nlohmann::json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  const std::string kind = o.require_string("kind");
  if (kind == "zero") {
    o.finish();
    return GFunction::zero();
  }
  const double c = o.require_double("c");
  const double a = o.require_double("a");
  o.finish();
  if (kind == "exp_decay") return GFunction::exp_decay(c, a);
  if (kind == "power") return GFunction::power(c, a);
  if (kind == "compact") return GFunction::compact(c, a);
  throw ParameterError(ctx +
                       ": \"kind\" must be one of \"zero\", \"exp_decay\", "
                       "\"power\", \"compact\", got \"" + kind + "\"");
}

nlohmann::json gain_to_json(const GFunction& g) {
  nlohmann::json j;
  j["kind"] = gain_kind_name(g.kind);
  if (g.kind != GFunction::Kind::zero) {
    j["c"] = g.c;
    j["a"] = g.a;
  }
  return j;
}

}  // namespace

SystemSpec system_spec_from_json(const nlohmann::json& j,
                                 const std::string& context) {
  StrictObject o(j, context);
  SystemSpec spec;

  const nlohmann::json rows = o.require_array("matrix");
  const auto n = rows.size();
  if (n == 0) {
    throw ParameterError(context + ": \"matrix\" must be nonempty");
  }
  spec.a.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || row.size() != n) {
      throw ParameterError(context + ": \"matrix\" must be square (row " +
                           std::to_string(r) + " has the wrong length)");
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!row[c].is_number()) {
        throw ParameterError(context + ": \"matrix\" entries must be numbers");
      }
      spec.a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          row[c].get<double>();
    }
  }

  spec.linear_clock =
      clock_from_name(o.optional_string("clock", "operational"), context);
  spec.perturbation = perturbation_from_name(
      o.optional_string("perturbation", "none"), context);
  if (auto gain = o.optional_object("gain")) {
    spec.g = gain_from_json(*gain, context + ": gain");
  }
  const std::vector<double> x0 = o.require_double_array("x0");
  spec.x0 = Eigen::Map<const Eigen::VectorXd>(
      x0.data(), static_cast<Eigen::Index>(x0.size()));
  spec.saturating = o.optional_bool("saturating", false);
  o.finish();
  spec.validate();
  return spec;
}

nlohmann::json system_spec_to_json(const SystemSpec& spec) {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < spec.a.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < spec.a.cols(); ++c) row.push_back(spec.a(r, c));
    rows.push_back(std::move(row));
  }
  j["matrix"] = std::move(rows);
  j["clock"] = clock_name(spec.linear_clock);
  j["perturbation"] = perturbation_name(spec.perturbation);
  j["gain"] = gain_to_json(spec.g);
  nlohmann::json x0 = nlohmann::json::array();
  for (Eigen::Index i = 0; i < spec.x0.size(); ++i) x0.push_back(spec.x0(i));
  j["x0"] = std::move(x0);
  j["saturating"] = spec.saturating;
  return j;
}

SimulateConfig simulate_config_from_json(const nlohmann::json& j) {
  StrictObject o(j, "simulate config");
  SimulateConfig cfg;
  cfg.beta = o.require_double("beta");
  cfg.horizon = o.require_double("horizon");
  cfg.delta = o.require_double("delta");
  cfg.h = o.optional_double("h", cfg.delta);
  cfg.seed = o.require_u64("seed");
  cfg.threads = o.optional_threads("threads");
  cfg.memory_budget_mb = o.optional_double("memory_budget_mb", 4096.0);
  cfg.system = system_spec_from_json(o.require_object("system"),
                                     "simulate config: system");
  o.finish();

  StableParams check_beta(cfg.beta);
  (void)check_beta;
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
    throw ParameterError("simulate config: \"horizon\" must be > 0");
  }
  if (!(cfg.delta > 0.0) || !(cfg.h > 0.0)) {
    throw ParameterError("simulate config: \"delta\" and \"h\" must be > 0");
  }
  if (!(cfg.memory_budget_mb > 0.0)) {
    throw ParameterError("simulate config: \"memory_budget_mb\" must be > 0");
  }
  return cfg;
}

nlohmann::json simulate_config_to_json(const SimulateConfig& cfg) {
  nlohmann::json j;
  j["beta"] = cfg.beta;
  j["horizon"] = cfg.horizon;
  j["delta"] = cfg.delta;
  j["h"] = cfg.h;
  j["seed"] = cfg.seed;
  if (cfg.threads) j["threads"] = *cfg.threads;
  j["memory_budget_mb"] = cfg.memory_budget_mb;
  j["system"] = system_spec_to_json(cfg.system);
  return j;
}

const char* check_kind_config_name(CheckKind kind) {
  return check_kind_name(kind);
}

CheckKind check_kind_from_config_name(const std::string& name,
                                      const std::string& context) {
  if (name == "change_of_variable_1") return CheckKind::change_of_variable_1;
  if (name == "change_of_variable_2") return CheckKind::change_of_variable_2;
  if (name == "gronwall_bound") return CheckKind::gronwall_bound;
  if (name == "ito_identity") return CheckKind::ito_identity;
  throw ParameterError(context + ": unknown check \"" + name +
                       "\" (expected change_of_variable_1, "
                       "change_of_variable_2, gronwall_bound, ito_identity)");
}

VerifyConfig verify_config_from_json(const nlohmann::json& j) {
  StrictObject o(j, "verify config");
  VerifyConfig cfg;
  const std::vector<std::string> names = o.optional_string_array(
      "checks", {"change_of_variable_1", "change_of_variable_2",
                 "gronwall_bound", "ito_identity"});
  if (names.empty()) {
    throw ParameterError("verify config: \"checks\" must be nonempty");
  }
  for (const auto& name : names) {
    const CheckKind kind = check_kind_from_config_name(name, "verify config");
    if (std::find(cfg.checks.begin(), cfg.checks.end(), kind) !=
        cfg.checks.end()) {
      throw ParameterError("verify config: check \"" + name +
                           "\" listed twice");
    }
    cfg.checks.push_back(kind);
  }
  cfg.ladder.beta = o.optional_double("beta", 0.5);
  cfg.ladder.h0 = o.optional_double("h0", 0.02);
  cfg.ladder.delta0 = o.optional_double("delta0", 0.02);
  cfg.ladder.rungs = o.optional_int("rungs", 4);
  cfg.ladder.paths_per_rung = o.optional_int("paths_per_rung", 8);
  cfg.ladder.horizon = o.optional_double("horizon", 1.0);
  cfg.gronwall_paths = o.optional_int("gronwall_paths", 100);
  cfg.seed = o.require_u64("seed");
  cfg.ladder.seed = cfg.seed;
  cfg.threads = o.optional_threads("threads");
  o.finish();

  StableParams check_beta(cfg.ladder.beta);
  (void)check_beta;
  if (!(cfg.ladder.h0 > 0.0) || !(cfg.ladder.delta0 > 0.0) ||
      !(cfg.ladder.horizon > 0.0)) {
    throw ParameterError("verify config: steps and horizon must be > 0");
  }
  if (cfg.ladder.rungs < 1 || cfg.ladder.paths_per_rung < 1) {
    throw ParameterError(
        "verify config: \"rungs\" and \"paths_per_rung\" must be >= 1");
  }
  if (cfg.gronwall_paths < 1) {
    throw ParameterError("verify config: \"gronwall_paths\" must be >= 1");
  }
  return cfg;
}

nlohmann::json verify_config_to_json(const VerifyConfig& cfg) {
  nlohmann::json j;
  nlohmann::json checks = nlohmann::json::array();
  for (CheckKind k : cfg.checks) checks.push_back(check_kind_config_name(k));
  j["checks"] = std::move(checks);
  j["beta"] = cfg.ladder.beta;
  j["h0"] = cfg.ladder.h0;
  j["delta0"] = cfg.ladder.delta0;
  j["rungs"] = cfg.ladder.rungs;
  j["paths_per_rung"] = cfg.ladder.paths_per_rung;
  j["horizon"] = cfg.ladder.horizon;
  j["gronwall_paths"] = cfg.gronwall_paths;
  j["seed"] = cfg.seed;
  if (cfg.threads) j["threads"] = *cfg.threads;
  return j;
}

StabilityConfig stability_config_from_json(const nlohmann::json& j) {
  StrictObject o(j, "stability config");
  StabilityConfig cfg;
  cfg.design.system = system_spec_from_json(o.require_object("system"),
                                            "stability config: system");
  cfg.design.beta = o.require_double("beta");
  cfg.design.n_paths = o.optional_int("n_paths", 1000);
  cfg.design.h = o.optional_double("h", 0.01);
  cfg.design.delta = o.optional_double("delta", 0.005);
  cfg.design.horizon = o.optional_double("horizon", 10.0);
  if (auto times = o.optional_double_array("observation_times")) {
    cfg.design.observation_times = *times;
  }
  if (auto ps = o.optional_double_array("p_values")) {
    cfg.design.p_values = *ps;
  }
  cfg.design.seed = o.require_u64("seed");
  cfg.threads = o.optional_threads("threads");
  if (cfg.threads) cfg.design.threads = *cfg.threads;
  if (auto w = o.optional_object("tail_window")) {
    StrictObject tw(*w, "stability config: tail_window");
    const double lo = tw.require_double("t_lo");
    const double hi = tw.require_double("t_hi");
    tw.finish();
    if (!(lo > 0.0) || !(hi > lo)) {
      throw ParameterError(
          "stability config: tail_window needs 0 < t_lo < t_hi");
    }
    cfg.tail_window = std::make_pair(lo, hi);
  }
  o.finish();
  cfg.design.validate();
  return cfg;
}

nlohmann::json stability_config_to_json(const StabilityConfig& cfg) {
  nlohmann::json j;
  j["system"] = system_spec_to_json(cfg.design.system);
  j["beta"] = cfg.design.beta;
  j["n_paths"] = cfg.design.n_paths;
  j["h"] = cfg.design.h;
  j["delta"] = cfg.design.delta;
  j["horizon"] = cfg.design.horizon;
  if (!cfg.design.observation_times.empty()) {
    j["observation_times"] = cfg.design.observation_times;
  }
  j["p_values"] = cfg.design.p_values;
  j["seed"] = cfg.design.seed;
  if (cfg.threads) j["threads"] = *cfg.threads;
  if (cfg.tail_window) {
    j["tail_window"] = {{"t_lo", cfg.tail_window->first},
                        {"t_hi", cfg.tail_window->second}};
  }
  return j;
}

MlEvalConfig ml_eval_config_from_json(const nlohmann::json& j) {
  StrictObject o(j, "ml-eval config");
  MlEvalConfig cfg;
  const nlohmann::json pts = o.require_array("points");
  if (pts.empty()) {
    throw ParameterError("ml-eval config: \"points\" must be nonempty");
  }
  for (const auto& p : pts) {
    StrictObject po(p, "ml-eval config: points entry");
    MlEvalPoint pt;
    pt.beta = po.require_double("beta");
    pt.z = po.require_double("z");
    po.finish();
    cfg.points.push_back(pt);
  }
  cfg.rel_tol = o.optional_double("rel_tol", 1e-10);
  o.finish();
  if (!(cfg.rel_tol > 0.0) || cfg.rel_tol > 1e-4) {
    throw ParameterError("ml-eval config: \"rel_tol\" must be in (0, 1e-4]");
  }
  return cfg;
}

nlohmann::json ml_eval_config_to_json(const MlEvalConfig& cfg) {
  nlohmann::json j;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : cfg.points) {
    pts.push_back({{"beta", p.beta}, {"z", p.z}});
  }
  j["points"] = std::move(pts);
  j["rel_tol"] = cfg.rel_tol;
  return j;
}

}  // namespace tcsde
