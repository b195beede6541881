#pragma once

#include <filesystem>
#include <optional>

#include "tcsde/config.hpp"

namespace tcsde {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitFailure = 1;     // unexpected error
inline constexpr int kExitValidation = 2;  // config, parameter, range, data
inline constexpr int kExitHypothesis = 3;  // stability hypotheses violated
inline constexpr int kExitVerdict = 4;     // a numerical verdict failed
inline constexpr int kExitIo = 5;          // filesystem failure

// Thread-count resolution order: command-line flag, then the TCSDE_THREADS
// environment variable, then the config value, then 1.
unsigned resolve_threads(std::optional<unsigned> flag_value,
                         std::optional<unsigned> config_value);

void cmd_simulate(const SimulateConfig& cfg,
                  const std::filesystem::path& out_dir, unsigned threads);
void cmd_verify(const VerifyConfig& cfg, const std::filesystem::path& out_dir,
                unsigned threads);
void cmd_stability(const StabilityConfig& cfg,
                   const std::filesystem::path& out_dir, unsigned threads);
void cmd_ml_eval(const MlEvalConfig& cfg,
                 const std::filesystem::path& out_dir);

// Entry point shared by the binary and in-process tests: parses arguments,
// dispatches the subcommand, and maps exceptions onto exit codes. Never
// throws.
int run_cli(int argc, const char* const* argv);

}  // namespace tcsde
