#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dfrt/config.hpp"

namespace dfrt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNonConvergence = 2;

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "DFRT_OUTPUT_DIR";

std::string code_version();

/// --out, then the config's output.dir, then $DFRT_OUTPUT_DIR, then
/// "dfrt_output".
std::filesystem::path resolve_output_dir(
    const std::optional<std::filesystem::path>& cli_out,
    const RunConfig& config);

struct RunOptions {
  std::filesystem::path output_dir;
  /// Overrides config.workers when positive.
  int workers = 0;
  bool verbose = false;
  std::ostream* log = nullptr;  // defaults to std::cerr
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status;  // "ok", "partial" or "failed"
  std::vector<std::filesystem::path> files;
  std::vector<std::string> errors;
};

/// Executes every computation the mode asks for, writes the tables and
/// `summary.txt` into options.output_dir and reports the exit status.
RunOutcome run(const RunConfig& config, const RunOptions& options);

/// Angle used by the single-angle modes: the middle entry of config.thetas.
double reference_theta(const RunConfig& config);

}  // namespace dfrt
