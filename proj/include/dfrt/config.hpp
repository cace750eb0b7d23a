#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dfrt/exact.hpp"
#include "dfrt/kohn_sham.hpp"
#include "dfrt/potentials.hpp"

namespace dfrt {

enum class RunMode {
  kExact2e,
  kExact1e,
  kScfXonly,
  kInvert,
  kCorrelation,
  kAffinity,
  kSweepLambda,
  kTableTheta,
};

std::string to_string(RunMode mode);
RunMode parse_mode(const std::string& text);

struct GridSpec {
  double x_min = -10.0;
  double x_max = 10.0;
  std::vector<int> points{299};
};

/// A fully validated run description.
///
/// The file format is flat `key = value` lines grouped by `[section]`
/// headers. Lists are comma separated. `#` and `;` start comments.
struct RunConfig {
  RunMode mode = RunMode::kExact1e;
  GridSpec grid;
  PotentialParams potential;
  std::vector<double> thetas{0.27, 0.35, 0.43};
  std::vector<double> lambdas{1.0};
  SCFConfig scf;
  InversionOptions inversion;
  std::filesystem::path output_dir;  // empty: decided by the caller
  std::vector<std::string> formats{"csv"};
  int workers = 1;

  /// Flat `section.key = value` listing of every effective setting, in a
  /// fixed order; used for config echoes in output files.
  std::vector<std::pair<std::string, std::string>> echo() const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

RunConfig parse_config_string(const std::string& text,
                              const std::string& source = "<string>");
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace dfrt
