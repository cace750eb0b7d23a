#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dfrt/config.hpp"
#include "dfrt/driver.hpp"
#include "dfrt/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Complex-scaled density-functional resonance toolkit"};
  app.set_version_flag("--version", dfrt::code_version());
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute the experiment described by a config file");
  std::string config_path;
  std::string out_dir;
  int workers = 0;
  bool verbose = false;
  run->add_option("config", config_path, "Path to the key = value config file")->required();
  run->add_option("--out", out_dir,
                  std::string("Output directory (default: config output.dir, then $") +
                      dfrt::kOutputDirEnv + ", then ./dfrt_output)");
  run->add_option("--workers", workers, "Concurrent sweep points")
      ->check(CLI::PositiveNumber);
  run->add_flag("--verbose", verbose, "Log progress to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? dfrt::kExitOk : dfrt::kExitConfigError;
  }

  dfrt::RunConfig config;
  try {
    config = dfrt::parse_config(config_path);
  } catch (const dfrt::Error& e) {
    std::cerr << "dfrt: configuration error: " << e.what() << '\n';
    return dfrt::kExitConfigError;
  }

  dfrt::RunOptions options;
  options.output_dir = dfrt::resolve_output_dir(
      out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir),
      config);
  options.workers = workers;
  options.verbose = verbose;
  const auto outcome = dfrt::run(config, options);
  if (verbose) {
    std::cerr << "dfrt: status " << outcome.status << ", output in "
              << options.output_dir.string() << '\n';
  }
  return outcome.exit_code;
}
