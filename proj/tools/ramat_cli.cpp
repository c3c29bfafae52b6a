#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "ramat/errors.hpp"
#include "ramat/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& config_path, bool serial) {
  try {
    const ramat::Scenario scenario = ramat::parse_scenario_file(config_path);
    return ramat::run_scenario(
        scenario, std::cout,
        serial ? ramat::RunPolicy::Serial : ramat::RunPolicy::Parallel);
  } catch (const ramat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ramat::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ramat::kExitRuntimeError;
  }
}

int cmd_validate(const std::string& config_path) {
  try {
    const ramat::Scenario scenario = ramat::parse_scenario_file(config_path);
    std::cout << "ok: " << scenario.name << " (" << to_string(scenario.method)
              << ")\n";
    return ramat::kExitOk;
  } catch (const ramat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return ramat::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ramat::kExitRuntimeError;
  }
}

int cmd_list(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    std::cerr << "error: no scenario directory at " << dir << "\n";
    return ramat::kExitIoError;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".cfg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    try {
      const ramat::Scenario s = ramat::parse_scenario_file(file.string());
      std::cout << s.name << "  [" << to_string(s.method) << "]  "
                << file.string() << "\n";
    } catch (const std::exception& e) {
      std::cout << file.string() << "  (invalid: " << e.what() << ")\n";
    }
  }
  return ramat::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ramat - transient analysis toolkit for random access MAC protocols"};
  app.require_subcommand(1);

  std::string config_path;
  bool serial = false;
  CLI::App* run = app.add_subcommand("run", "run a scenario config");
  run->add_option("config", config_path, "scenario config file")->required();
  run->add_flag("--serial", serial,
                "run replications on a single worker (RAMAT_WORKERS also "
                "limits the pool)");

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "parse and check a scenario config");
  validate->add_option("config", validate_path, "scenario config file")
      ->required();

  std::string scenario_dir = "scenarios";
  CLI::App* list =
      app.add_subcommand("list-scenarios", "list shipped scenario configs");
  list->add_option("dir", scenario_dir, "directory to scan (default: scenarios)");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(config_path, serial);
  if (validate->parsed()) return cmd_validate(validate_path);
  return cmd_list(scenario_dir);
}
