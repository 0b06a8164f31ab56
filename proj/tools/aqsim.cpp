// aqsim: command-line front end for the transport, quantum-walk,
// Bose-Hubbard and validation engines.

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "aqs/config.hpp"
#include "aqs/io_util.hpp"
#include "aqs/runner.hpp"

namespace {

constexpr const char* kExitCodes =
    "Exit codes:\n"
    "  0  success\n"
    "  1  output could not be written / unexpected failure\n"
    "  2  invalid command line, config or input file\n"
    "  3  numerical failure (stiff integration, eigensolver non-convergence)\n"
    "  4  invariant violation (trace drift, rejected validation report, ...)\n";

std::string flag_name(const std::string& key) {
  std::string f = key;
  for (auto& c : f)
    if (c == '_') c = '-';
  return f;
}

// Extra short spellings for the Bose-Hubbard parameters.
std::string option_names(const std::string& command, const std::string& key) {
  if (command.rfind("bh-", 0) == 0) {
    if (key == "sites") return "-L,--sites";
    if (key == "bosons") return "-N,--bosons";
    if (key == "J") return "-J";
    if (key == "U") return "-U";
  }
  return "--" + flag_name(key);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aqsim: open-system transport, quantum walks and Bose-Hubbard spectroscopy"};
  app.footer(kExitCodes);
  app.set_version_flag("--version", std::string(aqs::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run an experiment described by a config file");
  run_cmd->add_option("config", config_path, "config file (key = value lines, first key 'command')")->required();

  std::map<std::string, std::map<std::string, std::string>> flag_values;
  std::map<std::string, CLI::App*> subcommands;
  std::map<std::string, std::vector<std::pair<std::string, CLI::Option*>>> options;
  for (const auto& command : aqs::command_names()) {
    auto* sub = app.add_subcommand(command, "run '" + command + "' with parameters given as flags");
    sub->footer(kExitCodes);
    subcommands[command] = sub;
    for (const auto& spec : aqs::command_keys(command)) {
      std::string help = spec.help;
      if (spec.default_value) help += " [default: " + *spec.default_value + "]";
      if (spec.required) help += " (required)";
      options[command].emplace_back(
          spec.key, sub->add_option(option_names(command, spec.key), flag_values[command][spec.key], help));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return aqs::kExitParse;
  }

  try {
    if (run_cmd->parsed()) {
      const auto config =
          aqs::parse_config(aqs::read_file(config_path), std::filesystem::path(config_path).parent_path());
      return aqs::run_and_report(config, std::cerr);
    }
    for (const auto& [command, sub] : subcommands) {
      if (!sub->parsed()) continue;
      std::vector<aqs::RawEntry> entries;
      for (const auto& [key, opt] : options[command])
        if (opt->count() > 0) entries.push_back({key, flag_values[command][key], 0});
      const auto config = aqs::validate_config(command, entries);
      return aqs::run_and_report(config, std::cerr);
    }
  } catch (...) {
    return aqs::exit_code_for_current_exception(std::cerr);
  }
  return aqs::kExitParse;
}
