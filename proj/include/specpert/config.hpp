#pragma once

// Command-line and config-file handling for the specpert tool.
//
// Every setting has one key. The same key is used as a long flag (--key value)
// and in config files (key = value, '#' starts a comment, '_' and '-' are
// interchangeable). Flags override the config file, which overrides the
// per-subcommand defaults.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "specpert/experiments.hpp"

namespace specpert {

struct RunConfig {
  std::string subcommand;
  ExperimentConfig exp;
  std::string which = "fig1";
  std::string xi_phi = "bump:0.3,0.7";
  std::vector<double> s_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> hs_points{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double hs_margin = 0.05;
  std::filesystem::path output_dir = "out";
  std::string verbosity = "info";
  // Non-empty when --help was requested; nothing should run then.
  std::string help_text;

  /// Effective value of every key, formatted so that feeding the map back as a
  /// config file reproduces the run.
  std::map<std::string, std::string> echo() const;
};

/// Names of the subcommands, in help order.
const std::vector<std::string>& subcommand_names();

/// Parses argv (argv[0] is the program name). Throws ValidationError naming the
/// offending key or the violated constraint.
RunConfig parse_config(const std::vector<std::string>& args);

/// Applies `key = value` lines from a config file on top of cfg.
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

/// Sets one key from its textual value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Checks all numeric fields against the preconditions of the selected subcommand.
void validate(const RunConfig& cfg);

}  // namespace specpert
