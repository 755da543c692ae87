#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/config.hpp"

namespace g2mu::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kMathFailure = 1, kInputFailure = 2 };

struct RunOptions {
  std::string command;
  std::string config_path;
  std::optional<std::string> radius_sq;  // overrides oracle_radius_sq
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string output = "json";  // json | csv
  bool strict_types = false;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct CommandResult {
  nlohmann::ordered_json result;
  CsvTable table;
  bool ok = true;
  nlohmann::ordered_json error;  // set when a validation failure is reported with partial results
};

const std::vector<std::string>& command_names();
double default_tolerance(const std::string& command);

/// Runs one subcommand on an already parsed config. Validation failures
/// (non-G2 elements, infinite groups) propagate as exceptions.
CommandResult run_command(const std::string& command, const OrbifoldConfig& config, const RunOptions& options);

/// Loads the config, runs the command and writes the report. Returns the
/// process exit code; diagnostics go to `err`.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Argument parsing front end used by the executable.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

void write_csv(std::ostream& out, const CsvTable& table);

}  // namespace g2mu::cli
