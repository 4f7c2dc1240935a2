#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdr/cli/config.hpp"

namespace rdr::cli {

/// Column-typed output table written as CSV or as {"columns": [...], "rows": [[...]]}.
class Table {
 public:
  explicit Table(std::vector<std::string> header);
  void add(std::vector<json> row);
  std::size_t rows() const { return rows_.size(); }
  std::string csv() const;
  json to_json() const;
  /// Writes `<dir>/<stem>.csv|.json` and returns the file name.
  std::string write(const std::filesystem::path& dir, const std::string& stem, Format f) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<json>> rows_;
};

struct RunContext {
  std::filesystem::path out_dir = "out";
  Format format = Format::Csv;
};

struct CommandOutput {
  std::vector<std::string> files;  ///< names relative to the output directory
  std::vector<std::string> warnings;
  json summary = json::object();
  int exit_code = 0;
  std::string message;
};

// Each resolve_* fills every default and validates, so the result fully
// determines the run and is what the manifest records.
json resolve_backaction(const json& raw);
json resolve_amplifier(const json& raw);
json resolve_dynamics(const json& raw);
json resolve_feasibility(const json& raw);

CommandOutput cmd_backaction(const json& resolved, const RunContext& ctx);
CommandOutput cmd_gain(const json& resolved, const RunContext& ctx);
CommandOutput cmd_noise(const json& resolved, const RunContext& ctx);
CommandOutput cmd_dynamics(const json& resolved, const RunContext& ctx);
CommandOutput cmd_feasibility(const json& resolved, const RunContext& ctx);

struct SelftestOptions {
  bool corrupt_sigma = false;  ///< flips the sign of the self-energy (mutation check)
};
CommandOutput cmd_selftest(const RunContext& ctx, const SelftestOptions& opt, std::ostream& log);

json resolve_for(const std::string& subcommand, const json& raw);
CommandOutput run_command(const std::string& subcommand, const json& resolved, const RunContext& ctx);

/// Writes manifest.json into the output directory and returns its path.
std::filesystem::path write_manifest(const std::string& subcommand, const json& resolved,
                                     const CommandOutput& out, const RunContext& ctx, double wall_seconds);

/// Full command-line entry point. Exit codes: 0 success, 2 config error,
/// 3 numerical failure, 4 self-test failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rdr::cli
