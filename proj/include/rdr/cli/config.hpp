#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rdr::cli {

using nlohmann::json;

enum class Format { Csv, Json };

/// Parses a JSON file. Syntax errors become ConfigError with line and column.
json load_config_file(const std::filesystem::path& path);

/// A manifest written by an earlier run is accepted as a config: its "config"
/// member is returned after checking that the subcommand matches.
json unwrap_manifest(const json& j, std::string_view subcommand);

const std::vector<std::string>& preset_names();
/// Subcommand a preset belongs to. Throws ConfigError for unknown names.
std::string preset_subcommand(std::string_view preset);
/// Raw (unresolved) config of a preset.
json preset_config(std::string_view preset);

/// RFC 7386 merge of `patch` onto `base`.
json merge(json base, const json& patch);

// Field readers. `where` is the dotted path used in diagnostics, e.g. "runs[1].params".
void require_object(const json& j, const std::string& where);
void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& where);
double read_double(const json& obj, const std::string& key, const std::string& where,
                   std::optional<double> fallback = std::nullopt);
std::size_t read_count(const json& obj, const std::string& key, const std::string& where,
                       std::optional<std::size_t> fallback = std::nullopt);
std::string read_string(const json& obj, const std::string& key, const std::string& where,
                        std::optional<std::string> fallback = std::nullopt);
bool read_bool(const json& obj, const std::string& key, const std::string& where, bool fallback);

struct Sweep {
  double start = 0.0;
  double stop = 1.0;
  std::size_t points = 2;

  std::vector<double> grid() const;
  json to_json() const;
};

/// {"start", "stop", "points"}; start < stop and points >= 2 or RangeError.
Sweep read_sweep(const json& j, const std::string& where,
                 const std::vector<std::string>& extra_keys = {});

}  // namespace rdr::cli
