#include "rdr/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rdr/errors.hpp"
#include "rdr/spectrum.hpp"

namespace rdr::cli {

namespace {

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string field(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

const json& presets() {
  static const json p = [] {
    const json c_sweep = {{"start", 0.01}, {"stop", 1.5}, {"points", 150}};
    const json inset_sweep = {{"start", -52.0}, {"stop", -48.0}, {"points", 4001}, {"cooperativity", 0.8}};
    const json rel_sweep = {{"start", 0.02}, {"stop", 0.98}, {"points", 49}, {"relative_to_threshold", true}};
    json fig3b_runs = json::array();
    for (double g2 : {0.1, 0.2, 0.3}) {
      std::ostringstream label;
      label << "two_mode_g2_" << g2;
      fig3b_runs.push_back({{"label", label.str()},
                            {"mode", "two_mode"},
                            {"params", {{"coupling2", g2}}},
                            {"cooperativity_sweep", rel_sweep}});
    }
    fig3b_runs.push_back({{"label", "cancellation"},
                          {"mode", "cancellation"},
                          {"params", {{"gamma_m", 0.01}, {"n_th", 10.0}}},
                          {"cooperativity_sweep", {{"start", 0.05}, {"stop", 10.0}, {"points", 100}}}});
    return json{
        {"fig2", {{"subcommand", "backaction"}, {"config", json::object()}}},
        {"fig3a",
         {{"subcommand", "gain"},
          {"config",
           {{"runs",
             {{{"label", "one_mode_rdr"}, {"mode", "one_mode_rdr"}, {"cooperativity_sweep", c_sweep}},
              {{"label", "cancellation"}, {"mode", "cancellation"}, {"cooperativity_sweep", c_sweep}}}}}}}},
        {"fig3a_inset",
         {{"subcommand", "gain"},
          {"config",
           {{"runs",
             {{{"label", "one_mode_ndr"}, {"mode", "one_mode_ndr"}, {"signal_sweep", inset_sweep}},
              {{"label", "one_mode_rdr"}, {"mode", "one_mode_rdr"}, {"signal_sweep", inset_sweep}}}}}}}},
        {"fig3b", {{"subcommand", "noise"}, {"config", {{"runs", fig3b_runs}}}}},
        {"fig4_ndr", {{"subcommand", "dynamics"}, {"config", {{"regime", "ndr"}}}}},
        {"fig4_rdr", {{"subcommand", "dynamics"}, {"config", {{"regime", "rdr"}}}}},
        {"table1", {{"subcommand", "feasibility"}, {"config", {{"devices", {"teufel", "tin"}}}}}},
    };
  }();
  return p;
}

const json& preset_entry(std::string_view preset) {
  const auto& p = presets();
  auto it = p.find(std::string(preset));
  if (it == p.end()) throw ConfigError("unknown preset '" + std::string(preset) + "'");
  return *it;
}

}  // namespace

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + location(text, e.byte) + ": invalid JSON");
  }
}

json unwrap_manifest(const json& j, std::string_view subcommand) {
  if (j.is_object() && j.contains("subcommand") && j.contains("config")) {
    if (j["subcommand"] != subcommand)
      throw ConfigError("manifest was written by '" + j["subcommand"].dump() + "', not '" +
                        std::string(subcommand) + "'");
    return j["config"];
  }
  return j;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, _] : presets().items()) n.push_back(k);
    return n;
  }();
  return names;
}

std::string preset_subcommand(std::string_view preset) { return preset_entry(preset)["subcommand"]; }

json preset_config(std::string_view preset) { return preset_entry(preset)["config"]; }

json merge(json base, const json& patch) {
  base.merge_patch(patch);
  return base;
}

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError((where.empty() ? "config" : where) + ": expected a JSON object");
}

void reject_unknown(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  require_object(obj, where);
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(field(where, key) + ": unknown field");
}

double read_double(const json& obj, const std::string& key, const std::string& where,
                   std::optional<double> fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    throw ConfigError(field(where, key) + ": required number is missing");
  }
  if (!it->is_number()) throw ConfigError(field(where, key) + ": expected a number");
  return it->get<double>();
}

std::size_t read_count(const json& obj, const std::string& key, const std::string& where,
                       std::optional<std::size_t> fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    throw ConfigError(field(where, key) + ": required integer is missing");
  }
  if (!it->is_number_integer() || it->get<long long>() < 0)
    throw ConfigError(field(where, key) + ": expected a non-negative integer");
  return it->get<std::size_t>();
}

std::string read_string(const json& obj, const std::string& key, const std::string& where,
                        std::optional<std::string> fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (fallback) return *fallback;
    throw ConfigError(field(where, key) + ": required string is missing");
  }
  if (!it->is_string()) throw ConfigError(field(where, key) + ": expected a string");
  return it->get<std::string>();
}

bool read_bool(const json& obj, const std::string& key, const std::string& where, bool fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_boolean()) throw ConfigError(field(where, key) + ": expected true or false");
  return it->get<bool>();
}

std::vector<double> Sweep::grid() const { return linspace(start, stop, points); }

json Sweep::to_json() const { return {{"start", start}, {"stop", stop}, {"points", points}}; }

Sweep read_sweep(const json& j, const std::string& where, const std::vector<std::string>& extra_keys) {
  std::vector<std::string> allowed = {"start", "stop", "points"};
  allowed.insert(allowed.end(), extra_keys.begin(), extra_keys.end());
  reject_unknown(j, allowed, where);
  Sweep s{read_double(j, "start", where), read_double(j, "stop", where), read_count(j, "points", where)};
  if (!(s.start < s.stop)) throw RangeError(where + ": sweep start must be below stop (reversed or empty range)");
  if (s.points < 2) throw RangeError(where + ": sweep needs at least 2 points");
  return s;
}

}  // namespace rdr::cli
