#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "rdr/cli/commands.hpp"
#include "rdr/errors.hpp"

namespace rdr::cli {

namespace {

const std::vector<std::pair<std::string, std::string>> kSubcommands = {
    {"backaction", "optomechanical linewidth and frequency shift versus detuning"},
    {"gain", "amplifier gain versus cooperativity and signal frequency"},
    {"noise", "added noise versus cooperativity"},
    {"dynamics", "mean-field trajectory, emission spectra and regime report"},
    {"feasibility", "pump powers and photon numbers for superconducting devices"},
    {"selftest", "run the invariant suites"},
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optomechanical response, gain and limit-cycle calculator", "rdr"};
  app.set_version_flag("--version", RDR_VERSION);
  app.require_subcommand(0, 1);

  std::string config_path, preset, out_dir = "out", format = "csv";
  bool corrupt_sigma = false;
  app.add_option("--config", config_path, "JSON config file (a previous manifest.json also works)");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--preset", preset, "built-in figure/table preset")
      ->check(CLI::IsMember(preset_names()));
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_flag("--inject-sigma-sign-error", corrupt_sigma, "selftest only: flip the sign of the self-energy")
      ->group("");

  for (const auto& [name, desc] : kSubcommands) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  std::string sub;
  if (!app.get_subcommands().empty()) sub = app.get_subcommands().front()->get_name();

  try {
    if (sub.empty()) {
      if (preset.empty()) {
        err << app.help();
        err << "error: give a subcommand or --preset\n";
        return 2;
      }
      sub = preset_subcommand(preset);
    } else if (!preset.empty() && preset_subcommand(preset) != sub) {
      throw ConfigError("preset '" + preset + "' belongs to '" + preset_subcommand(preset) + "', not '" + sub + "'");
    }

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.format = format == "json" ? Format::Json : Format::Csv;

    const auto t0 = std::chrono::steady_clock::now();
    json resolved = json::object();
    CommandOutput result;
    if (sub == "selftest") {
      std::filesystem::create_directories(ctx.out_dir);
      result = cmd_selftest(ctx, {corrupt_sigma}, out);
    } else {
      if (config_path.empty() && preset.empty()) {
        err << "error: " << sub << " needs --config <file> or --preset <name>\n";
        return 2;
      }
      json raw = preset.empty() ? json::object() : preset_config(preset);
      if (!config_path.empty()) raw = merge(raw, unwrap_manifest(load_config_file(config_path), sub));
      resolved = resolve_for(sub, raw);
      std::filesystem::create_directories(ctx.out_dir);
      result = run_command(sub, resolved, ctx);
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto manifest = write_manifest(sub, resolved, result, ctx, wall);

    for (const auto& w : result.warnings) err << "warning: " << w << '\n';
    for (const auto& f : result.files) out << (ctx.out_dir / f).string() << '\n';
    out << manifest.string() << '\n';
    if (result.exit_code != 0) err << "error: " << result.message << '\n';
    return result.exit_code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace rdr::cli
