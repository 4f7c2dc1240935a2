#include "rdr/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>

#include "rdr/core.hpp"
#include "rdr/dynamics.hpp"
#include "rdr/errors.hpp"
#include "rdr/feasibility.hpp"
#include "rdr/io.hpp"
#include "rdr/linear_response.hpp"
#include "rdr/selftest.hpp"
#include "rdr/three_mode.hpp"

#ifndef RDR_VERSION
#define RDR_VERSION "unknown"
#endif

namespace rdr::cli {

namespace lr = linear_response;
namespace tm3 = three_mode;
namespace dyn = dynamics;
namespace fz = feasibility;

namespace {

// ---------------------------------------------------------------- output table

std::string cell_text(const json& v) {
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

// JSON has no inf/nan; they are written as strings so nothing is silently lost.
json finite_or_text(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

std::string write_json(const std::filesystem::path& dir, const std::string& name, const json& j) {
  write_text_file(dir / name, j.dump(2) + "\n");
  return name;
}

std::string with_prefix(const std::string& where, const std::exception& e) {
  return where + ": " + e.what();
}

SystemParams parse_system(const json& j, const std::string& where) {
  try {
    return system_params_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(with_prefix(where, e));
  }
}

ThreeModeParams parse_three_mode(const json& j, const std::string& where) {
  try {
    return three_mode_params_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(with_prefix(where, e));
  }
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from) {
  to.insert(to.end(), from.begin(), from.end());
}

json peak_json(const lr::PeakMetrics& m) {
  return {{"center", finite_or_text(m.center)},
          {"peak", finite_or_text(m.peak)},
          {"hwhm", finite_or_text(m.hwhm)},
          {"fwhm", finite_or_text(2.0 * m.hwhm)},
          {"gain_bandwidth", finite_or_text(m.gain_bandwidth())}};
}

double capped(double g) { return std::isfinite(g) && g < lr::kGainCap ? g : lr::kGainCap; }

// ------------------------------------------------------------------ amplifier

enum class Mode { OneModeRdr, OneModeNdr, TwoMode, Cancellation };

Mode parse_mode(const std::string& s, const std::string& where) {
  if (s == "one_mode_rdr") return Mode::OneModeRdr;
  if (s == "one_mode_ndr") return Mode::OneModeNdr;
  if (s == "two_mode") return Mode::TwoMode;
  if (s == "cancellation") return Mode::Cancellation;
  throw ConfigError(where + ": mode must be one_mode_rdr, one_mode_ndr, two_mode or cancellation");
}

bool is_one_mode(Mode m) { return m == Mode::OneModeRdr || m == Mode::OneModeNdr; }

json mode_defaults(Mode m) {
  switch (m) {
    case Mode::OneModeRdr:
      return {{"kappa", 1.0}, {"gamma_m", 10.0}, {"omega_m", 50.0}, {"n_th", 0.0}};
    case Mode::OneModeNdr:
      return {{"kappa", 1.0}, {"gamma_m", 0.1}, {"omega_m", 50.0}, {"n_th", 0.0}};
    case Mode::TwoMode:
      return {{"kappa", 1.0}, {"gamma_m", 0.01}, {"omega_m", 50.0},
              {"n_th", 10.0}, {"kappa2", 5.0},   {"coupling2", 0.3}};
    case Mode::Cancellation:
      return {{"kappa", 1.0}, {"gamma_m", 10.0}, {"omega_m", 50.0}, {"n_th", 0.0}};
  }
  return json::object();
}

struct AmpRun {
  std::string label;
  Mode mode = Mode::OneModeRdr;
  ThreeModeParams params;  // base only for one-mode and cancellation
  std::optional<Sweep> coop;
  bool relative = false;
  std::optional<Sweep> signal;
  double signal_coop = 0.0;
};

AmpRun read_run(const json& j, const std::string& where) {
  reject_unknown(j, {"label", "mode", "params", "cooperativity_sweep", "signal_sweep"}, where);
  AmpRun r;
  const std::string mode_name = read_string(j, "mode", where, std::string("one_mode_rdr"));
  r.mode = parse_mode(mode_name, where + ".mode");
  r.label = read_string(j, "label", where, mode_name);
  json params = merge(mode_defaults(r.mode), j.value("params", json::object()));
  // Blue sideband for the amplifier mode unless stated otherwise.
  if (params.is_object() && !params.contains("detuning") && params.contains("omega_m"))
    params["detuning"] = params["omega_m"];
  if (r.mode == Mode::TwoMode) {
    r.params = parse_three_mode(params, where + ".params");
  } else {
    r.params.base = parse_system(params, where + ".params");
    if (r.mode == Mode::Cancellation) r.params = tm3::cancellation_params(r.params.base);
  }
  if (auto it = j.find("cooperativity_sweep"); it != j.end() && !it->is_null()) {
    const std::string w = where + ".cooperativity_sweep";
    r.coop = read_sweep(*it, w, {"relative_to_threshold"});
    r.relative = read_bool(*it, "relative_to_threshold", w, false);
    if (r.relative && r.mode != Mode::TwoMode)
      throw ConfigError(w + ".relative_to_threshold: only two_mode runs have a finite threshold");
    if (r.coop->start < 0.0) throw RangeError(w + ": cooperativity must be >= 0");
  }
  if (auto it = j.find("signal_sweep"); it != j.end() && !it->is_null()) {
    const std::string w = where + ".signal_sweep";
    r.signal = read_sweep(*it, w, {"cooperativity"});
    r.signal_coop = read_double(*it, "cooperativity", w);
    if (r.signal_coop < 0.0) throw RangeError(w + ".cooperativity: must be >= 0");
  }
  if (!r.coop && !r.signal) throw ConfigError(where + ": needs cooperativity_sweep and/or signal_sweep");
  return r;
}

json run_to_json(const AmpRun& r) {
  static const char* names[] = {"one_mode_rdr", "one_mode_ndr", "two_mode", "cancellation"};
  json j = {{"label", r.label}, {"mode", names[static_cast<int>(r.mode)]}};
  j["params"] = r.mode == Mode::TwoMode ? to_json(r.params) : to_json(r.params.base);
  if (r.mode != Mode::TwoMode) j["params"].erase("coupling");
  j["cooperativity_sweep"] = nullptr;
  j["signal_sweep"] = nullptr;
  if (r.coop) {
    j["cooperativity_sweep"] = r.coop->to_json();
    j["cooperativity_sweep"]["relative_to_threshold"] = r.relative;
  }
  if (r.signal) {
    j["signal_sweep"] = r.signal->to_json();
    j["signal_sweep"]["cooperativity"] = r.signal_coop;
  }
  return j;
}

std::vector<AmpRun> read_runs(const json& resolved) {
  std::vector<AmpRun> runs;
  const auto& arr = resolved.at("runs");
  for (std::size_t i = 0; i < arr.size(); ++i) runs.push_back(read_run(arr[i], "runs[" + std::to_string(i) + "]"));
  return runs;
}

// Parameters of a run at mode-1 cooperativity c.
ThreeModeParams at_cooperativity(const AmpRun& r, double c) {
  ThreeModeParams t = r.params;
  t.base.coupling = coupling_for_cooperativity(c, t.base.gamma_m, t.base.kappa);
  if (r.mode == Mode::Cancellation) t = tm3::cancellation_params(t.base);
  return t;
}

double threshold_of(const AmpRun& r) {
  const auto mech = tm3::effective_mechanics(r.params);
  return tm3::instability_cooperativity(r.params, 2.0 * std::max(1.0, mech.instability_coop) + 1.0);
}

struct AmpPoint {
  double gain = NAN, gain_rwa = NAN, gain_weak = NAN, gain_bandwidth = NAN;
  double noise = NAN, noise_rwa = NAN, noise_limit = NAN;
  bool stable = false;
};

double search_width(const ThreeModeParams& t) {
  const auto mech = tm3::effective_mechanics(t);
  return 3.0 * std::max({t.base.kappa, t.kappa2, mech.gamma_eff, t.base.gamma_m});
}

AmpPoint evaluate(const AmpRun& r, double c) {
  AmpPoint pt;
  const ThreeModeParams t = at_cooperativity(r, c);
  if (is_one_mode(r.mode)) {
    const SystemParams& p = t.base;
    pt.stable = lr::is_stable(p);
    const double w = lr::resonance_frequency(p);
    try {
      pt.gain = capped(lr::resonant_gain(p));
    } catch (const PoleAtFrequency&) {
      pt.gain = lr::kGainCap;
    }
    pt.gain_rwa = capped(lr::rwa_gain(c));
    pt.gain_weak = capped(lr::weak_coupling_gain(w, p, lr::backaction(p)).value_or(lr::kGainCap));
    try {
      pt.noise = lr::added_noise(p, w);
    } catch (const NumericalError&) {
    }
    pt.noise_rwa = lr::rwa_added_noise(c, p.n_th);
    pt.noise_limit = p.n_th + 0.5;
    return pt;
  }
  pt.stable = tm3::is_stable(t);
  pt.noise_limit = tm3::effective_mechanics(t).n_eff + 0.5;
  try {
    const auto gn = tm3::resonant_point(t);
    pt.gain = capped(gn.gain);
    pt.noise = gn.noise;
  } catch (const NumericalError&) {
    pt.gain = lr::kGainCap;
  }
  if (r.mode == Mode::Cancellation) {
    const double width = search_width(t);
    auto gain_at = [&](double w) { return capped(tm3::two_mode_point(w, t).gain); };
    pt.gain_bandwidth = lr::measure_peak(gain_at, tm3::resonance_frequency(t, width), width).gain_bandwidth();
  }
  return pt;
}

std::vector<double> cooperativity_grid(const AmpRun& r, double& c_star) {
  auto grid = r.coop->grid();
  c_star = NAN;
  if (r.mode == Mode::TwoMode) {
    try {
      c_star = threshold_of(r);
    } catch (const NoFlipInRange&) {
      if (r.relative) throw;
    }
  }
  if (r.relative)
    for (double& c : grid) c *= c_star;
  return grid;
}

Table vs_c_table(const AmpRun& r, bool noise_view, double& c_star) {
  const auto grid = cooperativity_grid(r, c_star);
  std::vector<std::string> cols = {"cooperativity", "coupling"};
  if (r.relative) cols.push_back("c_over_threshold");
  if (noise_view) {
    cols.insert(cols.end(), {"noise", is_one_mode(r.mode) ? "noise_rwa" : "noise_limit", "gain", "stable"});
  } else if (is_one_mode(r.mode)) {
    cols.insert(cols.end(), {"gain", "gain_rwa", "gain_weak", "stable"});
  } else if (r.mode == Mode::Cancellation) {
    cols.insert(cols.end(), {"gain", "gain_bandwidth", "stable"});
  } else {
    cols.insert(cols.end(), {"gain", "stable"});
  }
  Table t(cols);
  for (double c : grid) {
    const AmpPoint pt = evaluate(r, c);
    std::vector<json> row = {c, at_cooperativity(r, c).base.coupling};
    if (r.relative) row.push_back(c / c_star);
    if (noise_view) {
      row.insert(row.end(), {pt.noise, is_one_mode(r.mode) ? pt.noise_rwa : pt.noise_limit, pt.gain, pt.stable});
    } else if (is_one_mode(r.mode)) {
      row.insert(row.end(), {pt.gain, pt.gain_rwa, pt.gain_weak, pt.stable});
    } else if (r.mode == Mode::Cancellation) {
      row.insert(row.end(), {pt.gain, pt.gain_bandwidth, pt.stable});
    } else {
      row.insert(row.end(), {pt.gain, pt.stable});
    }
    t.add(std::move(row));
  }
  return t;
}

struct SignalResult {
  Table table;
  json summary;
};

SignalResult signal_table(const AmpRun& r, bool noise_view) {
  const ThreeModeParams t = at_cooperativity(r, r.signal_coop);
  const auto grid = r.signal->grid();
  const double center = 0.5 * (r.signal->start + r.signal->stop);
  const double half = 0.5 * (r.signal->stop - r.signal->start);
  json summary = {{"cooperativity", r.signal_coop}};

  if (is_one_mode(r.mode)) {
    const SystemParams& p = t.base;
    const auto gs = lr::gain_spectrum(grid, p);
    const auto ba = lr::backaction(p);
    summary["stable"] = lr::is_stable(p);
    summary["kappa_eff"] = ba.kappa_eff;
    summary["resonance"] = lr::resonance_frequency(p);
    const double guess = std::clamp(lr::resonance_frequency(p), r.signal->start, r.signal->stop);
    auto exact = [&](double w) {
      try {
        return capped(std::norm(lr::scattering_coeffs(w, p).a_coef));
      } catch (const PoleAtFrequency&) {
        return lr::kGainCap;
      }
    };
    auto weak = [&](double w) { return capped(lr::weak_coupling_gain(w, p, ba).value_or(lr::kGainCap)); };
    summary["peak_exact"] = peak_json(lr::measure_peak(exact, guess, half));
    summary["peak_weak"] = peak_json(lr::measure_peak(weak, guess, half));

    Table tab(noise_view ? std::vector<std::string>{"delta_s", "noise", "gain"}
                         : std::vector<std::string>{"delta_s", "gain", "gain_weak", "at_pole"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (noise_view) {
        double n = NAN;
        try {
          n = lr::added_noise(p, grid[i]);
        } catch (const NumericalError&) {
        }
        tab.add({grid[i], n, gs.exact.values[i].real()});
      } else {
        tab.add({grid[i], gs.exact.values[i].real(), gs.weak.values[i].real(), static_cast<bool>(gs.at_pole[i])});
      }
    }
    return {std::move(tab), summary};
  }

  summary["stable"] = tm3::is_stable(t);
  const auto mech = tm3::effective_mechanics(t);
  summary["gamma_eff"] = mech.gamma_eff;
  summary["n_eff"] = mech.n_eff;
  auto gain = [&](double w) { return capped(tm3::two_mode_point(w, t).gain); };
  summary["peak_exact"] = peak_json(lr::measure_peak(gain, center, half));
  const auto spec = tm3::two_mode_gain_noise(grid, t);
  Table tab({"delta_s", "gain", "noise"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    tab.add({grid[i], spec.gain.values[i].real(), spec.noise.values[i].real()});
  return {std::move(tab), summary};
}

CommandOutput amplifier_command(const json& resolved, const RunContext& ctx, bool noise_view) {
  CommandOutput out;
  json summary = json::object();
  const auto runs = read_runs(resolved);
  std::map<Mode, double> signal_hwhm;
  for (const auto& r : runs) {
    json s = json::object();
    append(out.warnings, r.mode == Mode::TwoMode ? r.params.warnings() : r.params.base.warnings());
    const std::string kind = noise_view ? "noise" : "gain";
    if (r.coop) {
      double c_star = NAN;
      const Table t = vs_c_table(r, noise_view, c_star);
      out.files.push_back(t.write(ctx.out_dir, r.label + "_" + kind + "_vs_c", ctx.format));
      if (r.mode == Mode::TwoMode) {
        const auto mech = tm3::effective_mechanics(r.params);
        s["threshold_cooperativity"] = finite_or_text(c_star);
        s["threshold_predicted"] = mech.instability_coop;
        s["gamma_eff"] = mech.gamma_eff;
        s["n_eff"] = mech.n_eff;
      }
    }
    if (r.signal) {
      auto sig = signal_table(r, noise_view);
      out.files.push_back(sig.table.write(ctx.out_dir, r.label + "_" + kind + "_vs_signal", ctx.format));
      s["signal_sweep"] = sig.summary;
      const auto& hw = sig.summary["peak_exact"]["hwhm"];
      if (is_one_mode(r.mode) && hw.is_number()) signal_hwhm[r.mode] = hw.get<double>();
    }
    summary[r.label] = s;
  }
  if (signal_hwhm.count(Mode::OneModeRdr) && signal_hwhm.count(Mode::OneModeNdr))
    summary["bandwidth_ratio_rdr_over_ndr"] = signal_hwhm[Mode::OneModeRdr] / signal_hwhm[Mode::OneModeNdr];
  out.files.push_back(write_json(ctx.out_dir, noise_view ? "noise_summary.json" : "gain_summary.json", summary));
  out.summary = summary;
  return out;
}

// ------------------------------------------------------------------- dynamics

json dynamics_defaults(const std::string& regime) {
  json params = {{"omega_m", 1.0}, {"g0", 1e-5}};
  if (regime == "ndr") {
    params["kappa"] = 0.1;
    params["gamma_m"] = 0.001;
  } else if (regime == "rdr") {
    params["kappa"] = 0.001;
    params["gamma_m"] = 0.1;
  }
  json d = {{"params", params},
            {"simulation",
             {{"periods", 10000.0},
              {"steps_per_period", 200.0},
              {"stride", 10},
              {"discard_fraction", dyn::kDefaultDiscard},
              {"init", {{"type", "perturbed_fixed_point"}, {"epsilon_scale", 1e-3}, {"branch", 0}}}}}};
  if (regime != "custom") d["drive"] = {{"drive_amp", 2500.0}, {"detuning0", 0.8}};
  return d;
}

dyn::InitialCondition read_init(const json& j, const std::string& where) {
  const std::string type = read_string(j, "type", where);
  if (type == "perturbed_fixed_point") {
    reject_unknown(j, {"type", "epsilon_scale", "branch"}, where);
    dyn::PerturbedFixedPoint p;
    p.epsilon_scale = read_double(j, "epsilon_scale", where, 1e-3);
    p.branch = read_count(j, "branch", where, 0);
    return p;
  }
  if (type == "custom") {
    reject_unknown(j, {"type", "a0", "b0"}, where);
    auto pair = [&](const char* key) {
      const auto& v = j.at(key);
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError(where + "." + key + ": expected [re, im]");
      return std::complex<double>(v[0].get<double>(), v[1].get<double>());
    };
    if (!j.contains("a0") || !j.contains("b0")) throw ConfigError(where + ": custom start needs a0 and b0");
    return dyn::CustomStart{pair("a0"), pair("b0")};
  }
  if (type == "zero") {
    reject_unknown(j, {"type"}, where);
    return dyn::ZeroStart{};
  }
  throw ConfigError(where + ".type: must be perturbed_fixed_point, custom or zero");
}

struct DynConfig {
  std::string regime;
  SystemParams params;
  dyn::DriveParams drive;
  double periods = 0.0, steps_per_period = 0.0, discard = 0.5;
  std::size_t stride = 1;
  json init_json;
  dyn::InitialCondition init;
  std::optional<json> threshold;
};

DynConfig read_dynamics(const json& raw) {
  reject_unknown(raw, {"regime", "params", "drive", "simulation", "threshold_scan"}, "");
  DynConfig c;
  c.regime = read_string(raw, "regime", "", std::string("custom"));
  if (c.regime != "ndr" && c.regime != "rdr" && c.regime != "custom")
    throw ConfigError("regime: must be ndr, rdr or custom");
  if (c.regime == "custom" && (!raw.contains("params") || !raw.contains("drive")))
    throw ConfigError("regime custom: params and drive are required");
  const json merged = merge(dynamics_defaults(c.regime), raw);

  c.params = parse_system(merged["params"], "params");
  if (!(c.params.g0 > 0.0)) throw ConfigError("params.g0: must be > 0 for the nonlinear dynamics");
  reject_unknown(merged["drive"], {"drive_amp", "detuning0"}, "drive");
  c.drive = {read_double(merged["drive"], "drive_amp", "drive"), read_double(merged["drive"], "detuning0", "drive")};
  try {
    c.drive.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(with_prefix("drive", e));
  }

  const json& sim = merged["simulation"];
  reject_unknown(sim, {"periods", "steps_per_period", "stride", "discard_fraction", "init"}, "simulation");
  c.periods = read_double(sim, "periods", "simulation");
  c.steps_per_period = read_double(sim, "steps_per_period", "simulation");
  c.stride = read_count(sim, "stride", "simulation");
  c.discard = read_double(sim, "discard_fraction", "simulation");
  if (!(c.periods > 0.0)) throw RangeError("simulation.periods: must be > 0");
  if (!(c.steps_per_period >= 1.0)) throw RangeError("simulation.steps_per_period: must be >= 1");
  if (c.stride == 0) throw RangeError("simulation.stride: must be >= 1");
  if (!(c.discard >= 0.0 && c.discard < 1.0)) throw RangeError("simulation.discard_fraction: must be in [0, 1)");
  c.init_json = sim["init"];
  c.init = read_init(c.init_json, "simulation.init");

  if (auto it = merged.find("threshold_scan"); it != merged.end() && !it->is_null()) {
    const std::string w = "threshold_scan";
    json ts = *it;
    reject_unknown(ts, {"drive_start", "drive_stop", "points", "periods", "steps_per_period", "stride", "rel_tol"}, w);
    const Sweep s = read_sweep(json{{"start", read_double(ts, "drive_start", w)},
                                    {"stop", read_double(ts, "drive_stop", w)},
                                    {"points", read_count(ts, "points", w, 8)}},
                               w);
    c.threshold = json{{"drive_start", s.start},
                       {"drive_stop", s.stop},
                       {"points", s.points},
                       {"periods", read_double(ts, "periods", w, 25000.0)},
                       {"steps_per_period", read_double(ts, "steps_per_period", w, 200.0)},
                       {"stride", read_count(ts, "stride", w, 20)},
                       {"rel_tol", read_double(ts, "rel_tol", w, 2e-3)}};
  }
  return c;
}

json dynamics_to_json(const DynConfig& c) {
  json j = {{"regime", c.regime},
            {"params", to_json(c.params)},
            {"drive", {{"drive_amp", c.drive.drive_amp}, {"detuning0", c.drive.detuning0}}},
            {"simulation",
             {{"periods", c.periods},
              {"steps_per_period", c.steps_per_period},
              {"stride", c.stride},
              {"discard_fraction", c.discard},
              {"init", c.init_json}}},
            {"threshold_scan", c.threshold ? *c.threshold : json(nullptr)}};
  return j;
}

Table spectrum_table(const ComplexSpectrum& s) {
  Table t({"omega", "power"});
  for (std::size_t i = 0; i < s.size(); ++i) t.add({s.omegas[i], s.values[i].real()});
  return t;
}

// --------------------------------------------------------------- feasibility

std::vector<fz::DeviceParams> read_devices(const json& resolved) {
  std::vector<fz::DeviceParams> out;
  const auto& arr = resolved.at("devices");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    try {
      out.push_back(fz::device_from_json(arr[i]));
    } catch (const ConfigError& e) {
      throw ConfigError(with_prefix("devices[" + std::to_string(i) + "]", e));
    }
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------------- Table

Table::Table(std::vector<std::string> header) : header_(std::move(header)) {}

void Table::add(std::vector<json> row) {
  if (row.size() != header_.size()) throw Error("table row has the wrong number of cells");
  for (auto& v : row)
    if (v.is_number_float()) v = finite_or_text(v.get<double>());
  rows_.push_back(std::move(row));
}

std::string Table::csv() const {
  CsvTable t(header_);
  for (const auto& r : rows_) {
    std::vector<std::string> cells;
    cells.reserve(r.size());
    for (const auto& v : r) cells.push_back(cell_text(v));
    t.add_row(std::move(cells));
  }
  return t.str();
}

json Table::to_json() const { return {{"columns", header_}, {"rows", rows_}}; }

std::string Table::write(const std::filesystem::path& dir, const std::string& stem, Format f) const {
  if (f == Format::Csv) {
    write_text_file(dir / (stem + ".csv"), csv());
    return stem + ".csv";
  }
  return write_json(dir, stem + ".json", to_json());
}

// ----------------------------------------------------------------- resolve

json resolve_backaction(const json& raw) {
  reject_unknown(raw, {"params", "sweep"}, "");
  const json fig2 = {{"kappa", 1.0}, {"gamma_m", 1000.0}, {"omega_m", 1e4}, {"coupling", 10.0}, {"n_th", 0.0}};
  const SystemParams p = parse_system(merge(fig2, raw.value("params", json::object())), "params");
  const json default_sweep = {{"start", -2.0 * p.omega_m}, {"stop", 2.0 * p.omega_m}, {"points", 10001}};
  const Sweep s = read_sweep(merge(default_sweep, raw.value("sweep", json::object())), "sweep");
  json params = to_json(p);
  params.erase("detuning");
  return {{"params", params}, {"sweep", s.to_json()}};
}

json resolve_amplifier(const json& raw) {
  require_object(raw, "");
  json runs_raw;
  if (raw.contains("runs")) {
    reject_unknown(raw, {"runs"}, "");
    runs_raw = raw["runs"];
    if (!runs_raw.is_array() || runs_raw.empty()) throw ConfigError("runs: expected a non-empty array");
  } else {
    runs_raw = json::array({raw});
  }
  json runs = json::array();
  std::set<std::string> labels;
  for (std::size_t i = 0; i < runs_raw.size(); ++i) {
    const AmpRun r = read_run(runs_raw[i], "runs[" + std::to_string(i) + "]");
    if (!labels.insert(r.label).second) throw ConfigError("runs[" + std::to_string(i) + "].label: duplicate '" + r.label + "'");
    runs.push_back(run_to_json(r));
  }
  return {{"runs", runs}};
}

json resolve_dynamics(const json& raw) {
  require_object(raw, "");
  return dynamics_to_json(read_dynamics(raw));
}

json resolve_feasibility(const json& raw) {
  reject_unknown(raw, {"devices"}, "");
  const auto it = raw.find("devices");
  if (it == raw.end() || !it->is_array() || it->empty())
    throw ConfigError("devices: expected a non-empty array of device objects or preset names");
  json devices = json::array();
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& d = (*it)[i];
    const std::string where = "devices[" + std::to_string(i) + "]";
    if (d.is_string()) {
      const auto name = d.get<std::string>();
      if (name == "teufel")
        devices.push_back(fz::to_json(fz::teufel_device()));
      else if (name == "tin")
        devices.push_back(fz::to_json(fz::tin_device()));
      else
        throw ConfigError(where + ": unknown device preset '" + name + "' (teufel, tin)");
    } else {
      try {
        devices.push_back(fz::to_json(fz::device_from_json(d)));
      } catch (const ConfigError& e) {
        throw ConfigError(with_prefix(where, e));
      }
    }
  }
  return {{"devices", devices}};
}

json resolve_for(const std::string& subcommand, const json& raw) {
  if (subcommand == "backaction") return resolve_backaction(raw);
  if (subcommand == "gain" || subcommand == "noise") return resolve_amplifier(raw);
  if (subcommand == "dynamics") return resolve_dynamics(raw);
  if (subcommand == "feasibility") return resolve_feasibility(raw);
  if (subcommand == "selftest") return json::object();
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

// ---------------------------------------------------------------- commands

CommandOutput cmd_backaction(const json& resolved, const RunContext& ctx) {
  CommandOutput out;
  const SystemParams p = parse_system(resolved.at("params"), "params");
  const Sweep s = read_sweep(resolved.at("sweep"), "sweep");
  append(out.warnings, p.warnings());
  Table t({"delta", "kappa_om_over_kappa", "delta_om_over_kappa", "kappa_eff_over_kappa"});
  for (double d : s.grid()) {
    const auto ba = lr::backaction(p.with_detuning(d));
    t.add({d, ba.kappa_om / p.kappa, ba.delta_om / p.kappa, ba.kappa_eff / p.kappa});
  }
  out.files.push_back(t.write(ctx.out_dir, "backaction", ctx.format));
  const auto blue = lr::backaction(p.with_detuning(p.omega_m));
  out.summary = {{"kappa_om_at_blue_sideband_over_kappa", blue.kappa_om / p.kappa}};
  return out;
}

CommandOutput cmd_gain(const json& resolved, const RunContext& ctx) { return amplifier_command(resolved, ctx, false); }

CommandOutput cmd_noise(const json& resolved, const RunContext& ctx) { return amplifier_command(resolved, ctx, true); }

CommandOutput cmd_dynamics(const json& resolved, const RunContext& ctx) {
  CommandOutput out;
  const DynConfig c = read_dynamics(resolved);
  append(out.warnings, c.params.warnings());

  auto opt = dyn::options_for_periods(c.params, c.periods, c.steps_per_period, c.stride);
  opt.init = c.init;
  const auto traj = dyn::simulate(c.params, c.drive, opt);

  Table t({"t", "re_a", "im_a", "re_b", "im_b"});
  for (std::size_t i = 0; i < traj.size(); ++i)
    t.add({traj.time(i), traj.a[i].real(), traj.a[i].imag(), traj.b[i].real(), traj.b[i].imag()});
  out.files.push_back(t.write(ctx.out_dir, "trajectory", ctx.format));

  json report = {{"regime", c.regime},
                 {"init", traj.init},
                 {"sample_dt", traj.dt},
                 {"samples", traj.size()},
                 {"diverged", traj.diverged},
                 {"stop_reason", traj.stop_reason}};
  json fps = json::array();
  for (const auto& fp : dyn::fixed_points(c.params, c.drive)) {
    const SystemParams lin = dyn::linearized_params(c.params, c.drive, fp);
    fps.push_back({{"branch", fp.branch_index},
                   {"photons", std::norm(fp.a_bar)},
                   {"a_bar", {fp.a_bar.real(), fp.a_bar.imag()}},
                   {"b_bar", {fp.b_bar.real(), fp.b_bar.imag()}},
                   {"stable", fp.stable},
                   {"shifted_detuning", lin.detuning},
                   {"coupling", lin.coupling},
                   {"cooperativity", cooperativity(lin)},
                   {"kappa_eff", lr::backaction(lin).kappa_eff}});
  }
  report["fixed_points"] = fps;

  if (traj.diverged) {
    out.files.push_back(write_json(ctx.out_dir, "regime.json", report));
    out.exit_code = 3;
    out.message = "trajectory diverged: " + traj.stop_reason;
    return out;
  }

  const auto spectra = dyn::emission_spectrum(traj, c.discard);
  out.files.push_back(spectrum_table(spectra.a).write(ctx.out_dir, "spectrum_a", ctx.format));
  out.files.push_back(spectrum_table(spectra.b).write(ctx.out_dir, "spectrum_b", ctx.format));

  dyn::ClassifyOptions copt;
  copt.discard_fraction = c.discard;
  const auto rep = dyn::classify_regime(traj, copt);
  report["report"] = rep.to_json();

  if (c.threshold) {
    const json& ts = *c.threshold;
    dyn::ThresholdScanOptions o;
    o.periods = ts["periods"];
    o.steps_per_period = ts["steps_per_period"];
    o.stride = ts["stride"];
    o.rel_tol = ts["rel_tol"];
    o.classify = copt;
    const auto est = dyn::threshold_scan(c.params, c.drive.detuning0, ts["drive_start"], ts["drive_stop"],
                                         ts["points"].get<std::size_t>(), o);
    report["threshold"] = {{"drive", est.drive},
                           {"drive_below", est.drive_below},
                           {"drive_above", est.drive_above},
                           {"cooperativity", est.cooperativity},
                           {"simulations", est.simulations}};
  }
  out.files.push_back(write_json(ctx.out_dir, "regime.json", report));
  out.summary = report["report"];
  return out;
}

CommandOutput cmd_feasibility(const json& resolved, const RunContext& ctx) {
  CommandOutput out;
  const auto devices = read_devices(resolved);
  for (const auto& d : devices) append(out.warnings, d.warnings());
  const auto rows = fz::feasibility_table(devices);
  if (ctx.format == Format::Csv) {
    fz::to_csv(rows).write(ctx.out_dir / "feasibility.csv");
    out.files.push_back("feasibility.csv");
  } else {
    out.files.push_back(write_json(ctx.out_dir, "feasibility.json", fz::to_json(rows)));
  }
  out.summary = fz::to_json(rows);
  return out;
}

CommandOutput cmd_selftest(const RunContext& ctx, const SelftestOptions& opt, std::ostream& log) {
  CommandOutput out;
  selftest::Options o;
  if (opt.corrupt_sigma) o.sigma = selftest::corrupted_sigma;
  const auto rep = selftest::run(o);
  log << rep.text();
  out.files.push_back(write_json(ctx.out_dir, "selftest.json", rep.to_json()));
  out.summary = rep.to_json();
  if (!rep.all_passed()) {
    out.exit_code = 4;
    std::string names;
    for (const auto& f : rep.failures()) names += (names.empty() ? "" : ", ") + f;
    out.message = "failing invariants: " + names;
  }
  return out;
}

CommandOutput run_command(const std::string& subcommand, const json& resolved, const RunContext& ctx) {
  if (subcommand == "backaction") return cmd_backaction(resolved, ctx);
  if (subcommand == "gain") return cmd_gain(resolved, ctx);
  if (subcommand == "noise") return cmd_noise(resolved, ctx);
  if (subcommand == "dynamics") return cmd_dynamics(resolved, ctx);
  if (subcommand == "feasibility") return cmd_feasibility(resolved, ctx);
  throw ConfigError("unknown subcommand '" + subcommand + "'");
}

std::filesystem::path write_manifest(const std::string& subcommand, const json& resolved, const CommandOutput& out,
                                     const RunContext& ctx, double wall_seconds) {
  json m = {{"subcommand", subcommand},
            {"config", resolved},
            {"version", RDR_VERSION},
            {"format", ctx.format == Format::Csv ? "csv" : "json"},
            {"wall_time_s", wall_seconds},
            {"outputs", out.files},
            {"warnings", out.warnings},
            {"summary", out.summary},
            {"exit_code", out.exit_code}};
  const auto path = ctx.out_dir / "manifest.json";
  write_text_file(path, m.dump(2) + "\n");
  return path;
}

}  // namespace rdr::cli
