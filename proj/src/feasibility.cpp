#include "rdr/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rdr/errors.hpp"

namespace rdr::feasibility {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Same expression for both pumps, with omega_R2 taken equal to omega_R.
double pump_power(const DeviceParams& d) {
  return kHbar * d.omega_c * d.gamma_eff() * d.omega_m * d.omega_m / (d.g0 * d.g0);
}

}  // namespace

DeviceParams DeviceParams::from_hz(std::string name, double fc_hz, double kappa_hz, double fm_hz,
                                   double gamma_m_hz, double g0_hz) {
  DeviceParams d;
  d.name = std::move(name);
  d.omega_c = kTwoPi * fc_hz;
  d.kappa = kTwoPi * kappa_hz;
  d.omega_m = kTwoPi * fm_hz;
  d.gamma_m = kTwoPi * gamma_m_hz;
  d.g0 = kTwoPi * g0_hz;
  return d;
}

void DeviceParams::validate() const {
  for (double v : {omega_c, kappa, omega_m, gamma_m, g0})
    if (!std::isfinite(v) || v <= 0.0) throw ConfigError("device '" + name + "': rates must be finite and > 0");
  if (!(kappa2_ratio > 1.0)) throw ConfigError("device '" + name + "': kappa2_ratio must be > 1");
  if (!(gamma_eff_target_ratio > 1.0)) throw ConfigError("device '" + name + "': gamma_eff_target_ratio must be > 1");
  if (temperature && !(std::isfinite(*temperature) && *temperature >= 0.0))
    throw ConfigError("device '" + name + "': temperature must be finite and >= 0");
}

std::vector<std::string> DeviceParams::warnings() const {
  std::vector<std::string> w;
  if (kappa2() >= omega_m) w.push_back(name + ": kappa2 >= Omega_m, cooling mode is not sideband resolved");
  return w;
}

DeviceParams teufel_device() {
  auto d = DeviceParams::from_hz("Teufel et al.", 7.5e9, 170e3, 10e6, 30.0, 230.0);
  d.temperature = 0.02;
  return d;
}

DeviceParams tin_device() {
  auto d = DeviceParams::from_hz("TiN (proposed)", 7.5e9, 10e3, 1e6, 50.0, 100.0);
  d.temperature = 0.02;
  return d;
}

PumpRequirement cooling_pump_power(const DeviceParams& d) {
  d.validate();
  return {pump_power(d), d.gamma_eff() * d.kappa2() / (4.0 * d.g0 * d.g0)};
}

PumpRequirement amplifier_pump_power(const DeviceParams& d) {
  d.validate();
  return {pump_power(d), d.kappa * d.gamma_eff() / (4.0 * d.g0 * d.g0)};
}

GroundStateReport ground_state_check(const DeviceParams& d) {
  d.validate();
  if (!d.temperature) throw MissingTemperature();
  GroundStateReport r;
  r.n_m = kBoltzmann * *d.temperature / (kHbar * d.omega_m);
  r.heating_rate = d.gamma_m * r.n_m;
  r.gamma_eff = d.gamma_eff();
  r.pass = r.gamma_eff > 10.0 * r.heating_rate;
  return r;
}

std::vector<FeasibilityRow> feasibility_table(const std::vector<DeviceParams>& devices) {
  if (devices.empty()) throw ConfigError("feasibility table needs at least one device");
  std::vector<FeasibilityRow> rows;
  for (const auto& d : devices) {
    FeasibilityRow r{d, amplifier_pump_power(d), cooling_pump_power(d), std::nullopt};
    if (d.temperature) r.ground_state = ground_state_check(d);
    rows.push_back(std::move(r));
  }
  return rows;
}

CsvTable to_csv(const std::vector<FeasibilityRow>& rows) {
  CsvTable csv({"device", "omega_c_hz", "kappa_hz", "omega_m_hz", "gamma_m_hz", "g0_hz", "n_p", "n_p2",
                "p_in_nw", "p_in_2_nw", "n_m", "ground_state"});
  for (const auto& r : rows) {
    const auto& d = r.device;
    csv.add_row({d.name, format_double(d.omega_c / kTwoPi), format_double(d.kappa / kTwoPi),
                 format_double(d.omega_m / kTwoPi), format_double(d.gamma_m / kTwoPi),
                 format_double(d.g0 / kTwoPi), format_double(r.amplifier.photons),
                 format_double(r.cooling.photons), format_double(r.amplifier.power_w * 1e9),
                 format_double(r.cooling.power_w * 1e9),
                 r.ground_state ? format_double(r.ground_state->n_m) : "",
                 r.ground_state ? (r.ground_state->pass ? "pass" : "fail") : ""});
  }
  return csv;
}

nlohmann::json to_json(const DeviceParams& d) {
  nlohmann::json j = {{"name", d.name},
                      {"omega_c_hz", d.omega_c / kTwoPi},
                      {"kappa_hz", d.kappa / kTwoPi},
                      {"omega_m_hz", d.omega_m / kTwoPi},
                      {"gamma_m_hz", d.gamma_m / kTwoPi},
                      {"g0_hz", d.g0 / kTwoPi},
                      {"kappa2_ratio", d.kappa2_ratio},
                      {"gamma_eff_target_ratio", d.gamma_eff_target_ratio}};
  if (d.temperature) j["temperature_k"] = *d.temperature;
  return j;
}

nlohmann::json to_json(const std::vector<FeasibilityRow>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"device", to_json(r.device)},
                        {"n_p", r.amplifier.photons},
                        {"n_p2", r.cooling.photons},
                        {"p_in_w", r.amplifier.power_w},
                        {"p_in_2_w", r.cooling.power_w}};
    if (r.ground_state)
      j["ground_state"] = {{"n_m", r.ground_state->n_m},
                           {"gamma_eff", r.ground_state->gamma_eff},
                           {"heating_rate", r.ground_state->heating_rate},
                           {"pass", r.ground_state->pass}};
    out.push_back(std::move(j));
  }
  return out;
}

DeviceParams device_from_json(const nlohmann::json& j) {
  static const std::vector<std::string> known = {"name",     "omega_c_hz",   "kappa_hz",
                                                 "omega_m_hz", "gamma_m_hz", "g0_hz",
                                                 "kappa2_ratio", "gamma_eff_target_ratio", "temperature_k"};
  if (!j.is_object()) throw ConfigError("device entry must be an object");
  for (const auto& [key, _] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw ConfigError("device: unknown field '" + key + "'");
  auto req = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) throw ConfigError(std::string("device: missing numeric field '") + key + "'");
    return j[key].get<double>();
  };
  auto d = DeviceParams::from_hz(j.value("name", std::string("device")), req("omega_c_hz"), req("kappa_hz"),
                                 req("omega_m_hz"), req("gamma_m_hz"), req("g0_hz"));
  if (j.contains("kappa2_ratio")) d.kappa2_ratio = req("kappa2_ratio");
  if (j.contains("gamma_eff_target_ratio")) d.gamma_eff_target_ratio = req("gamma_eff_target_ratio");
  if (j.contains("temperature_k")) d.temperature = req("temperature_k");
  d.validate();
  return d;
}

}  // namespace rdr::feasibility
