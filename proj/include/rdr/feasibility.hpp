#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdr/io.hpp"

namespace rdr::feasibility {

inline constexpr double kHbar = 1.05457e-34;  // J s
inline constexpr double kBoltzmann = 1.38065e-23;  // J / K

/// Superconducting electromechanical device. Rates are angular (rad/s);
/// use from_hz() to build one from ordinary frequencies.
struct DeviceParams {
  std::string name;
  double omega_c = 0.0;
  double kappa = 0.0;
  double omega_m = 0.0;
  double gamma_m = 0.0;
  double g0 = 0.0;
  double kappa2_ratio = 20.0;
  double gamma_eff_target_ratio = 10.0;
  std::optional<double> temperature;  ///< kelvin

  static DeviceParams from_hz(std::string name, double fc_hz, double kappa_hz, double fm_hz,
                              double gamma_m_hz, double g0_hz);

  double kappa2() const { return kappa2_ratio * kappa; }
  double gamma_eff() const { return gamma_eff_target_ratio * kappa; }

  void validate() const;
  std::vector<std::string> warnings() const;
};

DeviceParams teufel_device();
DeviceParams tin_device();

struct PumpRequirement {
  double power_w = 0.0;
  double photons = 0.0;
};

/// Lower-sideband pump on the cooling mode: n_p2 = Gamma_eff kappa2 / (4 g0^2).
PumpRequirement cooling_pump_power(const DeviceParams& d);

/// Upper-sideband pump at the instability threshold: n_p = kappa Gamma_eff / (4 g0^2).
PumpRequirement amplifier_pump_power(const DeviceParams& d);

struct GroundStateReport {
  double n_m = 0.0;           ///< k_B T / (hbar Omega_m)
  double heating_rate = 0.0;  ///< Gamma_m n_m
  double gamma_eff = 0.0;
  bool pass = false;          ///< Gamma_eff > 10 Gamma_m n_m
};

/// Throws MissingTemperature when the device has no temperature.
GroundStateReport ground_state_check(const DeviceParams& d);

struct FeasibilityRow {
  DeviceParams device;
  PumpRequirement amplifier;
  PumpRequirement cooling;
  std::optional<GroundStateReport> ground_state;
};

/// Throws ConfigError for an empty device list.
std::vector<FeasibilityRow> feasibility_table(const std::vector<DeviceParams>& devices);

CsvTable to_csv(const std::vector<FeasibilityRow>& rows);
nlohmann::json to_json(const std::vector<FeasibilityRow>& rows);

/// Device schema: name, omega_c_hz, kappa_hz, omega_m_hz, gamma_m_hz, g0_hz,
/// optional kappa2_ratio, gamma_eff_target_ratio, temperature_k.
DeviceParams device_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DeviceParams& d);

}  // namespace rdr::feasibility
