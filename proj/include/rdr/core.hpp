#pragma once

// Parameter model shared by every physics module.
//
// Rates and frequencies are dimensionless multiples of a reference rate
// (kappa = 1 unless a config says otherwise). SI units only appear in
// rdr/feasibility.hpp.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rdr {

/// Which detuning SystemParams::detuning holds.
/// Shifted: Delta, including the static radiation-pressure shift (linear response).
/// Bare: Delta_0 of the mean-field equations (dynamics).
enum class DetuningKind { Shifted, Bare };

/// One cavity mode coupled to one mechanical mode.
///
/// `coupling` is the enhanced coupling G = g0 |a_bar|. The phase of a_bar is
/// absorbed into the fluctuation operators, so G is real and non-negative.
struct SystemParams {
  double kappa = 1.0;     ///< cavity energy decay rate
  double gamma_m = 1.0;   ///< mechanical energy decay rate
  double omega_m = 10.0;  ///< mechanical frequency
  double g0 = 0.0;        ///< single-photon coupling (mean-field dynamics only)
  double detuning = 0.0;  ///< Delta or Delta_0, see detuning_kind
  double coupling = 0.0;  ///< G
  double n_th = 0.0;      ///< thermal phonon occupancy
  DetuningKind detuning_kind = DetuningKind::Shifted;
  std::string unit_ref = "kappa";

  /// Throws ConfigError when an invariant is broken.
  void validate() const;

  /// Gamma_m / Omega_m < 0.2. The linear damping model assumes a high-Q oscillator;
  /// violating it is reported as a warning, not rejected.
  bool high_q() const { return gamma_m / omega_m < 0.2; }

  std::vector<std::string> warnings() const;

  /// All rates (kappa, gamma_m, omega_m, g0, detuning, coupling) multiplied by lambda.
  SystemParams scaled(double lambda) const;

  SystemParams with_coupling(double g) const;
  SystemParams with_detuning(double delta) const;
};

/// Adds the second electromagnetic mode used for sideband cooling.
struct ThreeModeParams {
  SystemParams base;       ///< mode 1, the amplifier mode
  double kappa2 = 5.0;     ///< decay rate of mode 2
  double coupling2 = 0.0;  ///< G2
  double detuning2 = 0.0;  ///< Delta2

  void validate() const;
  std::vector<std::string> warnings() const;
};

enum class Regime { NDR, RDR, Intermediate };

struct RegimeClass {
  Regime regime = Regime::Intermediate;
  double ratio = 0.0;  ///< gamma_m / kappa
};

std::string_view to_string(Regime r);

/// 4 G^2 / (Gamma_m kappa)
double cooperativity(const SystemParams& p);
/// 4 G2^2 / (kappa2 Gamma_m)
double cooperativity2(const ThreeModeParams& p);

/// Enhanced coupling that yields cooperativity `c` for the given rates.
double coupling_for_cooperativity(double c, double gamma_m, double kappa);

inline constexpr double kDefaultRegimeThreshold = 5.0;

/// RDR when gamma_m / kappa > threshold_ratio, NDR when below 1 / threshold_ratio.
RegimeClass classify_regime(const SystemParams& p,
                            double threshold_ratio = kDefaultRegimeThreshold);

// JSON schema: {"kappa", "gamma_m", "omega_m", "g0", "detuning", "coupling",
// "n_th", "unit_ref"} and optionally "kappa2", "coupling2", "detuning2".
// Missing keys keep their defaults; unknown keys are rejected.
SystemParams system_params_from_json(const nlohmann::json& j);
ThreeModeParams three_mode_params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SystemParams& p);
nlohmann::json to_json(const ThreeModeParams& p);

}  // namespace rdr
