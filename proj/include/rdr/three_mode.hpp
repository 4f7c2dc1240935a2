#pragma once

// Two electromagnetic modes sharing one mechanical oscillator. Mode 2 is pumped on
// the red sideband and cools (and broadens) the mechanics; mode 1 is the amplifier.
// Operator ordering is (da1, da1^dag, da2, da2^dag, db, db^dag).

#include <span>
#include <string>
#include <vector>

#include "rdr/core.hpp"
#include "rdr/numkernel/matrix.hpp"
#include "rdr/spectrum.hpp"

namespace rdr::three_mode {

using numkernel::ComplexMatrix;

struct EffectiveMechanics {
  double gamma_eff = 0.0;         ///< (1 + C2) Gamma_m
  double n_eff = 0.0;             ///< occupancy after sideband cooling by mode 2
  double instability_coop = 0.0;  ///< C* = Gamma_eff / Gamma_m
  std::vector<std::string> warnings;
};

/// Resolved-sideband cooling by mode 2 (assumes detuning2 = -Omega_m):
///   n_eff = n_th / (C2 + 1) + C2 / (C2 + 1) * kappa2^2 / (16 Omega_m^2)
EffectiveMechanics effective_mechanics(const ThreeModeParams& p);

ComplexMatrix drift_matrix_6(const ThreeModeParams& p);
ComplexMatrix input_matrix_6(const ThreeModeParams& p);

/// 6x6 scattering matrix U(w) = 1 + L (i w 1 + M)^-1 L. Throws SingularMatrix on a pole.
ComplexMatrix scattering_matrix_6(double omega, const ThreeModeParams& p);

/// sum_j s_j |U_rj|^2 with s_j = +1 for annihilation inputs and -1 for creation inputs.
/// Equals +1 on annihilation rows and -1 on creation rows.
double row_commutator(const ComplexMatrix& u, std::size_t row);

/// Noise quanta added by the mode-1 amplifier, referred to its input:
///   [(n_th + 1/2)(|U15|^2 + |U16|^2) + 1/2 (|U12|^2 + |U13|^2 + |U14|^2)] / |U11|^2.
/// Mode-2 inputs are vacuum.
double added_noise_from(const ComplexMatrix& u, double n_th);

struct GainNoise {
  double gain = 0.0;   ///< |U11|^2
  double noise = 0.0;  ///< added_noise_from(U, n_th)
};

GainNoise two_mode_point(double omega, const ThreeModeParams& p);

struct GainNoiseSpectra {
  ComplexSpectrum gain;   ///< kind Gain2
  ComplexSpectrum noise;  ///< kind Noise2
};

/// Gain and added noise on a signal grid. Mode 1 blue (detuning = +Omega_m),
/// mode 2 red (detuning2 = -Omega_m) is the intended operating point.
GainNoiseSpectra two_mode_gain_noise(std::span<const double> grid, const ThreeModeParams& p);

/// kappa2 = kappa, G2 = G, detuning2 = -Omega_m: the two backaction terms cancel.
ThreeModeParams cancellation_params(const SystemParams& mode1);

/// Same as two_mode_gain_noise but rejects parameters outside the cancellation case.
GainNoiseSpectra cancellation_case(std::span<const double> grid, const ThreeModeParams& p);

bool is_stable(const ThreeModeParams& p);
double max_real_part(const ThreeModeParams& p);

/// Smallest mode-1 cooperativity (in units of the bare Gamma_m) at which the
/// 6x6 drift matrix loses stability, found on a grid of `grid_points` values in
/// (0, c_max] and refined by bisection. Throws NoFlipInRange if stable throughout.
double instability_cooperativity(const ThreeModeParams& p, double c_max, std::size_t grid_points = 64);

/// Signal frequency of the mode-1 gain maximum, searched within
/// `search_halfwidth` of -delta_eff of the one-mode problem.
double resonance_frequency(const ThreeModeParams& p, double search_halfwidth);

/// Gain and noise at resonance_frequency(p, ...), with the search width set by the
/// linewidths kappa, kappa2 and Gamma_eff.
GainNoise resonant_point(const ThreeModeParams& p);

}  // namespace rdr::three_mode
