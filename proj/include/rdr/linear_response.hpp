#pragma once

// One-mode frequency-domain response of the linearized fluctuations.
//
// Fourier convention: f[omega] = integral f(t) exp(+i omega t) dt, so d/dt -> -i omega.
// With this convention chi_r[omega] = [kappa/2 - i(omega + Delta)]^-1 and the cavity
// resonance sits at omega = -Delta. Operator ordering is (da, da^dag, db, db^dag).

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rdr/core.hpp"
#include "rdr/numkernel/matrix.hpp"
#include "rdr/spectrum.hpp"

namespace rdr::linear_response {

using cplx = std::complex<double>;
using numkernel::ComplexMatrix;

/// Mechanical response [Gamma_m/2 - i(omega - Omega_m)]^-1.
cplx chi_m(double omega, const SystemParams& p);
/// Cavity response [kappa/2 - i(omega + Delta)]^-1.
cplx chi_r(double omega, const SystemParams& p);

/// Mechanical self-energy of the cavity, -i G^2 (chi_m[w] - conj(chi_m[-w])).
cplx self_energy(double omega, const SystemParams& p);

/// N[w] = chi_r^-1[w] conj(chi_r^-1[-w]) - 2 Delta Sigma[w].
cplx response_denominator(double omega, const SystemParams& p);

struct Backaction {
  double kappa_om = 0.0;   ///< -2 Im Sigma[-Delta]
  double delta_om = 0.0;   ///< -Re Sigma[-Delta]
  double kappa_eff = 0.0;  ///< kappa + kappa_om
  double delta_eff = 0.0;  ///< Delta + delta_om
  double omega_eff = 0.0;  ///< Omega_m - Re Sigma[-Delta]
};

Backaction backaction(const SystemParams& p);

/// Linewidth shift written as the difference of two mechanical Lorentzians
/// (red minus blue sideband). Independent route to Backaction::kappa_om.
double kappa_om_lorentzian(const SystemParams& p);
/// Frequency shift in the same explicit form. Independent route to Backaction::delta_om.
double delta_om_lorentzian(const SystemParams& p);

struct TransitionRates {
  double gamma_up = 0.0;    ///< n -> n+1 rate per (n+1)
  double gamma_down = 0.0;  ///< n -> n-1 rate per n
};

/// Thermal displacement spectrum of the damped oscillator in units of x_zpf^2.
/// Normalized so the zero-temperature red-sideband rate is 4 G^2 / Gamma_m:
/// S(w) = Gamma_m (n+1) / [(Gamma_m/2)^2 + (w+Omega_m)^2] + Gamma_m n / [(Gamma_m/2)^2 + (w-Omega_m)^2]
double displacement_spectrum(double omega, const SystemParams& p);

/// Golden-rule photon rates G^2 S(-Delta) (up) and G^2 S(+Delta) (down).
TransitionRates transition_rates(const SystemParams& p);

/// Drift matrix M of du/dt = M u + L u_in.
ComplexMatrix drift_matrix(const SystemParams& p);
/// L = diag(sqrt(kappa), sqrt(kappa), sqrt(Gamma_m), sqrt(Gamma_m)).
ComplexMatrix input_matrix(const SystemParams& p);

/// U(w) = 1 + L (i w 1 + M)^-1 L for any drift/input pair.
/// Throws SingularMatrix on an undamped pole.
ComplexMatrix scattering_from_drift(double omega, const ComplexMatrix& drift, const ComplexMatrix& input);

/// 4x4 scattering matrix mapping inputs to outputs.
ComplexMatrix scattering_matrix(double omega, const SystemParams& p);

/// Coefficients of a_out = A a_in + B a_in^dag + C b_in + D b_in^dag.
struct ScatteringRow {
  cplx a_coef, b_coef, c_coef, d_coef;
  /// |A|^2 - |B|^2 + |C|^2 - |D|^2, equal to 1 when [a_out, a_out^dag] = 1.
  double commutator() const;
};

ScatteringRow first_row(const ComplexMatrix& u);

/// Closed-form coefficients. Throws PoleAtFrequency when
/// |N[w]| < 1e-12 |chi_r^-1[w] conj(chi_r^-1[-w])|.
ScatteringRow scattering_coeffs(double omega, const SystemParams& p);

/// Closed form evaluated with a caller-supplied Sigma[w]; used to check that the
/// invariant suites catch a corrupted self-energy.
ScatteringRow scattering_coeffs_with_sigma(double omega, const SystemParams& p, cplx sigma);

inline constexpr double kGainCap = 1e12;

/// |1 - kappa / (kappa_eff/2 - i(delta_s + delta_eff))|^2, the weak-coupling gain.
/// Returns std::nullopt at the pole.
std::optional<double> weak_coupling_gain(double delta_s, const SystemParams& p, const Backaction& ba);

struct GainSpectrum {
  ComplexSpectrum weak;        ///< weak-coupling form
  ComplexSpectrum exact;       ///< |A(delta_s)|^2
  std::vector<bool> at_pole;   ///< true where either value was capped at kGainCap
};

GainSpectrum gain_spectrum(std::span<const double> grid, const SystemParams& p);

/// |(C + 1)/(C - 1)|^2, the resolved-sideband gain on resonance. Infinite at C = 1.
double rwa_gain(double c);
/// 4 C (n_eff + 1/2) / (C + 1)^2, the resolved-sideband added noise on resonance.
double rwa_added_noise(double c, double n_eff);

/// (n_eff + 1/2) |D|^2 / |A|^2 at signal frequency delta_s. n_eff defaults to n_th.
/// Throws ZeroGain when |A| is below 1e-12.
double added_noise(const SystemParams& p, double delta_s, std::optional<double> n_eff = {});

/// Signal frequency of the shifted cavity resonance, -delta_eff (= -Omega_eff on the
/// blue sideband).
double resonance_frequency(const SystemParams& p);

/// Exact gain |A|^2 at resonance_frequency(p).
double resonant_gain(const SystemParams& p);

/// True iff every eigenvalue of the drift matrix has a negative real part.
bool is_stable(const SystemParams& p);

struct PeakMetrics {
  double center = 0.0;  ///< location of the maximum
  double peak = 0.0;    ///< maximum value
  double hwhm = 0.0;    ///< half width at half maximum; NaN when a crossing is missing
  /// sqrt(peak) * hwhm: amplitude gain times half-bandwidth.
  double gain_bandwidth() const;
};

/// Locates the maximum of f near `center_guess` (dense scan, then golden section)
/// and measures its half width at half maximum by bisection on each flank.
PeakMetrics measure_peak(const std::function<double(double)>& f, double center_guess,
                         double search_halfwidth, std::size_t scan_points = 2001);

}  // namespace rdr::linear_response
