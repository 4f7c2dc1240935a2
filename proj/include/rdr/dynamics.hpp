#pragma once

// Classical mean-field dynamics in the frame of the drive:
//   da/dt = (i Delta_0 - kappa/2) a + i g0 a (b + b*) - i Omega
//   db/dt = (-i Omega_m - Gamma_m/2) b + i g0 |a|^2
// SystemParams supplies kappa, gamma_m, omega_m and g0; its detuning and coupling
// fields are ignored here (the drive carries Delta_0, and G follows from a_bar).

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rdr/core.hpp"
#include "rdr/io.hpp"
#include "rdr/numkernel/fft.hpp"
#include "rdr/numkernel/rk4.hpp"
#include "rdr/spectrum.hpp"

namespace rdr::dynamics {

using cplx = std::complex<double>;

struct DriveParams {
  double drive_amp = 0.0;  ///< Omega, with -i Omega = sqrt(kappa) a_in
  double detuning0 = 0.0;  ///< bare detuning Delta_0
  void validate() const;
};

struct FixedPoint {
  cplx a_bar;
  cplx b_bar;
  bool stable = false;
  std::size_t branch_index = 0;  ///< index among the physical roots, ascending in |a|^2
};

using MeanFieldState = numkernel::State<2>;

MeanFieldState mean_field_rhs(const SystemParams& p, const DriveParams& d, const MeanFieldState& y);

/// Steady states, ascending in photon number. One entry, or three inside the
/// bistable window (the middle one unstable).
std::vector<FixedPoint> fixed_points(const SystemParams& p, const DriveParams& d);

/// |RHS| at the fixed point and the scale kappa|a| + Gamma_m|b| + Omega it is judged against.
double fixed_point_residual(const SystemParams& p, const DriveParams& d, const FixedPoint& fp);
double residual_scale(const SystemParams& p, const DriveParams& d, const FixedPoint& fp);

/// The photon-number cubic n [(kappa/2)^2 + (Delta_0 + s n)^2] - Omega^2 with
/// s = 2 g0^2 Omega_m / (Omega_m^2 + Gamma_m^2/4), evaluated at n.
double steady_state_cubic(const SystemParams& p, const DriveParams& d, double n);

/// Linear-response parameters around a fixed point: shifted detuning
/// Delta_0 + 2 g0 Re b_bar and coupling g0 |a_bar|.
SystemParams linearized_params(const SystemParams& p, const DriveParams& d, const FixedPoint& fp);

/// Fixed point plus epsilon (1 + i) on b, epsilon = epsilon_scale * max(1, |b_bar|).
struct PerturbedFixedPoint {
  double epsilon_scale = 1e-3;
  std::optional<std::size_t> branch;  ///< defaults to the lowest-photon-number root
};
struct CustomStart {
  cplx a0;
  cplx b0;
};
struct ZeroStart {};
using InitialCondition = std::variant<PerturbedFixedPoint, CustomStart, ZeroStart>;

std::string describe(const InitialCondition& ic);

struct SimulationOptions {
  double t_end = 0.0;
  double dt = 0.0;
  std::size_t stride = 1;
  InitialCondition init = PerturbedFixedPoint{};
};

/// dt = (2 pi / Omega_m) / steps_per_period, t_end = periods * 2 pi / Omega_m.
SimulationOptions options_for_periods(const SystemParams& p, double periods,
                                      double steps_per_period = 200.0, std::size_t stride = 1);

struct Trajectory {
  double t0 = 0.0;
  double dt = 0.0;  ///< sample spacing (integration step times stride)
  std::vector<cplx> a;
  std::vector<cplx> b;
  SystemParams params;
  DriveParams drive;
  std::string init;
  bool diverged = false;
  std::string stop_reason;

  std::size_t size() const { return a.size(); }
  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  CsvTable to_csv() const;
};

/// RK4 integration of the mean-field equations. Stops early and sets `diverged`
/// when |a| exceeds 1e6 * (2 Omega / kappa) or the state becomes non-finite.
Trajectory simulate(const SystemParams& p, const DriveParams& d, const SimulationOptions& opt);

inline constexpr double kDefaultDiscard = 0.5;

struct EmissionSpectra {
  ComplexSpectrum a;  ///< |Re a(omega)|^2
  ComplexSpectrum b;  ///< |Re b(omega)|^2
};

/// Power spectra of Re a and Re b over the last power-of-two block of samples
/// after discarding the leading `discard_fraction` of the trajectory.
/// Throws TooShort when fewer than 64 samples remain.
EmissionSpectra emission_spectrum(const Trajectory& traj, double discard_fraction = kDefaultDiscard,
                                  numkernel::Window window = numkernel::Window::Hann);

enum class Motion { Decay, LimitCycle, Irregular };
std::string_view to_string(Motion m);

struct RegimeReport {
  Motion classification = Motion::Decay;
  double dominant_freq_a = 0.0;     ///< peak of |Re a(omega)|^2, on the FFT grid
  double dominant_freq_b = 0.0;     ///< peak of |Re b(omega)|^2, on the FFT grid
  double harmonic_content_a = 0.0;  ///< power near 2 f_a over power near f_a
  double amplitude_ratio = 0.0;     ///< max|a| / max|b| over the steady segment
  double frequency_resolution = 0.0;
  int cavity_harmonics = 0;  ///< multiples 1..10 of f_b standing 20 dB above the median of |Re a(omega)|^2
  double mean_re_b = 0.0;
  double freq_candidate_single = 0.0;  ///< Delta_0 + g0 <Re b>
  double freq_candidate_double = 0.0;  ///< Delta_0 + 2 g0 <Re b>
  std::string matched_candidate;       ///< "single" or "double", whichever is closer to f_a

  nlohmann::json to_json() const;
};

struct ClassifyOptions {
  double discard_fraction = kDefaultDiscard;
  double decay_threshold = 1e-6;  ///< peak-to-peak of Re a relative to max|Re a|
  double dominance = 0.5;         ///< fraction of AC power in the strongest line
  double min_periods = 64.0;
};

/// Throws TooShort when the steady segment spans fewer than min_periods mechanical periods.
RegimeReport classify_regime(const Trajectory& traj, const ClassifyOptions& opt = {});

/// Exponential rate of |a(t) - a_ref| from a least-squares fit of its logarithm on
/// [t_begin, t_end]. Positive for decay.
double decay_rate(const Trajectory& traj, cplx a_ref, double t_begin, double t_end);

/// Half the peak-to-peak excursion of Re b over the steady segment.
double oscillation_amplitude_b(const Trajectory& traj, double discard_fraction = kDefaultDiscard);

struct ThresholdScanOptions {
  double periods = 25000.0;
  double steps_per_period = 200.0;
  std::size_t stride = 20;
  double rel_tol = 2e-3;  ///< bisection stops when the drive bracket is this narrow
  ClassifyOptions classify{};
};

struct ThresholdEstimate {
  double drive = 0.0;          ///< midpoint of the final bracket
  double drive_below = 0.0;    ///< last drive classified as Decay
  double drive_above = 0.0;    ///< first drive classified otherwise
  double cooperativity = 0.0;  ///< linear-response C at the fixed point for `drive`
  int simulations = 0;
};

/// Finds the drive at which the perturbed fixed point stops decaying: scans
/// `n_points` drives on [drive_lo, drive_hi], then bisects the first flip.
/// Throws NoFlipInRange if every grid point gets the same verdict.
ThresholdEstimate threshold_scan(const SystemParams& p, double detuning0, double drive_lo,
                                 double drive_hi, std::size_t n_points,
                                 const ThresholdScanOptions& opt = {});

}  // namespace rdr::dynamics
