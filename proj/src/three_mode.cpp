#include "rdr/three_mode.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rdr/errors.hpp"
#include "rdr/linear_response.hpp"
#include "rdr/numkernel/stability.hpp"

namespace rdr::three_mode {

namespace {
using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

ThreeModeParams with_coupling(ThreeModeParams p, double g) {
  p.base.coupling = g;
  return p;
}
}  // namespace

EffectiveMechanics effective_mechanics(const ThreeModeParams& p) {
  p.validate();
  const double c2 = cooperativity2(p);
  EffectiveMechanics m;
  m.gamma_eff = (1.0 + c2) * p.base.gamma_m;
  const double floor_occ = p.kappa2 * p.kappa2 / (16.0 * p.base.omega_m * p.base.omega_m);
  m.n_eff = p.base.n_th / (c2 + 1.0) + c2 / (c2 + 1.0) * floor_occ;
  m.instability_coop = m.gamma_eff / p.base.gamma_m;
  m.warnings = p.warnings();
  if (p.kappa2 / (4.0 * p.base.omega_m) >= 1.0)
    m.warnings.push_back("kappa2 >= 4 omega_m: mode 2 is not sideband resolved");
  return m;
}

ComplexMatrix drift_matrix_6(const ThreeModeParams& p) {
  const auto& b = p.base;
  const cplx iG = I * b.coupling;
  const cplx iG2 = I * p.coupling2;
  const cplx d1 = I * b.detuning;
  const cplx d2 = I * p.detuning2;
  const cplx w = I * b.omega_m;
  const double k1 = 0.5 * b.kappa, k2 = 0.5 * p.kappa2, gm = 0.5 * b.gamma_m;
  return ComplexMatrix{
      {d1 - k1, 0.0, 0.0, 0.0, iG, iG},
      {0.0, -d1 - k1, 0.0, 0.0, -iG, -iG},
      {0.0, 0.0, d2 - k2, 0.0, iG2, iG2},
      {0.0, 0.0, 0.0, -d2 - k2, -iG2, -iG2},
      {iG, iG, iG2, iG2, -w - gm, 0.0},
      {-iG, -iG, -iG2, -iG2, 0.0, w - gm},
  };
}

ComplexMatrix input_matrix_6(const ThreeModeParams& p) {
  const double s1 = std::sqrt(p.base.kappa), s2 = std::sqrt(p.kappa2), sm = std::sqrt(p.base.gamma_m);
  const std::array<cplx, 6> d{s1, s1, s2, s2, sm, sm};
  return ComplexMatrix::diagonal(d);
}

ComplexMatrix scattering_matrix_6(double omega, const ThreeModeParams& p) {
  return linear_response::scattering_from_drift(omega, drift_matrix_6(p), input_matrix_6(p));
}

double row_commutator(const ComplexMatrix& u, std::size_t row) {
  double s = 0.0;
  for (std::size_t j = 0; j < u.cols(); ++j) s += (j % 2 == 0 ? 1.0 : -1.0) * std::norm(u(row, j));
  return s;
}

double added_noise_from(const ComplexMatrix& u, double n_th) {
  const double gain = std::norm(u(0, 0));
  if (gain < 1e-24) throw ZeroGain("mode-1 gain vanishes");
  const double mech = (n_th + 0.5) * (std::norm(u(0, 4)) + std::norm(u(0, 5)));
  const double vac = 0.5 * (std::norm(u(0, 1)) + std::norm(u(0, 2)) + std::norm(u(0, 3)));
  return (mech + vac) / gain;
}

namespace {

// Row 0 of U only: solve (i w + M)^T y = e0, then U_0j = delta_0j + L_00 y_j L_jj.
ComplexMatrix first_row_6(double omega, const ThreeModeParams& p) {
  const ComplexMatrix m = drift_matrix_6(p);
  const ComplexMatrix l = input_matrix_6(p);
  ComplexMatrix at(6, 6);
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 6; ++c) at(r, c) = m(c, r);
  for (std::size_t i = 0; i < 6; ++i) at(i, i) += I * omega;
  ComplexMatrix e0(6, 1);
  e0(0, 0) = 1.0;
  const ComplexMatrix y = numkernel::solve_linear(at, e0);
  ComplexMatrix row(1, 6);
  for (std::size_t j = 0; j < 6; ++j) row(0, j) = l(0, 0) * y(j, 0) * l(j, j);
  row(0, 0) += 1.0;
  return row;
}

}  // namespace

GainNoise two_mode_point(double omega, const ThreeModeParams& p) {
  const ComplexMatrix u = first_row_6(omega, p);
  return {std::norm(u(0, 0)), added_noise_from(u, p.base.n_th)};
}

GainNoiseSpectra two_mode_gain_noise(std::span<const double> grid, const ThreeModeParams& p) {
  p.validate();
  GainNoiseSpectra out;
  out.gain.kind = SpectrumKind::Gain2;
  out.noise.kind = SpectrumKind::Noise2;
  out.gain.omegas.assign(grid.begin(), grid.end());
  out.noise.omegas = out.gain.omegas;
  for (double w : grid) {
    const auto gn = two_mode_point(w, p);
    out.gain.values.emplace_back(gn.gain, 0.0);
    out.noise.values.emplace_back(gn.noise, 0.0);
  }
  out.gain.validate();
  out.noise.validate();
  return out;
}

ThreeModeParams cancellation_params(const SystemParams& mode1) {
  ThreeModeParams p;
  p.base = mode1;
  p.kappa2 = mode1.kappa;
  p.coupling2 = mode1.coupling;
  p.detuning2 = -mode1.omega_m;
  return p;
}

GainNoiseSpectra cancellation_case(std::span<const double> grid, const ThreeModeParams& p) {
  const auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  if (!close(p.kappa2, p.base.kappa) || !close(p.coupling2, p.base.coupling))
    throw ConfigError("cancellation case requires kappa2 == kappa and coupling2 == coupling");
  return two_mode_gain_noise(grid, p);
}

bool is_stable(const ThreeModeParams& p) { return numkernel::is_stable(drift_matrix_6(p)); }

double max_real_part(const ThreeModeParams& p) { return numkernel::max_real_part(drift_matrix_6(p)); }

double instability_cooperativity(const ThreeModeParams& p, double c_max, std::size_t grid_points) {
  if (!(c_max > 0.0)) throw RangeError("c_max must be > 0");
  if (grid_points < 2) grid_points = 2;
  const auto& b = p.base;
  auto stable_at = [&](double c) {
    return is_stable(with_coupling(p, coupling_for_cooperativity(c, b.gamma_m, b.kappa)));
  };

  double lo = 0.0;
  double hi = -1.0;
  for (std::size_t i = 1; i <= grid_points; ++i) {
    const double c = c_max * static_cast<double>(i) / static_cast<double>(grid_points);
    if (!stable_at(c)) {
      hi = c;
      break;
    }
    lo = c;
  }
  if (hi < 0.0) throw NoFlipInRange("drift matrix stays stable up to C = " + std::to_string(c_max));
  for (int it = 0; it < 60 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (stable_at(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double resonance_frequency(const ThreeModeParams& p, double search_halfwidth) {
  const double center = linear_response::resonance_frequency(p.base);
  auto gain = [&p](double w) {
    try {
      return std::norm(first_row_6(w, p)(0, 0));
    } catch (const SingularMatrix&) {
      return linear_response::kGainCap;
    }
  };
  return linear_response::measure_peak(gain, center, search_halfwidth, 4001).center;
}

GainNoise resonant_point(const ThreeModeParams& p) {
  const auto mech = effective_mechanics(p);
  const double width = 3.0 * std::max({p.base.kappa, p.kappa2, mech.gamma_eff, p.base.gamma_m});
  return two_mode_point(resonance_frequency(p, width), p);
}

}  // namespace rdr::three_mode
