#include "rdr/linear_response.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "rdr/errors.hpp"
#include "rdr/numkernel/stability.hpp"

namespace rdr::linear_response {

namespace {
constexpr cplx I{0.0, 1.0};

double sq(double x) { return x * x; }

double mech_lorentzian(const SystemParams& p, double detuning_from_resonance) {
  return p.gamma_m / (sq(0.5 * p.gamma_m) + sq(detuning_from_resonance));
}

// conj(chi_r^-1[-w]) = kappa/2 - i(w - Delta)
cplx chi_r_inv_conj_neg(double omega, const SystemParams& p) {
  return 0.5 * p.kappa - I * (omega - p.detuning);
}
}  // namespace

cplx chi_m(double omega, const SystemParams& p) {
  return 1.0 / (0.5 * p.gamma_m - I * (omega - p.omega_m));
}

cplx chi_r(double omega, const SystemParams& p) {
  return 1.0 / (0.5 * p.kappa - I * (omega + p.detuning));
}

cplx self_energy(double omega, const SystemParams& p) {
  const double g2 = sq(p.coupling);
  return -I * g2 * (chi_m(omega, p) - std::conj(chi_m(-omega, p)));
}

cplx response_denominator(double omega, const SystemParams& p) {
  return (1.0 / chi_r(omega, p)) * chi_r_inv_conj_neg(omega, p) -
         2.0 * p.detuning * self_energy(omega, p);
}

Backaction backaction(const SystemParams& p) {
  const cplx s = self_energy(-p.detuning, p);
  Backaction b;
  b.kappa_om = -2.0 * s.imag();
  b.delta_om = -s.real();
  b.kappa_eff = p.kappa + b.kappa_om;
  b.delta_eff = p.detuning + b.delta_om;
  b.omega_eff = p.omega_m - s.real();
  return b;
}

double kappa_om_lorentzian(const SystemParams& p) {
  const double g2 = sq(p.coupling);
  return g2 * mech_lorentzian(p, p.detuning + p.omega_m) -
         g2 * mech_lorentzian(p, p.detuning - p.omega_m);
}

double delta_om_lorentzian(const SystemParams& p) {
  const double g2 = sq(p.coupling);
  const double plus = p.detuning + p.omega_m;
  const double minus = p.detuning - p.omega_m;
  return g2 * plus / (sq(0.5 * p.gamma_m) + sq(plus)) - g2 * minus / (sq(0.5 * p.gamma_m) + sq(minus));
}

double displacement_spectrum(double omega, const SystemParams& p) {
  return (p.n_th + 1.0) * mech_lorentzian(p, omega + p.omega_m) +
         p.n_th * mech_lorentzian(p, omega - p.omega_m);
}

TransitionRates transition_rates(const SystemParams& p) {
  const double g2 = sq(p.coupling);
  return {g2 * displacement_spectrum(-p.detuning, p), g2 * displacement_spectrum(p.detuning, p)};
}

ComplexMatrix drift_matrix(const SystemParams& p) {
  const double k2 = 0.5 * p.kappa;
  const double gm2 = 0.5 * p.gamma_m;
  const cplx iG = I * p.coupling;
  const cplx d = I * p.detuning;
  const cplx w = I * p.omega_m;
  return ComplexMatrix{
      {d - k2, 0.0, iG, iG},
      {0.0, -d - k2, -iG, -iG},
      {iG, iG, -w - gm2, 0.0},
      {-iG, -iG, 0.0, w - gm2},
  };
}

ComplexMatrix input_matrix(const SystemParams& p) {
  const double sk = std::sqrt(p.kappa);
  const double sg = std::sqrt(p.gamma_m);
  const std::array<cplx, 4> d{sk, sk, sg, sg};
  return ComplexMatrix::diagonal(d);
}

ComplexMatrix scattering_from_drift(double omega, const ComplexMatrix& drift, const ComplexMatrix& input) {
  const std::size_t n = drift.rows();
  ComplexMatrix lhs = drift;
  for (std::size_t i = 0; i < n; ++i) lhs(i, i) += I * omega;
  ComplexMatrix u = input * numkernel::solve_linear(lhs, input);
  for (std::size_t i = 0; i < n; ++i) u(i, i) += 1.0;
  return u;
}

ComplexMatrix scattering_matrix(double omega, const SystemParams& p) {
  return scattering_from_drift(omega, drift_matrix(p), input_matrix(p));
}

double ScatteringRow::commutator() const {
  return std::norm(a_coef) - std::norm(b_coef) + std::norm(c_coef) - std::norm(d_coef);
}

ScatteringRow first_row(const ComplexMatrix& u) {
  if (u.cols() < 4) throw BadLength("first_row needs at least 4 columns");
  return {u(0, 0), u(0, 1), u(0, 2), u(0, 3)};
}

ScatteringRow scattering_coeffs_with_sigma(double omega, const SystemParams& p, cplx sigma) {
  const cplx rinv = 1.0 / chi_r(omega, p);
  const cplx rinv_cn = chi_r_inv_conj_neg(omega, p);
  const cplx n = rinv * rinv_cn - 2.0 * p.detuning * sigma;
  if (std::abs(n) < 1e-12 * std::abs(rinv * rinv_cn)) throw PoleAtFrequency(omega);

  const double k = p.kappa;
  const double root = std::sqrt(k * p.gamma_m);
  const cplx gm = I * p.coupling * root;
  ScatteringRow r;
  r.a_coef = 1.0 - k / n * (rinv_cn - I * sigma);
  r.b_coef = I * k * sigma / n;
  // Sign follows a_out = a_in - sqrt(kappa) da; the commonly printed form has +i G here.
  r.c_coef = -gm * rinv_cn * chi_m(omega, p) / n;
  r.d_coef = -gm * rinv_cn * std::conj(chi_m(-omega, p)) / n;
  return r;
}

ScatteringRow scattering_coeffs(double omega, const SystemParams& p) {
  return scattering_coeffs_with_sigma(omega, p, self_energy(omega, p));
}

std::optional<double> weak_coupling_gain(double delta_s, const SystemParams& p, const Backaction& ba) {
  const cplx denom = 0.5 * ba.kappa_eff - I * (delta_s + ba.delta_eff);
  if (std::abs(denom) <= 1e-15 * p.kappa) return std::nullopt;
  return std::norm(1.0 - p.kappa / denom);
}

GainSpectrum gain_spectrum(std::span<const double> grid, const SystemParams& p) {
  GainSpectrum out;
  out.weak.kind = SpectrumKind::Gain;
  out.exact.kind = SpectrumKind::Gain;
  out.weak.omegas.assign(grid.begin(), grid.end());
  out.exact.omegas.assign(grid.begin(), grid.end());

  const Backaction ba = backaction(p);
  for (double ds : grid) {
    bool pole = false;
    auto weak = weak_coupling_gain(ds, p, ba);
    double w = weak.value_or(kGainCap);
    if (!weak || !(w < kGainCap)) {
      w = kGainCap;
      pole = true;
    }
    double e = kGainCap;
    try {
      e = std::norm(scattering_coeffs(ds, p).a_coef);
      if (!(e < kGainCap)) {
        e = kGainCap;
        pole = true;
      }
    } catch (const PoleAtFrequency&) {
      pole = true;
    }
    out.weak.values.emplace_back(w, 0.0);
    out.exact.values.emplace_back(e, 0.0);
    out.at_pole.push_back(pole);
  }
  out.weak.validate();
  out.exact.validate();
  return out;
}

double rwa_gain(double c) {
  if (c == 1.0) return std::numeric_limits<double>::infinity();
  return sq((c + 1.0) / (c - 1.0));
}

double rwa_added_noise(double c, double n_eff) { return 4.0 * c * (n_eff + 0.5) / sq(c + 1.0); }

double added_noise(const SystemParams& p, double delta_s, std::optional<double> n_eff) {
  const ScatteringRow r = scattering_coeffs(delta_s, p);
  const double a2 = std::norm(r.a_coef);
  if (a2 < 1e-24) throw ZeroGain("gain vanishes at delta_s = " + std::to_string(delta_s));
  return (n_eff.value_or(p.n_th) + 0.5) * std::norm(r.d_coef) / a2;
}

double resonance_frequency(const SystemParams& p) { return -backaction(p).delta_eff; }

double resonant_gain(const SystemParams& p) {
  return std::norm(scattering_coeffs(resonance_frequency(p), p).a_coef);
}

bool is_stable(const SystemParams& p) { return numkernel::is_stable(drift_matrix(p)); }

double PeakMetrics::gain_bandwidth() const { return std::sqrt(peak) * hwhm; }

PeakMetrics measure_peak(const std::function<double(double)>& f, double center_guess,
                         double search_halfwidth, std::size_t scan_points) {
  if (!(search_halfwidth > 0.0)) throw RangeError("measure_peak: search half-width must be > 0");
  if (scan_points < 5) scan_points = 5;

  const double lo = center_guess - search_halfwidth;
  const double step = 2.0 * search_halfwidth / static_cast<double>(scan_points - 1);
  std::vector<double> xs(scan_points), ys(scan_points);
  std::size_t best = 0;
  for (std::size_t i = 0; i < scan_points; ++i) {
    xs[i] = lo + step * static_cast<double>(i);
    ys[i] = f(xs[i]);
    if (ys[i] > ys[best]) best = i;
  }

  // Golden-section refinement inside the neighbouring scan cells.
  double a = xs[best > 0 ? best - 1 : 0];
  double b = xs[std::min(best + 1, scan_points - 1)];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 100 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    }
  }
  PeakMetrics m;
  m.center = 0.5 * (a + b);
  m.peak = f(m.center);
  if (ys[best] > m.peak) {
    m.center = xs[best];
    m.peak = ys[best];
  }

  const double half = 0.5 * m.peak;
  auto crossing = [&](double direction) -> double {
    // Walk outward on the scan spacing until f drops below half, then bisect.
    double inner = m.center;
    double outer = m.center;
    const double limit = search_halfwidth * 4.0;
    bool found = false;
    for (double d = step; d <= limit; d += step) {
      outer = m.center + direction * d;
      if (f(outer) < half) {
        found = true;
        break;
      }
      inner = outer;
    }
    if (!found) return std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 200 && std::abs(outer - inner) > 1e-14 * std::max(1.0, std::abs(inner)); ++it) {
      const double mid = 0.5 * (inner + outer);
      (f(mid) < half ? outer : inner) = mid;
    }
    return 0.5 * (inner + outer);
  };
  const double left = crossing(-1.0);
  const double right = crossing(+1.0);
  m.hwhm = 0.5 * (right - left);
  return m;
}

}  // namespace rdr::linear_response
