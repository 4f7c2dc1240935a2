#include "rdr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rdr/errors.hpp"
#include "rdr/linear_response.hpp"
#include "rdr/numkernel/cubic.hpp"

namespace rdr::dynamics {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr std::size_t kMaxHarmonics = 10;

double static_shift(const SystemParams& p) {
  return 2.0 * p.g0 * p.g0 * p.omega_m / (p.omega_m * p.omega_m + 0.25 * p.gamma_m * p.gamma_m);
}

double period(const SystemParams& p) { return 2.0 * std::numbers::pi / p.omega_m; }

struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
};

Segment steady_segment(const Trajectory& traj, double discard_fraction) {
  if (!(discard_fraction >= 0.0 && discard_fraction < 1.0))
    throw ConfigError("discard fraction must be in [0, 1)");
  const auto n = traj.size();
  return {static_cast<std::size_t>(std::floor(discard_fraction * static_cast<double>(n))), n};
}

std::vector<double> real_parts(const std::vector<cplx>& v, std::size_t begin, std::size_t end,
                               bool subtract_mean) {
  std::vector<double> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back(v[i].real());
  if (subtract_mean && !out.empty()) {
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
    for (double& x : out) x -= mean;
  }
  return out;
}

numkernel::PowerSpectrum tail_spectrum(const std::vector<cplx>& v, Segment seg, double dt,
                                       numkernel::Window w, bool subtract_mean) {
  const std::size_t len = numkernel::floor_power_of_two(seg.end - seg.begin);
  if (len < 64) throw TooShort("steady segment holds fewer than 64 samples");
  return numkernel::power_spectrum(real_parts(v, seg.end - len, seg.end, subtract_mean), dt, w);
}

double band_power(const std::vector<double>& power, std::size_t k, std::size_t half) {
  if (k >= power.size()) return 0.0;
  const std::size_t lo = k > half ? k - half : 1;
  const std::size_t hi = std::min(power.size() - 1, k + half);
  double s = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) s += power[i];
  return s;
}

std::size_t ac_peak(const std::vector<double>& power) {
  std::size_t best = 1;
  for (std::size_t k = 2; k < power.size(); ++k)
    if (power[k] > power[best]) best = k;
  return best;
}

ComplexSpectrum to_complex_spectrum(const numkernel::PowerSpectrum& ps) {
  ComplexSpectrum s;
  s.kind = SpectrumKind::Power;
  s.real_valued = true;
  s.omegas = ps.omegas;
  s.values.assign(ps.power.begin(), ps.power.end());
  return s;
}

}  // namespace

void DriveParams::validate() const {
  if (!std::isfinite(drive_amp) || drive_amp < 0.0) throw ConfigError("drive_amp must be finite and >= 0");
  if (!std::isfinite(detuning0)) throw ConfigError("detuning0 must be finite");
}

MeanFieldState mean_field_rhs(const SystemParams& p, const DriveParams& d, const MeanFieldState& y) {
  const cplx a = y[0];
  const cplx b = y[1];
  const double x = 2.0 * b.real();
  return {(kI * d.detuning0 - 0.5 * p.kappa) * a + kI * p.g0 * x * a - kI * d.drive_amp,
          (-kI * p.omega_m - 0.5 * p.gamma_m) * b + kI * p.g0 * std::norm(a)};
}

double steady_state_cubic(const SystemParams& p, const DriveParams& d, double n) {
  const double shifted = d.detuning0 + static_shift(p) * n;
  return n * (0.25 * p.kappa * p.kappa + shifted * shifted) - d.drive_amp * d.drive_amp;
}

std::vector<FixedPoint> fixed_points(const SystemParams& p, const DriveParams& d) {
  p.validate();
  d.validate();
  const double s = static_shift(p);
  const double den = 0.25 * p.kappa * p.kappa + d.detuning0 * d.detuning0;
  const double n_lin = d.drive_amp * d.drive_amp / den;

  // n = n_lin x turns the photon-number cubic into (u^2/D) x^3 + (2 Delta_0 u / D) x^2 + x - 1
  // with u = s n_lin, which keeps the coefficients of order one.
  std::vector<double> ns;
  if (n_lin == 0.0) {
    ns.push_back(0.0);
  } else {
    const double u = s * n_lin;
    for (double x : numkernel::cubic_real_roots(u * u / den, 2.0 * d.detuning0 * u / den, 1.0, -1.0))
      if (x > 0.0) ns.push_back(x * n_lin);
  }

  std::vector<FixedPoint> out;
  for (double n : ns) {
    FixedPoint fp;
    const double shifted = d.detuning0 + s * n;
    fp.a_bar = -kI * d.drive_amp / (0.5 * p.kappa - kI * shifted);
    fp.b_bar = kI * p.g0 * std::norm(fp.a_bar) / (kI * p.omega_m + 0.5 * p.gamma_m);
    fp.branch_index = out.size();
    fp.stable = linear_response::is_stable(linearized_params(p, d, fp));
    out.push_back(fp);
  }
  return out;
}

double fixed_point_residual(const SystemParams& p, const DriveParams& d, const FixedPoint& fp) {
  const auto r = mean_field_rhs(p, d, {fp.a_bar, fp.b_bar});
  return std::hypot(std::abs(r[0]), std::abs(r[1]));
}

double residual_scale(const SystemParams& p, const DriveParams& d, const FixedPoint& fp) {
  return p.kappa * std::abs(fp.a_bar) + p.gamma_m * std::abs(fp.b_bar) + d.drive_amp;
}

SystemParams linearized_params(const SystemParams& p, const DriveParams& d, const FixedPoint& fp) {
  SystemParams q = p;
  q.detuning = d.detuning0 + 2.0 * p.g0 * fp.b_bar.real();
  q.detuning_kind = DetuningKind::Shifted;
  q.coupling = p.g0 * std::abs(fp.a_bar);
  return q;
}

std::string describe(const InitialCondition& ic) {
  struct {
    std::string operator()(const PerturbedFixedPoint& x) const {
      return "perturbed_fixed_point(branch=" + std::to_string(x.branch.value_or(0)) +
             ", epsilon_scale=" + format_double(x.epsilon_scale) + ")";
    }
    std::string operator()(const CustomStart& x) const {
      return "custom(a0=" + format_double(x.a0.real()) + "+" + format_double(x.a0.imag()) +
             "i, b0=" + format_double(x.b0.real()) + "+" + format_double(x.b0.imag()) + "i)";
    }
    std::string operator()(const ZeroStart&) const { return "zero"; }
  } visitor;
  return std::visit(visitor, ic);
}

SimulationOptions options_for_periods(const SystemParams& p, double periods, double steps_per_period,
                                      std::size_t stride) {
  if (!(periods > 0.0) || !(steps_per_period > 0.0)) throw ConfigError("periods and steps per period must be > 0");
  SimulationOptions o;
  o.t_end = periods * period(p);
  o.dt = period(p) / steps_per_period;
  o.stride = stride;
  return o;
}

Trajectory simulate(const SystemParams& p, const DriveParams& d, const SimulationOptions& opt) {
  p.validate();
  d.validate();
  if (!(opt.t_end > 0.0) || !(opt.dt > 0.0)) throw ConfigError("t_end and dt must be > 0");

  MeanFieldState y0{};
  if (const auto* pert = std::get_if<PerturbedFixedPoint>(&opt.init)) {
    const auto fps = fixed_points(p, d);
    const std::size_t branch = pert->branch.value_or(0);
    if (branch >= fps.size())
      throw ConfigError("fixed-point branch " + std::to_string(branch) + " does not exist (" +
                        std::to_string(fps.size()) + " found)");
    const auto& fp = fps[branch];
    const double eps = pert->epsilon_scale * std::max(1.0, std::abs(fp.b_bar));
    y0 = {fp.a_bar, fp.b_bar + eps * cplx(1.0, 1.0)};
  } else if (const auto* c = std::get_if<CustomStart>(&opt.init)) {
    y0 = {c->a0, c->b0};
  }

  const double guard = 1e6 * std::max(1.0, 2.0 * d.drive_amp / p.kappa);
  auto rhs = [&](double, const MeanFieldState& y) { return mean_field_rhs(p, d, y); };
  auto blown_up = [guard](const MeanFieldState& y) { return std::abs(y[0]) > guard; };
  auto run = numkernel::rk4_integrate<2>(rhs, y0, 0.0, opt.t_end, opt.dt, opt.stride, blown_up);

  Trajectory t;
  t.t0 = 0.0;
  t.dt = opt.dt * static_cast<double>(opt.stride);
  t.a = std::move(run.series[0].samples);
  t.b = std::move(run.series[1].samples);
  t.params = p;
  t.drive = d;
  t.init = describe(opt.init);
  switch (run.status) {
    case numkernel::IntegrationStatus::Completed:
      t.stop_reason = "completed";
      break;
    case numkernel::IntegrationStatus::NonFinite:
      t.diverged = true;
      t.stop_reason = "non-finite state";
      break;
    case numkernel::IntegrationStatus::Stopped:
      t.diverged = true;
      t.stop_reason = "|a| exceeded blow-up guard";
      break;
  }
  return t;
}

CsvTable Trajectory::to_csv() const {
  CsvTable csv({"t", "re_a", "im_a", "re_b", "im_b"});
  for (std::size_t i = 0; i < size(); ++i)
    csv.add_row({time(i), a[i].real(), a[i].imag(), b[i].real(), b[i].imag()});
  return csv;
}

EmissionSpectra emission_spectrum(const Trajectory& traj, double discard_fraction, numkernel::Window window) {
  const auto seg = steady_segment(traj, discard_fraction);
  return {to_complex_spectrum(tail_spectrum(traj.a, seg, traj.dt, window, false)),
          to_complex_spectrum(tail_spectrum(traj.b, seg, traj.dt, window, false))};
}

std::string_view to_string(Motion m) {
  switch (m) {
    case Motion::Decay:
      return "decay";
    case Motion::LimitCycle:
      return "limit_cycle";
    case Motion::Irregular:
      return "irregular";
  }
  return "unknown";
}

nlohmann::json RegimeReport::to_json() const {
  return {{"classification", std::string(to_string(classification))},
          {"dominant_freq_a", dominant_freq_a},
          {"dominant_freq_b", dominant_freq_b},
          {"harmonic_content_a", harmonic_content_a},
          {"amplitude_ratio", amplitude_ratio},
          {"frequency_resolution", frequency_resolution},
          {"cavity_harmonics", cavity_harmonics},
          {"mean_re_b", mean_re_b},
          {"freq_candidate_single", freq_candidate_single},
          {"freq_candidate_double", freq_candidate_double},
          {"matched_candidate", matched_candidate}};
}

RegimeReport classify_regime(const Trajectory& traj, const ClassifyOptions& opt) {
  if (traj.diverged) throw NumericalError("cannot classify a diverged trajectory (" + traj.stop_reason + ")");
  const auto seg = steady_segment(traj, opt.discard_fraction);
  const double span = traj.dt * static_cast<double>(seg.end - seg.begin);
  if (span < opt.min_periods * period(traj.params))
    throw TooShort("steady segment spans fewer than " + format_double(opt.min_periods) + " mechanical periods");

  RegimeReport r;
  const auto re_a = real_parts(traj.a, seg.begin, seg.end, false);
  const auto [mn, mx] = std::minmax_element(re_a.begin(), re_a.end());
  const double max_abs = std::max(std::abs(*mn), std::abs(*mx));

  double max_a = 0.0, max_b = 0.0, sum_b = 0.0;
  for (std::size_t i = seg.begin; i < seg.end; ++i) {
    max_a = std::max(max_a, std::abs(traj.a[i]));
    max_b = std::max(max_b, std::abs(traj.b[i]));
    sum_b += traj.b[i].real();
  }
  r.amplitude_ratio = max_b > 0.0 ? max_a / max_b : 0.0;
  r.mean_re_b = sum_b / static_cast<double>(seg.end - seg.begin);

  const auto pa = tail_spectrum(traj.a, seg, traj.dt, numkernel::Window::Hann, true);
  const auto pb = tail_spectrum(traj.b, seg, traj.dt, numkernel::Window::Hann, true);
  r.frequency_resolution = pa.d_omega;
  const std::size_t ka = ac_peak(pa.power);
  const std::size_t kb = ac_peak(pb.power);
  r.dominant_freq_a = pa.omegas[ka];
  r.dominant_freq_b = pb.omegas[kb];

  const double line = band_power(pa.power, ka, 2);
  r.harmonic_content_a = line > 0.0 ? band_power(pa.power, 2 * ka, 2) / line : 0.0;

  std::vector<double> sorted(pa.power.begin() + 1, pa.power.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double floor = sorted[sorted.size() / 2];
  for (std::size_t m = 1; m <= kMaxHarmonics && kb >= 3 && m * kb + 2 < pa.power.size(); ++m) {
    double peak = 0.0;
    for (std::size_t k = m * kb - std::min<std::size_t>(2, m * kb - 1); k <= m * kb + 2; ++k)
      peak = std::max(peak, pa.power[k]);
    if (peak > 100.0 * floor) ++r.cavity_harmonics;
  }

  const auto& p = traj.params;
  const double d0 = traj.drive.detuning0;
  r.freq_candidate_single = d0 + p.g0 * r.mean_re_b;
  r.freq_candidate_double = d0 + 2.0 * p.g0 * r.mean_re_b;
  r.matched_candidate = std::abs(std::abs(r.freq_candidate_single) - r.dominant_freq_a) <
                                std::abs(std::abs(r.freq_candidate_double) - r.dominant_freq_a)
                            ? "single"
                            : "double";

  if (max_abs == 0.0 || (*mx - *mn) < opt.decay_threshold * max_abs) {
    r.classification = Motion::Decay;
  } else {
    const double total = std::accumulate(pa.power.begin() + 1, pa.power.end(), 0.0);
    r.classification = line > opt.dominance * total ? Motion::LimitCycle : Motion::Irregular;
  }
  return r;
}

double decay_rate(const Trajectory& traj, cplx a_ref, double t_begin, double t_end) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.time(i);
    if (t < t_begin || t > t_end) continue;
    const double dev = std::abs(traj.a[i] - a_ref);
    if (!(dev > 0.0)) continue;
    const double y = std::log(dev);
    sx += t;
    sy += y;
    sxx += t * t;
    sxy += t * y;
    ++n;
  }
  if (n < 2) throw TooShort("fewer than two samples in the fit window");
  const double nn = static_cast<double>(n);
  const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  return -slope;
}

double oscillation_amplitude_b(const Trajectory& traj, double discard_fraction) {
  const auto seg = steady_segment(traj, discard_fraction);
  if (seg.end <= seg.begin) throw TooShort("empty steady segment");
  const auto re_b = real_parts(traj.b, seg.begin, seg.end, false);
  const auto [mn, mx] = std::minmax_element(re_b.begin(), re_b.end());
  return 0.5 * (*mx - *mn);
}

ThresholdEstimate threshold_scan(const SystemParams& p, double detuning0, double drive_lo, double drive_hi,
                                 std::size_t n_points, const ThresholdScanOptions& opt) {
  const auto grid = linspace(drive_lo, drive_hi, n_points);
  const auto sim = options_for_periods(p, opt.periods, opt.steps_per_period, opt.stride);
  ThresholdEstimate est;

  auto decays = [&](double drive) {
    ++est.simulations;
    const DriveParams d{drive, detuning0};
    const auto traj = simulate(p, d, sim);
    if (traj.diverged) return false;
    return classify_regime(traj, opt.classify).classification == Motion::Decay;
  };

  bool first = decays(grid.front());
  double lo = grid.front(), hi = grid.front();
  bool found = false;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const bool v = decays(grid[i]);
    if (v != first) {
      lo = grid[i - 1];
      hi = grid[i];
      found = true;
      break;
    }
  }
  if (!found) throw NoFlipInRange("classification does not change across the drive range");

  // Track which side decays so the bracket is oriented either way.
  const bool lo_decays = first;
  while ((hi - lo) > opt.rel_tol * std::abs(hi)) {
    const double mid = 0.5 * (lo + hi);
    (decays(mid) == lo_decays ? lo : hi) = mid;
  }
  est.drive = 0.5 * (lo + hi);
  est.drive_below = lo_decays ? lo : hi;
  est.drive_above = lo_decays ? hi : lo;

  const DriveParams d{est.drive, detuning0};
  const auto fps = fixed_points(p, d);
  if (fps.empty()) throw NumericalError("no fixed point at the threshold drive");
  est.cooperativity = cooperativity(linearized_params(p, d, fps.front()));
  return est;
}

}  // namespace rdr::dynamics
