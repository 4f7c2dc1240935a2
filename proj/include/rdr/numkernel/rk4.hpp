#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "rdr/errors.hpp"

namespace rdr::numkernel {

/// Uniformly sampled complex series starting at t0.
struct TimeSeries {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<std::complex<double>> samples;

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  std::size_t size() const { return samples.size(); }
};

template <std::size_t N>
using State = std::array<std::complex<double>, N>;

enum class IntegrationStatus {
  Completed,
  NonFinite,  ///< state left the representable range; series truncated
  Stopped,    ///< caller's stop predicate fired; series truncated
};

template <std::size_t N>
struct Integration {
  std::array<TimeSeries, N> series;  ///< one per state component
  IntegrationStatus status = IntegrationStatus::Completed;
  std::size_t steps = 0;  ///< steps actually taken
};

struct NeverStop {
  template <class S>
  bool operator()(const S&) const {
    return false;
  }
};

/// Number of fixed steps needed to cover [t0, t1]: ceil((t1 - t0) / dt).
inline std::size_t rk4_step_count(double t0, double t1, double dt) {
  const double n = (t1 - t0) / dt;
  return static_cast<std::size_t>(std::ceil(n - 1e-9 * n));
}

/// Classical fixed-step RK4. `deriv(t, y)` returns dy/dt as State<N>.
/// Every `stride`-th state (including the initial one) is recorded.
template <std::size_t N, class Deriv, class Stop = NeverStop>
Integration<N> rk4_integrate(Deriv&& deriv, const State<N>& y0, double t0, double t1, double dt,
                             std::size_t stride = 1, Stop&& stop = {}) {
  if (!(dt > 0.0)) throw ConfigError("rk4_integrate: dt must be > 0");
  if (!(t1 >= t0)) throw RangeError("rk4_integrate: t1 must be >= t0");
  if (stride == 0) throw ConfigError("rk4_integrate: stride must be >= 1");

  const std::size_t steps = rk4_step_count(t0, t1, dt);
  Integration<N> out;
  for (auto& s : out.series) {
    s.t0 = t0;
    s.dt = dt * static_cast<double>(stride);
    s.samples.reserve(steps / stride + 1);
  }
  auto record = [&out](const State<N>& y) {
    for (std::size_t i = 0; i < N; ++i) out.series[i].samples.push_back(y[i]);
  };

  State<N> y = y0;
  record(y);
  State<N> tmp;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const State<N> k1 = deriv(t, y);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    const State<N> k2 = deriv(t + 0.5 * dt, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    const State<N> k3 = deriv(t + 0.5 * dt, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + dt * k3[i];
    const State<N> k4 = deriv(t + dt, tmp);

    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      finite = finite && std::isfinite(y[i].real()) && std::isfinite(y[i].imag());
    }
    out.steps = k + 1;
    if (!finite) {
      out.status = IntegrationStatus::NonFinite;
      return out;
    }
    if ((k + 1) % stride == 0) record(y);
    if (stop(y)) {
      out.status = IntegrationStatus::Stopped;
      return out;
    }
  }
  return out;
}

}  // namespace rdr::numkernel
