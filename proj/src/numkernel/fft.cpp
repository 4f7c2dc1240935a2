#include "rdr/numkernel/fft.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "rdr/errors.hpp"

namespace rdr::numkernel {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t floor_power_of_two(std::size_t n) {
  if (n == 0) return 0;
  std::size_t p = 1;
  while (p <= n / 2) p <<= 1;
  return p;
}

void fft_inplace(std::span<std::complex<double>> x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) throw BadLength("FFT length " + std::to_string(n) + " is not a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles computed directly rather than by recurrence to keep round-off flat.
      const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
      for (std::size_t start = 0; start < n; start += len) {
        const auto u = x[start + k];
        const auto v = x[start + k + half] * w;
        x[start + k] = u + v;
        x[start + k + half] = u - v;
      }
    }
  }
}

PowerSpectrum power_spectrum(std::span<const double> samples, double dt, Window window) {
  const std::size_t n = samples.size();
  if (!is_power_of_two(n)) throw BadLength("power_spectrum needs a power-of-two sample count, got " + std::to_string(n));
  if (!(dt > 0.0)) throw ConfigError("power_spectrum: dt must be > 0");

  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window == Window::Hann && n > 1)
      w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
    buf[i] = samples[i] * w;
  }
  fft_inplace(buf);

  PowerSpectrum out;
  const std::size_t half = n / 2;
  out.d_omega = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
  out.omegas.resize(half + 1);
  out.power.resize(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    out.omegas[k] = out.d_omega * static_cast<double>(k);
    const double p = std::norm(buf[k % n] * dt);
    out.power[k] = (k == 0 || k == half) ? p : 2.0 * p;
  }
  return out;
}

}  // namespace rdr::numkernel
