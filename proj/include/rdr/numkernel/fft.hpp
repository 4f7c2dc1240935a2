#pragma once

#include <complex>
#include <span>
#include <vector>

namespace rdr::numkernel {

enum class Window { Rect, Hann };

/// In-place radix-2 DIT FFT, forward sign exp(-2 pi i k n / N).
/// Throws BadLength unless the size is a power of two.
void fft_inplace(std::span<std::complex<double>> x);

bool is_power_of_two(std::size_t n);

/// Largest power of two not exceeding n (0 for n == 0).
std::size_t floor_power_of_two(std::size_t n);

struct PowerSpectrum {
  std::vector<double> omegas;  ///< 2 pi k / (N dt), k = 0..N/2
  std::vector<double> power;   ///< one-sided |X(omega)|^2
  double d_omega = 0.0;        ///< grid spacing
};

/// One-sided power spectrum of a real, uniformly sampled signal.
///
/// X_k = dt * sum_n w_n x_n exp(-2 pi i k n / N); interior bins are doubled so that
/// sum_k power_k * d_omega / (2 pi) = dt * sum_n |w_n x_n|^2 (Parseval).
PowerSpectrum power_spectrum(std::span<const double> samples, double dt, Window window);

}  // namespace rdr::numkernel
