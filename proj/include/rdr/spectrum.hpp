#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rdr/io.hpp"

namespace rdr {

enum class SpectrumKind { Gain, AddedNoise, SelfEnergy, Coefficient, Gain2, Noise2, Power };

std::string_view to_string(SpectrumKind k);

/// Values sampled on a strictly increasing frequency grid.
/// Real-valued spectra (gain, noise, power) keep a zero imaginary part and
/// serialize with a single value column.
struct ComplexSpectrum {
  std::vector<double> omegas;
  std::vector<std::complex<double>> values;
  SpectrumKind kind = SpectrumKind::Gain;
  bool real_valued = true;

  std::size_t size() const { return omegas.size(); }
  /// Throws ConfigError if the grid is not strictly increasing or lengths differ.
  void validate() const;

  /// CSV with columns (omega, value) or (omega, re, im).
  CsvTable to_csv() const;
  /// {"omegas": [...], "values": [...], "kind": "..."}; complex values as [re, im] pairs.
  nlohmann::json to_json() const;
};

/// `points` evenly spaced values from start to stop inclusive.
/// Throws RangeError unless start < stop and points >= 2.
std::vector<double> linspace(double start, double stop, std::size_t points);

}  // namespace rdr
