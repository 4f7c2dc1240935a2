#include "rdr/spectrum.hpp"

#include "rdr/errors.hpp"

namespace rdr {

std::string_view to_string(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::Gain: return "gain";
    case SpectrumKind::AddedNoise: return "added_noise";
    case SpectrumKind::SelfEnergy: return "self_energy";
    case SpectrumKind::Coefficient: return "coefficient";
    case SpectrumKind::Gain2: return "gain2";
    case SpectrumKind::Noise2: return "noise2";
    case SpectrumKind::Power: return "power";
  }
  return "?";
}

void ComplexSpectrum::validate() const {
  if (omegas.size() != values.size()) throw ConfigError("spectrum grid and value lengths differ");
  for (std::size_t i = 1; i < omegas.size(); ++i)
    if (!(omegas[i] > omegas[i - 1])) throw ConfigError("spectrum grid is not strictly increasing");
}

CsvTable ComplexSpectrum::to_csv() const {
  CsvTable t(real_valued ? std::vector<std::string>{"omega", "value"}
                         : std::vector<std::string>{"omega", "re", "im"});
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    if (real_valued)
      t.add_row(std::vector<double>{omegas[i], values[i].real()});
    else
      t.add_row(std::vector<double>{omegas[i], values[i].real(), values[i].imag()});
  }
  return t;
}

nlohmann::json ComplexSpectrum::to_json() const {
  nlohmann::json vals = nlohmann::json::array();
  for (const auto& v : values) {
    if (real_valued)
      vals.push_back(v.real());
    else
      vals.push_back({v.real(), v.imag()});
  }
  return {{"omegas", omegas}, {"values", std::move(vals)}, {"kind", std::string(to_string(kind))}};
}

std::vector<double> linspace(double start, double stop, std::size_t points) {
  if (!(start < stop)) throw RangeError("sweep start must be below stop");
  if (points < 2) throw RangeError("sweep needs at least 2 points");
  std::vector<double> out(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = stop;
  return out;
}

}  // namespace rdr
