#include "rdr/core.hpp"

#include <cmath>
#include <set>

#include "rdr/errors.hpp"
#include "rdr/io.hpp"

namespace rdr {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool finite_all(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

double read_number(const nlohmann::json& j, const char* key, double fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
  return it->get<double>();
}

const std::set<std::string> kSystemKeys = {"kappa",    "gamma_m", "omega_m",  "g0",
                                           "detuning", "coupling", "n_th",    "unit_ref",
                                           "detuning_kind"};
const std::set<std::string> kThreeModeKeys = {"kappa2", "coupling2", "detuning2"};

}  // namespace

void SystemParams::validate() const {
  require(finite_all({kappa, gamma_m, omega_m, g0, detuning, coupling, n_th}),
          "parameters must be finite");
  require(kappa > 0.0, "kappa must be > 0");
  require(gamma_m > 0.0, "gamma_m must be > 0");
  require(omega_m > 0.0, "omega_m must be > 0");
  require(g0 >= 0.0, "g0 must be >= 0");
  require(coupling >= 0.0, "coupling must be >= 0");
  require(n_th >= 0.0, "n_th must be >= 0");
}

std::vector<std::string> SystemParams::warnings() const {
  std::vector<std::string> out;
  if (!high_q())
    out.push_back("gamma_m/omega_m = " + format_double(gamma_m / omega_m) +
                  " >= 0.2: damping model assumes a high-Q oscillator");
  return out;
}

SystemParams SystemParams::scaled(double lambda) const {
  SystemParams q = *this;
  q.kappa *= lambda;
  q.gamma_m *= lambda;
  q.omega_m *= lambda;
  q.g0 *= lambda;
  q.detuning *= lambda;
  q.coupling *= lambda;
  return q;
}

SystemParams SystemParams::with_coupling(double g) const {
  SystemParams q = *this;
  q.coupling = g;
  return q;
}

SystemParams SystemParams::with_detuning(double delta) const {
  SystemParams q = *this;
  q.detuning = delta;
  return q;
}

void ThreeModeParams::validate() const {
  base.validate();
  require(finite_all({kappa2, coupling2, detuning2}), "mode-2 parameters must be finite");
  require(kappa2 > 0.0, "kappa2 must be > 0");
  require(coupling2 >= 0.0, "coupling2 must be >= 0");
}

std::vector<std::string> ThreeModeParams::warnings() const {
  auto out = base.warnings();
  if (coupling2 > 0.2 * kappa2)
    out.push_back("coupling2/kappa2 = " + format_double(coupling2 / kappa2) +
                  ": outside the weak-coupling regime assumed for mode-2 cooling");
  if (std::abs(detuning2 + base.omega_m) > 1e-9 * base.omega_m)
    out.push_back("detuning2 != -omega_m: cooling formulas assume the red sideband");
  return out;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::NDR: return "NDR";
    case Regime::RDR: return "RDR";
    case Regime::Intermediate: return "Intermediate";
  }
  return "?";
}

double cooperativity(const SystemParams& p) {
  return 4.0 * p.coupling * p.coupling / (p.gamma_m * p.kappa);
}

double cooperativity2(const ThreeModeParams& p) {
  return 4.0 * p.coupling2 * p.coupling2 / (p.kappa2 * p.base.gamma_m);
}

double coupling_for_cooperativity(double c, double gamma_m, double kappa) {
  if (c < 0.0) throw ConfigError("cooperativity must be >= 0");
  return std::sqrt(c * gamma_m * kappa / 4.0);
}

RegimeClass classify_regime(const SystemParams& p, double threshold_ratio) {
  if (!(threshold_ratio > 1.0)) throw ConfigError("threshold_ratio must be > 1");
  RegimeClass out;
  out.ratio = p.gamma_m / p.kappa;
  if (out.ratio > threshold_ratio)
    out.regime = Regime::RDR;
  else if (out.ratio < 1.0 / threshold_ratio)
    out.regime = Regime::NDR;
  else
    out.regime = Regime::Intermediate;
  return out;
}

SystemParams system_params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("parameters must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kSystemKeys.count(key) && !kThreeModeKeys.count(key))
      throw ConfigError("unknown parameter field '" + key + "'");
  }
  SystemParams p;
  p.kappa = read_number(j, "kappa", p.kappa);
  p.gamma_m = read_number(j, "gamma_m", p.gamma_m);
  p.omega_m = read_number(j, "omega_m", p.omega_m);
  p.g0 = read_number(j, "g0", p.g0);
  p.detuning = read_number(j, "detuning", p.detuning);
  p.coupling = read_number(j, "coupling", p.coupling);
  p.n_th = read_number(j, "n_th", p.n_th);
  if (auto it = j.find("unit_ref"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("field 'unit_ref' must be a string");
    p.unit_ref = it->get<std::string>();
  }
  if (auto it = j.find("detuning_kind"); it != j.end()) {
    const auto s = it->is_string() ? it->get<std::string>() : std::string{};
    if (s == "shifted")
      p.detuning_kind = DetuningKind::Shifted;
    else if (s == "bare")
      p.detuning_kind = DetuningKind::Bare;
    else
      throw ConfigError("field 'detuning_kind' must be \"shifted\" or \"bare\"");
  }
  p.validate();
  return p;
}

ThreeModeParams three_mode_params_from_json(const nlohmann::json& j) {
  ThreeModeParams p;
  p.base = system_params_from_json(j);
  p.kappa2 = read_number(j, "kappa2", p.kappa2);
  p.coupling2 = read_number(j, "coupling2", p.coupling2);
  p.detuning2 = read_number(j, "detuning2", -p.base.omega_m);
  p.validate();
  return p;
}

nlohmann::json to_json(const SystemParams& p) {
  return {{"kappa", p.kappa},       {"gamma_m", p.gamma_m},   {"omega_m", p.omega_m},
          {"g0", p.g0},             {"detuning", p.detuning}, {"coupling", p.coupling},
          {"n_th", p.n_th},         {"unit_ref", p.unit_ref},
          {"detuning_kind", p.detuning_kind == DetuningKind::Shifted ? "shifted" : "bare"}};
}

nlohmann::json to_json(const ThreeModeParams& p) {
  auto j = to_json(p.base);
  j["kappa2"] = p.kappa2;
  j["coupling2"] = p.coupling2;
  j["detuning2"] = p.detuning2;
  return j;
}

}  // namespace rdr
