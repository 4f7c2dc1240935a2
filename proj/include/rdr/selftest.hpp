#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdr/core.hpp"

namespace rdr::selftest {

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;  ///< largest observed deviation
  double tolerance = 0.0;
  std::size_t samples = 0;
};

struct Report {
  std::vector<CheckResult> checks;

  bool all_passed() const;
  std::vector<std::string> failures() const;
  nlohmann::json to_json() const;
  std::string text() const;
};

/// Replacement for the self-energy inside the closed-form coefficients.
using SigmaOverride = std::function<std::complex<double>(double omega, const SystemParams& p)>;

struct Options {
  std::uint64_t seed = 0x5eed5eedULL;
  std::size_t param_sets = 50;
  std::size_t frequencies = 100;
  SigmaOverride sigma;  ///< empty: use the library self-energy
};

/// Random one-mode parameters with kappa = 1, drawn until the drift matrix is stable.
SystemParams random_stable_params(std::mt19937_64& rng);

/// Random three-mode parameters with a stable 6x6 drift matrix.
ThreeModeParams random_stable_three_mode(std::mt19937_64& rng);

/// Oracle equivalence, commutator preservation (4x4 and 6x6 row-wise), the
/// G2 = 0 reduction, and the self-energy / backaction symmetries.
Report run(const Options& opt = {});

/// Self-energy with its sign flipped; the commutator checks must reject it.
std::complex<double> corrupted_sigma(double omega, const SystemParams& p);

}  // namespace rdr::selftest
