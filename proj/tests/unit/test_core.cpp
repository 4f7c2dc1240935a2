#include <doctest.h>

#include <cmath>

#include "rdr/core.hpp"
#include "rdr/errors.hpp"
#include "rdr/spectrum.hpp"

using namespace rdr;

TEST_CASE("validate rejects non-physical parameters") {
  SystemParams p;
  CHECK_NOTHROW(p.validate());

  auto bad = p;
  bad.kappa = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.gamma_m = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.coupling = std::nan("");
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.n_th = -0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("low-Q mechanics is a warning, not an error") {
  SystemParams p;
  p.omega_m = 1.0;
  p.gamma_m = 0.5;
  CHECK_NOTHROW(p.validate());
  CHECK_FALSE(p.high_q());
  CHECK(p.warnings().size() == 1);
}

TEST_CASE("cooperativity matches 4G^2/(Gamma kappa)") {
  SystemParams p;
  p.kappa = 2.0;
  p.gamma_m = 3.0;
  p.coupling = 1.5;
  CHECK(cooperativity(p) == doctest::Approx(4.0 * 2.25 / 6.0));
  CHECK(cooperativity(p.with_coupling(coupling_for_cooperativity(0.8, 3.0, 2.0))) ==
        doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("cooperativity and regime are invariant under rescaling of all rates") {
  SystemParams p;
  p.kappa = 0.7;
  p.gamma_m = 9.1;
  p.omega_m = 40.0;
  p.coupling = 1.3;
  // Powers of two scale without rounding, so equality is exact.
  for (double lambda : {0.125, 0.5, 2.0, 1024.0}) {
    const auto q = p.scaled(lambda);
    CHECK(cooperativity(q) == cooperativity(p));
    CHECK(classify_regime(q).regime == classify_regime(p).regime);
  }
  for (double lambda : {0.3, 7.0, 1e3}) {
    CHECK(cooperativity(p.scaled(lambda)) == doctest::Approx(cooperativity(p)).epsilon(1e-14));
    CHECK(classify_regime(p.scaled(lambda)).regime == classify_regime(p).regime);
  }
}

TEST_CASE("regime classification uses the rate ratio") {
  SystemParams p;
  p.kappa = 1.0;
  p.gamma_m = 10.0;
  CHECK(classify_regime(p).regime == Regime::RDR);
  p.gamma_m = 0.1;
  CHECK(classify_regime(p).regime == Regime::NDR);
  p.gamma_m = 1.0;
  CHECK(classify_regime(p).regime == Regime::Intermediate);
  CHECK(to_string(Regime::RDR) == "RDR");
}

TEST_CASE("parameter JSON round trip and unknown keys") {
  SystemParams p;
  p.kappa = 1.0;
  p.gamma_m = 10.0;
  p.omega_m = 50.0;
  p.detuning = 50.0;
  p.coupling = 2.5;
  p.n_th = 3.0;
  const auto back = system_params_from_json(to_json(p));
  CHECK(back.gamma_m == p.gamma_m);
  CHECK(back.coupling == p.coupling);
  CHECK(back.n_th == p.n_th);

  CHECK_THROWS_AS(system_params_from_json({{"kapa", 1.0}}), ConfigError);
  CHECK_THROWS_AS(system_params_from_json({{"kappa", "one"}}), ConfigError);

  ThreeModeParams t;
  t.base = p;
  t.kappa2 = 5.0;
  t.coupling2 = 0.3;
  t.detuning2 = -50.0;
  const auto t2 = three_mode_params_from_json(to_json(t));
  CHECK(t2.kappa2 == 5.0);
  CHECK(t2.coupling2 == 0.3);
  CHECK(t2.detuning2 == -50.0);
  CHECK(cooperativity2(t2) == doctest::Approx(4 * 0.09 / 50.0));
}

TEST_CASE("linspace endpoints and range errors") {
  const auto g = linspace(-1.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == doctest::Approx(0.0));
  CHECK_THROWS_AS(linspace(1.0, -1.0, 5), RangeError);
  CHECK_THROWS_AS(linspace(0.0, 1.0, 1), RangeError);
}

TEST_CASE("spectrum validation") {
  ComplexSpectrum s;
  s.omegas = {0.0, 1.0, 1.0};
  s.values.assign(3, 0.0);
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s.omegas = {0.0, 1.0, 2.0};
  CHECK_NOTHROW(s.validate());
  s.values.pop_back();
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
