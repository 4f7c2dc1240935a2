#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

#include "rdr/errors.hpp"
#include "rdr/linear_response.hpp"
#include "rdr/selftest.hpp"
#include "rdr/spectrum.hpp"
#include "rdr/three_mode.hpp"

using namespace rdr;
namespace lr = rdr::linear_response;
namespace tmm = rdr::three_mode;
using cplx = std::complex<double>;

namespace {

const cplx I{0.0, 1.0};

using Mat6 = Eigen::Matrix<cplx, 6, 6>;

// Independent 6x6 model: both cavity modes couple to x = b + b^dag.
Mat6 oracle_u6(double w, const ThreeModeParams& t) {
  const auto& p = t.base;
  const double k1 = p.kappa, k2 = t.kappa2, g = p.gamma_m;
  const double G1 = p.coupling, G2 = t.coupling2, D1 = p.detuning, D2 = t.detuning2, W = p.omega_m;
  Mat6 m = Mat6::Zero();
  m(0, 0) = I * D1 - k1 / 2;
  m(1, 1) = -I * D1 - k1 / 2;
  m(2, 2) = I * D2 - k2 / 2;
  m(3, 3) = -I * D2 - k2 / 2;
  m(4, 4) = -I * W - g / 2;
  m(5, 5) = I * W - g / 2;
  const double gs[2] = {G1, G2};
  for (int mode = 0; mode < 2; ++mode) {
    const int r = 2 * mode;
    const cplx ig = I * gs[mode];
    m(r, 4) = m(r, 5) = ig;
    m(r + 1, 4) = m(r + 1, 5) = -ig;
    m(4, r) = m(4, r + 1) = ig;
    m(5, r) = m(5, r + 1) = -ig;
  }
  Mat6 l = Mat6::Zero();
  l.diagonal() << std::sqrt(k1), std::sqrt(k1), std::sqrt(k2), std::sqrt(k2), std::sqrt(g), std::sqrt(g);
  const Mat6 sys = m + I * w * Mat6::Identity();
  return Mat6::Identity() + l * sys.inverse() * l;
}

ThreeModeParams fig3b_params(double g2) {
  ThreeModeParams t;
  t.base.kappa = 1.0;
  t.base.gamma_m = 0.01;
  t.base.omega_m = 50.0;
  t.base.detuning = 50.0;
  t.base.n_th = 10.0;
  t.kappa2 = 5.0;
  t.coupling2 = g2;
  t.detuning2 = -50.0;
  return t;
}

double n_eff_oracle(const ThreeModeParams& t) {
  const double c2 = 4 * t.coupling2 * t.coupling2 / (t.kappa2 * t.base.gamma_m);
  return t.base.n_th / (c2 + 1) + c2 / (c2 + 1) * t.kappa2 * t.kappa2 / (16 * t.base.omega_m * t.base.omega_m);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("6x6 scattering matrix matches an Eigen-inverted oracle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double worst = 0.0;
  for (int set = 0; set < 20; ++set) {
    const auto t = selftest::random_stable_three_mode(rng);
    for (int k = 0; k < 20; ++k) {
      const double w = u(rng) * t.base.omega_m;
      const auto lib = tmm::scattering_matrix_6(w, t);
      const auto o = oracle_u6(w, t);
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) worst = std::max(worst, rel(lib(r, c), o(r, c)));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("G2 = 0 reduces to the one-mode problem") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const int map[4] = {0, 1, 4, 5};
  for (int set = 0; set < 20; ++set) {
    ThreeModeParams t;
    t.base = selftest::random_stable_params(rng);
    t.kappa2 = 3.0;
    t.coupling2 = 0.0;
    t.detuning2 = -t.base.omega_m;
    CHECK(tmm::is_stable(t) == lr::is_stable(t.base));
    for (int k = 0; k < 20; ++k) {
      const double w = u(rng) * t.base.omega_m;
      const auto u6 = tmm::scattering_matrix_6(w, t);
      const auto u4 = lr::scattering_matrix(w, t.base);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) CHECK(rel(u6(map[r], map[c]), u4(r, c)) <= 1e-10);
      CHECK(tmm::two_mode_point(w, t).gain == doctest::Approx(std::norm(u4(0, 0))).epsilon(1e-10));
    }
  }
}

TEST_CASE("every 6x6 output row preserves its commutator") {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int set = 0; set < 30; ++set) {
    const auto t = selftest::random_stable_three_mode(rng);
    for (int k = 0; k < 20; ++k) {
      const auto m = tmm::scattering_matrix_6(u(rng) * t.base.omega_m, t);
      for (std::size_t r = 0; r < 6; ++r) {
        const double want = r % 2 == 0 ? 1.0 : -1.0;
        CHECK(std::abs(tmm::row_commutator(m, r) - want) <= 1e-8);
      }
    }
  }
}

TEST_CASE("effective occupancy after sideband cooling") {
  const auto t = fig3b_params(0.3);
  const auto mech = tmm::effective_mechanics(t);
  CHECK(mech.n_eff == doctest::Approx(1.22006).epsilon(1e-5));
  CHECK(mech.n_eff == doctest::Approx(n_eff_oracle(t)).epsilon(1e-14));
  CHECK(mech.gamma_eff == doctest::Approx(0.01 * (1 + 7.2)));
  CHECK(mech.instability_coop == doctest::Approx(8.2));
}

TEST_CASE("n_eff decreases with C2 when the bath is hot") {
  double prev = 1e300;
  for (double g2 = 0.01; g2 < 1.0; g2 += 0.02) {
    const double n = tmm::effective_mechanics(fig3b_params(g2)).n_eff;
    CHECK(n < prev);
    prev = n;
  }
}

TEST_CASE("instability threshold moves to Gamma_eff / Gamma_m") {
  for (double g2 : {0.1, 0.2, 0.3}) {
    auto t = fig3b_params(g2);
    const double want = tmm::effective_mechanics(t).instability_coop;
    const double got = tmm::instability_cooperativity(t, 3.0 * want);
    CHECK(got == doctest::Approx(want).epsilon(0.02));
  }
  auto t = fig3b_params(0.3);
  CHECK_THROWS_AS(tmm::instability_cooperativity(t, 1.0), NoFlipInRange);
}

TEST_CASE("near-threshold noise approaches n_eff + 1/2") {
  for (double g2 : {0.1, 0.2, 0.3}) {
    auto t = fig3b_params(g2);
    const auto mech = tmm::effective_mechanics(t);
    t.base.coupling = coupling_for_cooperativity(0.98 * mech.instability_coop, t.base.gamma_m, t.base.kappa);
    REQUIRE(tmm::is_stable(t));
    const auto gn = tmm::resonant_point(t);
    CHECK(gn.noise == doctest::Approx(mech.n_eff + 0.5).epsilon(0.10));
    CHECK(gn.gain > 100.0);
  }
}

TEST_CASE("cancellation case stays stable at large coupling") {
  SystemParams base;
  base.kappa = 1.0;
  base.gamma_m = 10.0;
  base.omega_m = 50.0;
  base.detuning = 50.0;
  for (double g : {0.5, 1.0, 2.0, 5.0}) {
    const auto t = tmm::cancellation_params(base.with_coupling(g));
    CHECK(t.kappa2 == base.kappa);
    CHECK(t.coupling2 == g);
    CHECK(tmm::is_stable(t));
    CHECK(tmm::max_real_part(t) < 0.0);
  }
  ThreeModeParams off = tmm::cancellation_params(base.with_coupling(1.0));
  off.coupling2 = 0.5;
  const auto grid = linspace(-55.0, -45.0, 11);
  CHECK_THROWS_AS(tmm::cancellation_case(grid, off), ConfigError);
  CHECK_NOTHROW(tmm::cancellation_case(grid, tmm::cancellation_params(base.with_coupling(1.0))));
}

TEST_CASE("two-mode spectra are sized to the grid") {
  auto t = fig3b_params(0.2);
  t.base.coupling = coupling_for_cooperativity(2.0, t.base.gamma_m, t.base.kappa);
  const auto grid = linspace(-51.0, -49.0, 101);
  const auto s = tmm::two_mode_gain_noise(grid, t);
  CHECK(s.gain.size() == 101);
  CHECK(s.noise.size() == 101);
  for (std::size_t i = 0; i < 101; ++i) CHECK(s.noise.values[i].real() >= 0.0);
}
