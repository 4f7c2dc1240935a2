#include <doctest.h>

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <complex>
#include <random>

#include "rdr/errors.hpp"
#include "rdr/linear_response.hpp"
#include "rdr/selftest.hpp"
#include "rdr/spectrum.hpp"

using namespace rdr;
namespace lr = rdr::linear_response;
using cplx = std::complex<double>;

namespace {

const cplx I{0.0, 1.0};

// Test-side model: Langevin equations for (a, a^dag, b, b^dag), written out
// directly and solved with Eigen. a_out = a_in - sqrt(kappa) a.
Eigen::Matrix4cd oracle_u(double w, const SystemParams& p) {
  const double k = p.kappa, g = p.gamma_m, G = p.coupling, D = p.detuning, W = p.omega_m;
  Eigen::Matrix4cd m;
  m << I * D - k / 2, 0, I * G, I * G,
       0, -I * D - k / 2, -I * G, -I * G,
       I * G, I * G, -I * W - g / 2, 0,
       -I * G, -I * G, 0, I * W - g / 2;
  Eigen::Matrix4cd l = Eigen::Matrix4cd::Zero();
  l.diagonal() << std::sqrt(k), std::sqrt(k), std::sqrt(g), std::sqrt(g);
  // -i w u = M u + L u_in  =>  u = -(M + i w)^-1 L u_in
  const Eigen::Matrix4cd sys = m + I * w * Eigen::Matrix4cd::Identity();
  const Eigen::Matrix4cd resp = -sys.inverse() * l;
  return Eigen::Matrix4cd::Identity() - l * resp;
}

cplx oracle_chi_m(double w, const SystemParams& p) { return 1.0 / (p.gamma_m / 2 - I * (w - p.omega_m)); }

cplx oracle_sigma(double w, const SystemParams& p) {
  return -I * p.coupling * p.coupling * (oracle_chi_m(w, p) - std::conj(oracle_chi_m(-w, p)));
}

double oracle_kappa_om(const SystemParams& p) { return -2.0 * oracle_sigma(-p.detuning, p).imag(); }

SystemParams fig2_params(double delta) {
  SystemParams p;
  p.kappa = 1.0;
  p.gamma_m = 1000.0;
  p.omega_m = 1e4;
  p.coupling = 10.0;
  p.detuning = delta;
  return p;
}

SystemParams fig3a_params(double c) {
  SystemParams p;
  p.kappa = 1.0;
  p.gamma_m = 10.0;
  p.omega_m = 50.0;
  p.detuning = 50.0;
  p.coupling = coupling_for_cooperativity(c, p.gamma_m, p.kappa);
  return p;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("susceptibilities and self-energy match the test-side formulas") {
  const auto p = fig3a_params(0.6);
  for (double w : {-70.0, -50.0, -3.0, 0.0, 12.5, 50.0}) {
    CHECK(std::abs(lr::chi_m(w, p) - oracle_chi_m(w, p)) < 1e-14);
    CHECK(std::abs(lr::chi_r(w, p) - 1.0 / (p.kappa / 2 - I * (w + p.detuning))) < 1e-14);
    CHECK(rel(lr::self_energy(w, p), oracle_sigma(w, p)) < 1e-13);
  }
}

TEST_CASE("self-energy and denominator are conjugate-symmetric") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 20; ++i) {
    const auto p = selftest::random_stable_params(rng);
    const double w = u(rng);
    const cplx s = lr::self_energy(w, p), sm = lr::self_energy(-w, p);
    CHECK(std::abs(s - std::conj(sm)) <= 1e-12 * std::max(1.0, std::abs(s)));
    const cplx n = lr::response_denominator(w, p), nm = lr::response_denominator(-w, p);
    CHECK(std::abs(n - std::conj(nm)) <= 1e-12 * std::max(1.0, std::abs(n)));
  }
}

TEST_CASE("backaction at the standard curve parameters") {
  const auto blue = lr::backaction(fig2_params(1e4));
  CHECK(blue.kappa_om == doctest::Approx(-0.4).epsilon(0.01));
  CHECK(blue.kappa_om == doctest::Approx(oracle_kappa_om(fig2_params(1e4))).epsilon(1e-12));
  CHECK(blue.kappa_eff == doctest::Approx(1.0 + blue.kappa_om));

  const auto red = lr::backaction(fig2_params(-1e4));
  CHECK(red.kappa_om > 0.0);
  CHECK(blue.kappa_om < 0.0);
}

TEST_CASE("backaction antisymmetry in the detuning") {
  for (double d : {0.0, 123.0, 5e3, 1e4, 1.7e4, 3e4}) {
    const double plus = lr::backaction(fig2_params(d)).kappa_om;
    const double minus = lr::backaction(fig2_params(-d)).kappa_om;
    CHECK(std::abs(plus + minus) <= 1e-12 * std::max(1e-300, std::abs(plus)));
  }
}

TEST_CASE("backaction: Lorentzian form, golden-rule rates and zero coupling") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 30; ++i) {
    auto p = selftest::random_stable_params(rng);
    const auto ba = lr::backaction(p);
    CHECK(lr::kappa_om_lorentzian(p) == doctest::Approx(ba.kappa_om).epsilon(1e-10));
    CHECK(lr::delta_om_lorentzian(p) == doctest::Approx(ba.delta_om).epsilon(1e-10));
    for (double nth : {0.0, 3.0, 40.0}) {
      p.n_th = nth;
      const auto r = lr::transition_rates(p);
      CHECK(r.gamma_down - r.gamma_up == doctest::Approx(ba.kappa_om).epsilon(1e-10));
    }
  }
  const auto z = lr::backaction(fig2_params(1e4).with_coupling(0.0));
  CHECK(z.kappa_om == 0.0);
  CHECK(z.delta_om == 0.0);
}

TEST_CASE("closed-form coefficients match an Eigen-inverted scattering matrix") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double worst = 0.0;
  for (int set = 0; set < 50; ++set) {
    const auto p = selftest::random_stable_params(rng);
    for (int k = 0; k < 100; ++k) {
      const double w = u(rng) * 1.5 * p.omega_m;
      const auto o = oracle_u(w, p);
      const auto row = lr::scattering_coeffs(w, p);
      worst = std::max({worst, rel(row.a_coef, o(0, 0)), rel(row.b_coef, o(0, 1)), rel(row.c_coef, o(0, 2)),
                        rel(row.d_coef, o(0, 3))});
      const auto lib = lr::scattering_matrix(w, p);
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) worst = std::max(worst, rel(lib(r, c), o(r, c)));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("output commutator is preserved wherever the system is stable") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int set = 0; set < 30; ++set) {
    const auto p = selftest::random_stable_params(rng);
    REQUIRE(lr::is_stable(p));
    for (int k = 0; k < 50; ++k) {
      const double w = u(rng) * p.omega_m;
      CHECK(std::abs(lr::scattering_coeffs(w, p).commutator() - 1.0) <= 1e-8);
      CHECK(std::abs(lr::first_row(lr::scattering_matrix(w, p)).commutator() - 1.0) <= 1e-8);
    }
  }
}

TEST_CASE("a sign-flipped self-energy breaks the commutator") {
  const auto p = fig3a_params(0.5);
  const double w = lr::resonance_frequency(p);
  const auto bad = lr::scattering_coeffs_with_sigma(w, p, selftest::corrupted_sigma(w, p));
  CHECK(std::abs(bad.commutator() - 1.0) > 1e-3);
}

TEST_CASE("resolved-sideband gain formula") {
  CHECK(lr::rwa_gain(0.8) == doctest::Approx(81.0).epsilon(1e-12));
  CHECK(lr::rwa_gain(0.0) == doctest::Approx(1.0));
  double prev = 0.0;
  for (double c = 0.0; c < 1.0; c += 0.01) {
    const double g = lr::rwa_gain(c);
    CHECK(g > prev);
    prev = g;
  }
  CHECK(lr::rwa_gain(0.999999) > 1e12);
  CHECK(std::isinf(lr::rwa_gain(1.0)));
}

TEST_CASE("resolved-sideband noise formula: quantum limit at C = 1") {
  CHECK(lr::rwa_added_noise(1.0, 0.0) == 0.5);
  CHECK(lr::rwa_added_noise(1.0, 10.0) == doctest::Approx(10.5));
  CHECK(lr::rwa_added_noise(0.0, 10.0) == 0.0);
}

TEST_CASE("full model gain on resonance is close to the resolved-sideband value") {
  for (double c : {0.3, 0.5, 0.8}) {
    const double g = lr::resonant_gain(fig3a_params(c));
    CHECK(g == doctest::Approx(lr::rwa_gain(c)).epsilon(0.05));
  }
}

TEST_CASE("gain-bandwidth product of the weak-coupling form") {
  for (double c : {0.5, 0.8}) {
    const auto p = fig3a_params(c);
    const auto ba = lr::backaction(p);
    auto f = [&](double ds) { return lr::weak_coupling_gain(ds, p, ba).value_or(lr::kGainCap); };
    const auto m = lr::measure_peak(f, lr::resonance_frequency(p), 5.0);
    CHECK(m.peak == doctest::Approx(lr::rwa_gain(c)).epsilon(0.05));
    CHECK(m.gain_bandwidth() == doctest::Approx(p.kappa).epsilon(0.15));
  }
}

TEST_CASE("measure_peak on a Lorentzian") {
  auto f = [](double x) { return 4.0 / (1.0 + (x - 2.0) * (x - 2.0) / 0.09); };
  const auto m = lr::measure_peak(f, 1.9, 2.0);
  CHECK(m.center == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.peak == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(m.hwhm == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(m.gain_bandwidth() == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("added noise approaches the quantum limit at C = 1 in the resolved-sideband limit") {
  SystemParams p;
  p.kappa = 1.0;
  p.gamma_m = 10.0;
  p.omega_m = 2000.0;
  p.detuning = 2000.0;
  p.coupling = coupling_for_cooperativity(0.5, p.gamma_m, p.kappa);
  const double w = lr::resonance_frequency(p);
  CHECK(lr::added_noise(p, w, 0.0) == doctest::Approx(lr::rwa_added_noise(0.5, 0.0)).epsilon(0.02));
  CHECK(lr::added_noise(p, w, 10.0) == doctest::Approx(lr::rwa_added_noise(0.5, 10.0)).epsilon(0.02));
}

TEST_CASE("gain spectrum sizes and pole flags") {
  const auto p = fig3a_params(0.5);
  const auto grid = linspace(-60.0, -40.0, 201);
  const auto s = lr::gain_spectrum(grid, p);
  CHECK(s.weak.size() == 201);
  CHECK(s.exact.size() == 201);
  CHECK(s.at_pole.size() == 201);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(s.exact.values[i].real() >= 0.0);
}

TEST_CASE("stability boundary of the one-mode amplifier sits at C = 1 in the resolved-sideband limit") {
  auto p = fig3a_params(0.98);
  CHECK(lr::is_stable(p));
  p = fig3a_params(1.02);
  CHECK_FALSE(lr::is_stable(p));
}

TEST_CASE("a 1e4-point backaction sweep is fast") {
  const auto grid = linspace(-2e4, 2e4, 10000);
  const auto t0 = std::chrono::steady_clock::now();
  double acc = 0.0;
  for (double d : grid) acc += lr::backaction(fig2_params(d)).kappa_om;
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(std::isfinite(acc));
  CHECK(s < 1.0);
}
