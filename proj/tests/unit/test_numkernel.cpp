#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "rdr/errors.hpp"
#include "rdr/numkernel/cubic.hpp"
#include "rdr/numkernel/fft.hpp"
#include "rdr/numkernel/matrix.hpp"
#include "rdr/numkernel/rk4.hpp"
#include "rdr/numkernel/stability.hpp"

using namespace rdr::numkernel;
using rdr::BadLength;
using rdr::SingularMatrix;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t n, bool real_only = false) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = {g(rng), real_only ? 0.0 : g(rng)};
  return m;
}

Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

}  // namespace

TEST_CASE("solve_linear residual on random systems up to 8x8") {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      auto m = random_matrix(rng, n);
      for (std::size_t i = 0; i < n; ++i) m(i, i) += static_cast<double>(n);  // well conditioned
      const auto rhs = random_matrix(rng, n);
      const auto x = solve_linear(m, rhs);
      CHECK(relative_residual(m, x, rhs) <= 1e-10);

      const Eigen::MatrixXcd ex = to_eigen(m).partialPivLu().solve(to_eigen(rhs));
      double worst = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) worst = std::max(worst, std::abs(x(r, c) - ex(r, c)));
      CHECK(worst <= 1e-10 * (1.0 + ex.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("solve_linear rejects singular matrices") {
  ComplexMatrix m{{1.0, 2.0}, {2.0, 4.0}};
  CHECK_THROWS_AS(solve_linear(m, ComplexMatrix::identity(2)), SingularMatrix);
}

TEST_CASE("matrix algebra basics") {
  ComplexMatrix a{{1.0, 2.0}, {3.0, 4.0}};
  const auto i2 = ComplexMatrix::identity(2);
  const auto p = a * i2;
  CHECK(p(1, 0) == cplx(3.0));
  const auto s = a + a - a;
  CHECK(s(0, 1) == cplx(2.0));
  CHECK(a.max_abs() == 4.0);
}

TEST_CASE("FFT agrees with a direct DFT") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const std::size_t n = 64;
  std::vector<cplx> x(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  auto y = x;
  fft_inplace(y);
  for (std::size_t k = 0; k < n; ++k) {
    cplx direct = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      direct += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * j) / double(n));
    CHECK(std::abs(y[k] - direct) <= 1e-10 * n);
  }
}

TEST_CASE("FFT length checks") {
  std::vector<cplx> x(12);
  CHECK_THROWS_AS(fft_inplace(x), BadLength);
  CHECK(is_power_of_two(1024));
  CHECK_FALSE(is_power_of_two(0));
  CHECK(floor_power_of_two(1000) == 512);
  CHECK(floor_power_of_two(0) == 0);
}

TEST_CASE("power spectrum satisfies Parseval with a rectangular window") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (std::size_t n : {64u, 1024u, 8192u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng) + 0.3;
    const double dt = 0.037;
    const auto ps = power_spectrum(x, dt, Window::Rect);
    double lhs = 0.0;
    for (double v : x) lhs += v * v * dt;
    double rhs = 0.0;
    for (double p : ps.power) rhs += p;
    rhs *= ps.d_omega / (2.0 * std::numbers::pi);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * lhs);
  }
}

TEST_CASE("power spectrum locates a pure tone and a DC offset") {
  const std::size_t n = 1024;
  const double dt = 0.1;
  const double d_omega = 2.0 * std::numbers::pi / (n * dt);
  const std::size_t bin = 37;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(bin * d_omega * i * dt);
  for (auto w : {Window::Rect, Window::Hann}) {
    const auto ps = power_spectrum(x, dt, w);
    CHECK(ps.d_omega == doctest::Approx(d_omega));
    CHECK(ps.omegas.size() == n / 2 + 1);
    const auto peak = std::max_element(ps.power.begin(), ps.power.end()) - ps.power.begin();
    CHECK(static_cast<std::size_t>(peak) == bin);
  }
  std::vector<double> dc(n, 2.0);
  const auto ps = power_spectrum(dc, dt, Window::Rect);
  CHECK(ps.power[0] > 0.0);
  for (std::size_t k = 1; k < ps.power.size(); ++k) CHECK(ps.power[k] <= 1e-20 * ps.power[0]);
}

TEST_CASE("cubic roots agree with a sign-change scan") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double r1 = u(rng), r2 = u(rng), r3 = u(rng);
    const double a = 0.5 + std::abs(u(rng));
    const double c2 = -a * (r1 + r2 + r3), c1 = a * (r1 * r2 + r1 * r3 + r2 * r3), c0 = -a * r1 * r2 * r3;
    const auto roots = cubic_real_roots(a, c2, c1, c0);
    REQUIRE(roots.size() == 3);
    std::vector<double> want{r1, r2, r3};
    std::sort(want.begin(), want.end());
    for (int k = 0; k < 3; ++k) CHECK(roots[k] == doctest::Approx(want[k]).epsilon(1e-5));

    // Independent count: sign changes on a fine grid.
    int changes = 0;
    double prev = cubic_eval(a, c2, c1, c0, -4.0);
    for (int i = 1; i <= 80000; ++i) {
      const double v = cubic_eval(a, c2, c1, c0, -4.0 + i * 1e-4);
      if ((prev < 0) != (v < 0)) ++changes;
      prev = v;
    }
    if (std::abs(r1 - r2) > 1e-3 && std::abs(r1 - r3) > 1e-3 && std::abs(r2 - r3) > 1e-3) CHECK(changes == 3);
  }
  CHECK(cubic_real_roots(1.0, 0.0, 1.0, 1.0).size() == 1);
  CHECK(cubic_real_roots(0.0, 1.0, -3.0, 2.0) == std::vector<double>{1.0, 2.0});
  CHECK(cubic_real_roots(0.0, 0.0, 0.0, 0.0).empty());
}

TEST_CASE("stability agrees with Eigen eigenvalues") {
  std::mt19937_64 rng(21);
  int stable_count = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + trial % 5;
    auto m = random_matrix(rng, n, true);
    for (std::size_t i = 0; i < n; ++i) m(i, i) -= 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(to_eigen(m));
    const double want = es.eigenvalues().real().maxCoeff();
    if (std::abs(want) < 1e-6) continue;
    CHECK(is_stable(m) == (want < 0.0));
    CHECK(max_real_part(m) == doctest::Approx(want).epsilon(1e-6).scale(1.0));
    stable_count += want < 0.0;
  }
  CHECK(stable_count > 10);
}

TEST_CASE("Hurwitz test and Taylor shift") {
  CHECK(is_hurwitz({1.0, 3.0, 2.0}));    // roots -1, -2
  CHECK_FALSE(is_hurwitz({1.0, -1.0, -2.0}));  // roots 2, -1
  CHECK_FALSE(is_hurwitz({1.0, 0.0, 1.0}));    // roots +-i
  const auto q = taylor_shift({1.0, 3.0, 2.0}, 1.5);  // roots -2.5, -3.5
  REQUIRE(q.size() == 3);
  CHECK(q[1] == doctest::Approx(6.0));
  CHECK(q[2] == doctest::Approx(8.75));
  const auto cp = characteristic_polynomial(ComplexMatrix{{2.0, 0.0}, {0.0, 3.0}});
  CHECK(std::abs(cp[1] - cplx(-5.0)) < 1e-14);
  CHECK(std::abs(cp[2] - cplx(6.0)) < 1e-14);
}

TEST_CASE("RK4 converges at fourth order on dy/dt = -y") {
  auto deriv = [](double, const State<1>& y) { return State<1>{-y[0]}; };
  auto error_at = [&](double dt) {
    const auto r = rk4_integrate<1>(deriv, State<1>{1.0}, 0.0, 2.0, dt);
    return std::abs(r.series[0].samples.back() - std::exp(-2.0));
  };
  for (double dt : {0.2, 0.1, 0.05}) {
    const double ratio = error_at(dt) / error_at(dt / 2);
    CHECK(ratio >= 12.0);
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.1));
  }
}

TEST_CASE("RK4 stride, stop predicate and non-finite detection") {
  auto decay = [](double, const State<1>& y) { return State<1>{-y[0]}; };
  const auto r = rk4_integrate<1>(decay, State<1>{1.0}, 0.0, 1.0, 0.01, 10);
  CHECK(r.series[0].size() == 11);
  CHECK(r.series[0].dt == doctest::Approx(0.1));
  CHECK(r.status == IntegrationStatus::Completed);

  auto stop = [](const State<1>& y) { return std::abs(y[0]) < 0.5; };
  const auto s = rk4_integrate<1>(decay, State<1>{1.0}, 0.0, 10.0, 0.01, 1, stop);
  CHECK(s.status == IntegrationStatus::Stopped);
  CHECK(s.steps < 100);

  auto blow = [](double, const State<1>& y) { return State<1>{y[0] * y[0]}; };
  const auto b = rk4_integrate<1>(blow, State<1>{1.0}, 0.0, 5.0, 0.01);
  CHECK(b.status == IntegrationStatus::NonFinite);

  CHECK_THROWS_AS(rk4_integrate<1>(decay, State<1>{1.0}, 0.0, 1.0, 0.0), rdr::ConfigError);
  CHECK_THROWS_AS(rk4_integrate<1>(decay, State<1>{1.0}, 1.0, 0.0, 0.1), rdr::RangeError);
}
