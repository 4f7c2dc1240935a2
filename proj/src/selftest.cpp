#include "rdr/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rdr/io.hpp"
#include "rdr/linear_response.hpp"
#include "rdr/three_mode.hpp"

namespace rdr::selftest {

namespace lr = linear_response;
using cplx = std::complex<double>;

namespace {

class Check {
 public:
  Check(std::string name, double tol) : r_{std::move(name), true, 0.0, tol, 0} {}
  void observe(double deviation) {
    ++r_.samples;
    if (!(deviation <= r_.worst)) r_.worst = std::isnan(deviation) ? INFINITY : std::max(r_.worst, deviation);
  }
  CheckResult done() {
    r_.pass = r_.samples > 0 && r_.worst <= r_.tolerance;
    return r_;
  }

 private:
  CheckResult r_;
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

std::vector<double> probe_frequencies(std::mt19937_64& rng, const SystemParams& p, std::size_t n) {
  const double span = 1.5 * std::max(p.omega_m, std::abs(p.detuning)) + 2.0 * p.kappa;
  std::vector<double> w(n);
  for (auto& x : w) x = uniform(rng, -span, span);
  return w;
}

double row_distance(const lr::ScatteringRow& a, const lr::ScatteringRow& b) {
  const double diff = std::max({std::abs(a.a_coef - b.a_coef), std::abs(a.b_coef - b.b_coef),
                                std::abs(a.c_coef - b.c_coef), std::abs(a.d_coef - b.d_coef)});
  const double scale = std::max({std::abs(b.a_coef), std::abs(b.b_coef), std::abs(b.c_coef), std::abs(b.d_coef)});
  return diff / scale;
}

}  // namespace

SystemParams random_stable_params(std::mt19937_64& rng) {
  for (;;) {
    SystemParams p;
    p.kappa = 1.0;
    p.gamma_m = log_uniform(rng, 0.05, 20.0);
    p.omega_m = uniform(rng, 2.0, 60.0);
    p.detuning = (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0) * p.omega_m * uniform(rng, 0.5, 1.5);
    p.coupling = coupling_for_cooperativity(uniform(rng, 0.0, 0.9), p.gamma_m, p.kappa);
    p.n_th = uniform(rng, 0.0, 20.0);
    if (lr::is_stable(p)) return p;
  }
}

ThreeModeParams random_stable_three_mode(std::mt19937_64& rng) {
  for (;;) {
    ThreeModeParams t;
    t.base.kappa = 1.0;
    t.base.gamma_m = log_uniform(rng, 0.01, 10.0);
    t.base.omega_m = uniform(rng, 10.0, 60.0);
    t.base.detuning = t.base.omega_m * uniform(rng, 0.8, 1.2);
    t.base.coupling = coupling_for_cooperativity(uniform(rng, 0.0, 2.0), t.base.gamma_m, t.base.kappa);
    t.base.n_th = uniform(rng, 0.0, 20.0);
    t.kappa2 = uniform(rng, 1.0, 10.0);
    t.coupling2 = uniform(rng, 0.0, 0.3) * t.kappa2;
    t.detuning2 = -t.base.omega_m * uniform(rng, 0.8, 1.2);
    if (three_mode::is_stable(t)) return t;
  }
}

cplx corrupted_sigma(double omega, const SystemParams& p) { return -lr::self_energy(omega, p); }

Report run(const Options& opt) {
  std::mt19937_64 rng(opt.seed);
  auto sigma = [&](double w, const SystemParams& p) { return opt.sigma ? opt.sigma(w, p) : lr::self_energy(w, p); };

  Check oracle("oracle_equivalence_4x4", 1e-9);
  Check closed_comm("commutator_closed_form", 1e-8);
  Check rows4("commutator_4x4_rows", 1e-8);
  Check sym("self_energy_conjugate_symmetry", 1e-12);
  Check anti("backaction_antisymmetry", 1e-12);
  Check routes("kappa_om_two_routes", 1e-10);

  for (std::size_t s = 0; s < opt.param_sets; ++s) {
    const SystemParams p = random_stable_params(rng);
    for (double w : probe_frequencies(rng, p, opt.frequencies)) {
      const auto closed = lr::scattering_coeffs_with_sigma(w, p, sigma(w, p));
      const auto u = lr::scattering_matrix(w, p);
      oracle.observe(row_distance(closed, lr::first_row(u)));
      closed_comm.observe(std::abs(closed.commutator() - 1.0));
      for (std::size_t r = 0; r < 4; ++r)
        rows4.observe(std::abs(three_mode::row_commutator(u, r) - (r % 2 == 0 ? 1.0 : -1.0)));
      const cplx s1 = sigma(w, p);
      const cplx s2 = std::conj(sigma(-w, p));
      sym.observe(std::abs(s1 - s2) / std::max(std::abs(s1), p.coupling * p.coupling / p.kappa + 1e-300));
    }
    const double k_plus = lr::backaction(p).kappa_om;
    const double k_minus = lr::backaction(p.with_detuning(-p.detuning)).kappa_om;
    anti.observe(std::abs(k_plus + k_minus) / (std::abs(k_plus) + p.kappa));
    routes.observe(std::abs(k_plus - lr::kappa_om_lorentzian(p)) / (std::abs(k_plus) + p.kappa));
  }

  Check rows6("commutator_6x6_rows", 1e-8);
  Check reduce("three_mode_reduction_g2_zero", 1e-10);
  const std::size_t sets6 = std::max<std::size_t>(1, opt.param_sets / 2);
  for (std::size_t s = 0; s < sets6; ++s) {
    const ThreeModeParams t = random_stable_three_mode(rng);
    ThreeModeParams t0 = t;
    t0.coupling2 = 0.0;
    for (double w : probe_frequencies(rng, t.base, opt.frequencies / 2)) {
      const auto u = three_mode::scattering_matrix_6(w, t);
      for (std::size_t r = 0; r < 6; ++r)
        rows6.observe(std::abs(three_mode::row_commutator(u, r) - (r % 2 == 0 ? 1.0 : -1.0)));

      const auto u6 = three_mode::scattering_matrix_6(w, t0);
      const auto u4 = lr::scattering_matrix(w, t0.base);
      static constexpr std::size_t map[4] = {0, 1, 4, 5};
      double diff = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
          diff = std::max(diff, std::abs(u6(map[i], map[j]) - u4(i, j)));
          scale = std::max(scale, std::abs(u4(i, j)));
        }
      reduce.observe(diff / scale);
    }
  }

  Report rep;
  for (Check* c : {&oracle, &closed_comm, &rows4, &rows6, &reduce, &sym, &anti, &routes})
    rep.checks.push_back(c->done());
  return rep;
}

bool Report::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::vector<std::string> Report::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.pass) out.push_back(c.name);
  return out;
}

nlohmann::json Report::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& c : checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"tolerance", c.tolerance},
                   {"samples", c.samples}});
  return {{"passed", all_passed()}, {"checks", arr}};
}

std::string Report::text() const {
  std::ostringstream os;
  for (const auto& c : checks)
    os << (c.pass ? "PASS " : "FAIL ") << c.name << "  worst=" << format_double(c.worst)
       << " tol=" << format_double(c.tolerance) << " n=" << c.samples << '\n';
  os << (all_passed() ? "selftest passed" : "selftest FAILED") << '\n';
  return os.str();
}

}  // namespace rdr::selftest
