#include "rdr/numkernel/stability.hpp"

#include <algorithm>
#include <cmath>

#include "rdr/errors.hpp"

namespace rdr::numkernel {

std::vector<cplx> characteristic_polynomial(const ComplexMatrix& m) {
  if (!m.square()) throw BadLength("characteristic_polynomial needs a square matrix");
  const std::size_t n = m.rows();
  // Faddeev-LeVerrier.
  std::vector<cplx> c(n + 1);
  c[0] = 1.0;
  ComplexMatrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    ComplexMatrix next = m * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[k - 1];
    mk = std::move(next);
    const ComplexMatrix amk = m * mk;
    cplx tr{};
    for (std::size_t i = 0; i < n; ++i) tr += amk(i, i);
    c[k] = -tr / static_cast<double>(k);
  }
  return c;
}

bool is_hurwitz(const std::vector<double>& coeffs) {
  std::vector<double> a = coeffs;
  while (!a.empty() && a.front() == 0.0) a.erase(a.begin());
  if (a.size() <= 1) return !a.empty();
  if (a.front() < 0.0)
    for (double& x : a) x = -x;

  const std::size_t n = a.size() - 1;
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  // Necessary condition, and it catches the zero-coefficient cases cheaply.
  for (double x : a)
    if (!(x > 1e-300)) return false;

  std::vector<double> r0, r1;
  for (std::size_t i = 0; i <= n; i += 2) r0.push_back(a[i]);
  for (std::size_t i = 1; i <= n; i += 2) r1.push_back(a[i]);
  r1.resize(r0.size(), 0.0);

  for (std::size_t row = 1; row <= n; ++row) {
    const double head = r1.front();
    double row_scale = 0.0;
    for (double x : r0) row_scale = std::max(row_scale, std::abs(x));
    if (!(head > 1e-14 * row_scale)) return false;
    std::vector<double> r2(r0.size(), 0.0);
    for (std::size_t j = 0; j + 1 < r0.size(); ++j)
      r2[j] = (head * r0[j + 1] - r0.front() * r1[j + 1]) / head;
    r0 = std::move(r1);
    r1 = std::move(r2);
  }
  return true;
}

std::vector<double> taylor_shift(const std::vector<double>& coeffs, double shift) {
  // Repeated synthetic division by (s - shift).
  std::vector<double> a = coeffs;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 1; j < n - i; ++j) a[j] += shift * a[j - 1];
  return a;
}

namespace {

struct ScaledPoly {
  std::vector<double> coeffs;
  double scale = 1.0;
};

ScaledPoly real_scaled_charpoly(const ComplexMatrix& m) {
  const double s = m.max_abs();
  ScaledPoly out;
  out.scale = s > 0.0 ? s : 1.0;
  const auto c = characteristic_polynomial(m * cplx(1.0 / out.scale));
  out.coeffs.reserve(c.size());
  for (const auto& z : c) out.coeffs.push_back(z.real());
  return out;
}

}  // namespace

bool is_stable(const ComplexMatrix& m) { return is_hurwitz(real_scaled_charpoly(m).coeffs); }

double max_real_part(const ComplexMatrix& m) {
  const auto poly = real_scaled_charpoly(m);
  // Gershgorin bound on the scaled matrix.
  const ComplexMatrix scaled = m * cplx(1.0 / poly.scale);
  double radius = 0.0;
  for (std::size_t i = 0; i < scaled.rows(); ++i) {
    double row = 0.0;
    for (const auto& z : scaled.row(i)) row += std::abs(z);
    radius = std::max(radius, row);
  }
  double lo = -radius - 1e-12;  // p(s + lo) not Hurwitz only if some Re(lambda) >= lo: always true
  double hi = radius + 1e-12;   // every Re(lambda) < hi
  for (int it = 0; it < 200 && hi - lo > 1e-15 * radius; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (is_hurwitz(taylor_shift(poly.coeffs, mid)))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi) * poly.scale;
}

}  // namespace rdr::numkernel
