#include "rdr/numkernel/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rdr::numkernel {

double cubic_eval(double c3, double c2, double c1, double c0, double x) {
  return ((c3 * x + c2) * x + c1) * x + c0;
}

namespace {

std::vector<double> quadratic_roots(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  const double scale = std::max({b * b, std::abs(4.0 * a * c)});
  if (std::abs(disc) <= 1e-14 * scale) {
    const double r = -b / (2.0 * a);
    return {r, r};
  }
  if (disc < 0.0) return {};
  // Stable form avoids cancellation between -b and sqrt(disc).
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  std::vector<double> r{q / a, q != 0.0 ? c / q : 0.0};
  std::sort(r.begin(), r.end());
  return r;
}

double polish(double c3, double c2, double c1, double c0, double x) {
  for (int it = 0; it < 8; ++it) {
    const double f = cubic_eval(c3, c2, c1, c0, x);
    const double df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
    if (df == 0.0 || !std::isfinite(f)) break;
    const double step = f / df;
    const double next = x - step;
    // Keep the better of the two iterates; stops oscillation at round-off level.
    if (std::abs(cubic_eval(c3, c2, c1, c0, next)) >= std::abs(f)) break;
    x = next;
  }
  return x;
}

}  // namespace

std::vector<double> cubic_real_roots(double c3, double c2, double c1, double c0) {
  if (c3 == 0.0) return quadratic_roots(c2, c1, c0);

  // Depressed cubic t^3 + p t + q with x = t - b/3.
  const double b = c2 / c3, c = c1 / c3, d = c0 / c3;
  const double shift = b / 3.0;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;

  const double hq = 0.5 * q;
  const double tp = p / 3.0;
  const double disc = hq * hq + tp * tp * tp;
  const double disc_scale = std::max(hq * hq, std::abs(tp * tp * tp));

  std::vector<double> roots;
  if (disc_scale == 0.0) {
    roots = {-shift, -shift, -shift};  // triple root
  } else if (std::abs(disc) <= 1e-12 * disc_scale) {
    // One simple and one double root.
    const double simple = polish(c3, c2, c1, c0, 3.0 * q / p - shift);
    // The double root is a simple root of p'(x); polish it there.
    double dbl = -1.5 * q / p - shift;
    for (int it = 0; it < 8; ++it) {
      const double dp = (3.0 * c3 * dbl + 2.0 * c2) * dbl + c1;
      const double ddp = 6.0 * c3 * dbl + 2.0 * c2;
      if (ddp == 0.0) break;
      dbl -= dp / ddp;
    }
    roots = {simple, dbl, dbl};
    std::sort(roots.begin(), roots.end());
    return roots;
  } else if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double t = std::cbrt(-hq + s) + std::cbrt(-hq - s);
    roots = {t - shift};
  } else {
    const double r = std::sqrt(-tp);
    const double phi = std::acos(std::clamp(-hq / (r * r * r), -1.0, 1.0));
    for (int k = 0; k < 3; ++k)
      roots.push_back(2.0 * r * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0) - shift);
  }

  if (roots.size() == 1 || roots[0] != roots[1])
    for (double& x : roots) x = polish(c3, c2, c1, c0, x);
  std::sort(roots.begin(), roots.end());
  return roots;
}

}  // namespace rdr::numkernel
