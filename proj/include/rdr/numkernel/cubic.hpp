#pragma once

#include <vector>

namespace rdr::numkernel {

/// All real roots of c3 x^3 + c2 x^2 + c1 x + c0, ascending, repeated by multiplicity.
/// Leading zero coefficients reduce the degree; the zero polynomial has no roots.
/// Each root is Newton-polished to |p(x)| <= 1e-12 max|c_i| (1 + |x|^3) where possible.
std::vector<double> cubic_real_roots(double c3, double c2, double c1, double c0);

/// p(x) by Horner.
double cubic_eval(double c3, double c2, double c1, double c0, double x);

}  // namespace rdr::numkernel
