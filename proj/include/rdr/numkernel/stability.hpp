#pragma once

#include <vector>

#include "rdr/numkernel/matrix.hpp"

namespace rdr::numkernel {

/// Coefficients of det(s I - m), highest power first (leading 1).
std::vector<cplx> characteristic_polynomial(const ComplexMatrix& m);

/// Routh-Hurwitz test on a real polynomial given highest power first.
/// True iff every root has strictly negative real part.
bool is_hurwitz(const std::vector<double>& coeffs);

/// Coefficients of q(s) = p(s + shift), highest power first.
std::vector<double> taylor_shift(const std::vector<double>& coeffs, double shift);

/// True iff all eigenvalues of m have negative real part.
/// m must have a real characteristic polynomial, which holds for every drift
/// matrix written in (a, a^dagger, ...) pairs.
bool is_stable(const ComplexMatrix& m);

/// Largest real part among the eigenvalues of m, located by bisection on the
/// shift sigma at which p(s + sigma) stops being Hurwitz. No eigensolver involved.
double max_real_part(const ComplexMatrix& m);

}  // namespace rdr::numkernel
