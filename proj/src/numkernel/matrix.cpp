#include "rdr/numkernel/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rdr/errors.hpp"

namespace rdr::numkernel {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw BadLength("matrix data length " + std::to_string(data_.size()) + " != " +
                    std::to_string(rows_) + "x" + std::to_string(cols_));
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw BadLength("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::column(std::span<const cplx> values) {
  return ComplexMatrix(values.size(), 1, std::vector<cplx>(values.begin(), values.end()));
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw BadLength("shape mismatch in +");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw BadLength("shape mismatch in -");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw BadLength("shape mismatch in *");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

namespace {

struct LuFactors {
  ComplexMatrix lu;
  std::vector<std::size_t> perm;
};

LuFactors lu_decompose(const ComplexMatrix& m) {
  const std::size_t n = m.rows();
  LuFactors f{m, std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

  const double tiny = kSingularTol * m.max_abs();
  auto& a = f.lu;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double v = std::abs(a(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (!(best > tiny))
      throw SingularMatrix("pivot " + std::to_string(best) + " below tolerance in column " +
                           std::to_string(k));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx factor = a(i, k) / a(k, k);
      a(i, k) = factor;
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= factor * a(k, j);
    }
  }
  return f;
}

ComplexMatrix lu_solve(const LuFactors& f, const ComplexMatrix& rhs) {
  const std::size_t n = f.lu.rows();
  const auto& a = f.lu;
  ComplexMatrix x(n, rhs.cols());
  for (std::size_t c = 0; c < rhs.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = rhs(f.perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= a(i, j) * x(j, c);
      x(i, c) = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      cplx s = x(i, c);
      for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x(j, c);
      x(i, c) = s / a(i, i);
    }
  }
  return x;
}

}  // namespace

ComplexMatrix solve_linear(const ComplexMatrix& m, const ComplexMatrix& rhs) {
  if (!m.square()) throw BadLength("solve_linear needs a square matrix");
  if (rhs.rows() != m.rows()) throw BadLength("solve_linear: rhs row count mismatch");
  const auto f = lu_decompose(m);
  auto x = lu_solve(f, rhs);
  // one refinement step
  x += lu_solve(f, rhs - m * x);
  return x;
}

double relative_residual(const ComplexMatrix& m, const ComplexMatrix& x, const ComplexMatrix& rhs) {
  const ComplexMatrix r = m * x - rhs;
  const double denom = rhs.max_abs();
  return denom > 0.0 ? r.max_abs() / denom : r.max_abs();
}

}  // namespace rdr::numkernel
