#ifndef CIRCLAB_COMPLEX_MATRIX_HPP
#define CIRCLAB_COMPLEX_MATRIX_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace circlab {

using cplx = std::complex<double>;

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Dense k x k complex matrix, row-major.
struct ComplexMatrix {
  int k = 0;
  std::vector<cplx> entries;

  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim) : k(dim), entries(std::size_t(dim) * dim) {
    if (dim < 1) throw std::invalid_argument("matrix dimension must be >= 1");
  }

  cplx& operator()(int r, int c) { return entries[std::size_t(r) * k + c]; }
  const cplx& operator()(int r, int c) const {
    return entries[std::size_t(r) * k + c];
  }

  static ComplexMatrix identity(int dim) {
    ComplexMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    if (o.k != k) throw std::invalid_argument("dimension mismatch");
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] += o.entries[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    if (o.k != k) throw std::invalid_argument("dimension mismatch");
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i] -= o.entries[i];
    return *this;
  }
  ComplexMatrix& operator*=(cplx s) {
    for (auto& e : entries) e *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) {
    a *= s;
    return a;
  }

  bool all_finite() const {
    for (const auto& e : entries)
      if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) return false;
    return true;
  }
};

/// |A|_2 = tr_k(A*A)^{1/2}, the normalized Hilbert-Schmidt norm.
inline double hs_norm(const ComplexMatrix& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += std::norm(e);
  return std::sqrt(s / x.k);
}

inline cplx trace(const ComplexMatrix& x) {
  cplx t = 0.0;
  for (int i = 0; i < x.k; ++i) t += x(i, i);
  return t;
}

/// tr_k(X*X) = (1/k) sum |x_ab|^2.
inline double normalized_gram_trace(const ComplexMatrix& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += std::norm(e);
  return s / x.k;
}

}  // namespace circlab

#endif
