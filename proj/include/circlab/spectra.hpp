#ifndef CIRCLAB_SPECTRA_HPP
#define CIRCLAB_SPECTRA_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "circlab/complex_matrix.hpp"

namespace circlab {

struct NumericalFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unitary Schur triangularization X = Q T Q*.
struct SchurForm {
  ComplexMatrix q;
  ComplexMatrix t;
  double residual = 0.0;  // ||X - QTQ*||_F / max(1, ||X||_F)
};

namespace detail {
inline Eigen::MatrixXcd to_eigen(const ComplexMatrix& x) {
  Eigen::MatrixXcd m(x.k, x.k);
  for (int r = 0; r < x.k; ++r)
    for (int c = 0; c < x.k; ++c) m(r, c) = x(r, c);
  return m;
}
inline ComplexMatrix from_eigen(const Eigen::MatrixXcd& m) {
  ComplexMatrix x((int)m.rows());
  for (int r = 0; r < x.k; ++r)
    for (int c = 0; c < x.k; ++c) x(r, c) = m(r, c);
  return x;
}
}  // namespace detail

inline SchurForm schur(const ComplexMatrix& x) {
  if (!x.all_finite())
    throw std::invalid_argument("matrix has non-finite entries");
  // Already upper triangular: T = X, Q = I, residual 0.
  bool triangular = true;
  for (int r = 1; r < x.k && triangular; ++r)
    for (int c = 0; c < r; ++c)
      if (x(r, c) != 0.0) {
        triangular = false;
        break;
      }
  if (triangular) return {ComplexMatrix::identity(x.k), x, 0.0};
  Eigen::MatrixXcd m = detail::to_eigen(x);
  Eigen::ComplexSchur<Eigen::MatrixXcd> dec(m);
  if (dec.info() != Eigen::Success)
    throw NumericalFailure("Schur iteration did not converge (norm=" +
                           std::to_string(m.norm()) + ", k=" +
                           std::to_string(x.k) + ")");
  const Eigen::MatrixXcd& q = dec.matrixU();
  const Eigen::MatrixXcd& t = dec.matrixT();
  double denom = std::max(1.0, m.norm());
  double res = (m - q * t * q.adjoint()).norm() / denom;
  return {detail::from_eigen(q), detail::from_eigen(t), res};
}

/// Eigenvalue list plus sorted moduli for one sampled matrix.
struct SpectralSample {
  std::vector<cplx> eigenvalues;
  std::vector<double> radii_sorted;
};

inline SpectralSample eigenvalues(const ComplexMatrix& x) {
  SchurForm s = schur(x);
  SpectralSample out;
  out.eigenvalues.reserve(x.k);
  for (int i = 0; i < x.k; ++i) out.eigenvalues.push_back(s.t(i, i));
  out.radii_sorted.reserve(x.k);
  for (const cplx& z : out.eigenvalues)
    out.radii_sorted.push_back(std::abs(z));
  std::sort(out.radii_sorted.begin(), out.radii_sorted.end());
  return out;
}

/// r_{eps,c} = c * log(1 + eps^-2)^{-1/2}.
inline double disk_radius(double eps, double c) {
  if (!(eps > 0.0) || !(c > 0.0))
    throw std::invalid_argument("eps and c must be positive");
  return c / std::sqrt(std::log1p(1.0 / (eps * eps)));
}

/// Kolmogorov-Smirnov distance between the empirical radial CDF and the
/// uniform-disk law F(r) = min(1, (r/r_max)^2).
inline double ks_uniform_disk(const SpectralSample& sample, double r_max) {
  if (!(r_max > 0.0)) throw std::invalid_argument("r_max must be positive");
  const auto& r = sample.radii_sorted;
  int k = (int)r.size();
  if (k == 0) throw std::invalid_argument("empty sample");
  double ks = 0.0;
  for (int i = 0; i < k; ++i) {
    double f = std::min(1.0, (r[i] / r_max) * (r[i] / r_max));
    ks = std::max(ks, std::abs(double(i + 1) / k - f));
    ks = std::max(ks, std::abs(f - double(i) / k));
  }
  return ks;
}

inline double spectral_radius(const SpectralSample& sample) {
  return sample.radii_sorted.empty() ? 0.0 : sample.radii_sorted.back();
}

/// Chi-square statistic of the eigenvalue angles against uniformity over
/// equal sectors; diagnostic companion to the radial KS test.
inline double angular_chi_square(const SpectralSample& sample,
                                 int sectors = 16) {
  if (sectors < 2) throw std::invalid_argument("need at least 2 sectors");
  std::vector<int> counts(sectors, 0);
  int used = 0;
  for (const cplx& z : sample.eigenvalues) {
    if (std::abs(z) == 0.0) continue;
    double a = std::arg(z);  // (-pi, pi]
    int s = std::min(sectors - 1,
                     (int)((a + 3.14159265358979323846) /
                           (2.0 * 3.14159265358979323846) * sectors));
    ++counts[s];
    ++used;
  }
  if (used == 0) return 0.0;
  double expect = double(used) / sectors;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
  return chi2;
}

}  // namespace circlab

#endif
