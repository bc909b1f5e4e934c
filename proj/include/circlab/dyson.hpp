#ifndef CIRCLAB_DYSON_HPP
#define CIRCLAB_DYSON_HPP

#include <cmath>
#include <limits>
#include <stdexcept>

#include "circlab/complex_matrix.hpp"
#include "circlab/samplers.hpp"
#include "circlab/spectra.hpp"

namespace circlab {

// Dyson's measure on upper-triangular matrices has density
// C_k * prod_{p<q} |a_pp - a_qq|^2 with C_k = pi^{k(k+1)/2} / prod_j j!.
// Everything here is kept in log scale; C_k overflows doubles near k = 30.

/// log C_k, via log-gamma.
inline double dyson_log_c(int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  double s = 0.5 * double(k) * (k + 1) * std::log(3.14159265358979323846);
  for (int j = 1; j <= k; ++j) s -= std::lgamma(double(j) + 1.0);
  return s;
}

struct DysonLogDensity {
  double log_c = 0.0;
  double interaction = 0.0;  // 2 * sum_{p<q} log|a_pp - a_qq|
  bool finite = true;        // false iff two diagonal entries coincide
  double total = 0.0;        // log_c + interaction when finite
};

inline DysonLogDensity dyson_log_density(const ComplexMatrix& t) {
  for (int r = 1; r < t.k; ++r)
    for (int c = 0; c < r; ++c)
      if (std::abs(t(r, c)) > 1e-12)
        throw ShapeError("matrix is not upper triangular");
  DysonLogDensity d;
  d.log_c = dyson_log_c(t.k);
  for (int p = 0; p < t.k; ++p)
    for (int q = p + 1; q < t.k; ++q) {
      double gap = std::abs(t(p, p) - t(q, q));
      if (gap == 0.0) {
        d.finite = false;
        d.interaction = -std::numeric_limits<double>::infinity();
        d.total = -std::numeric_limits<double>::infinity();
        return d;
      }
      d.interaction += 2.0 * std::log(gap);
    }
  d.total = d.log_c + d.interaction;
  return d;
}

/// Triangular representative of the unitarily invariant Ginibre law: the
/// Schur T-factor of a Ginibre(1/k) sample.  Its diagonal is the Ginibre
/// eigenvalue ensemble.
inline ComplexMatrix dyson_sample(int k, const SampleConfig& cfg) {
  SampleConfig c = cfg;
  c.k = k;
  return schur(ginibre(c)).t;
}

}  // namespace circlab

#endif
