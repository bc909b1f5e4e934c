#ifndef CIRCLAB_SAMPLERS_HPP
#define CIRCLAB_SAMPLERS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "circlab/complex_matrix.hpp"
#include "circlab/grid_kernel.hpp"
#include "circlab/rng.hpp"

namespace circlab {

// Stream tags keep the samplers' substreams disjoint for a given
// (seed, trial).
namespace stream_tag {
inline constexpr std::uint64_t ginibre = 1;
inline constexpr std::uint64_t dt = 2;
inline constexpr std::uint64_t weighted = 3;
inline constexpr std::uint64_t lifted_diag = 4;
inline constexpr std::uint64_t perturbation = 5;
inline constexpr std::uint64_t lifted_off = 16;  // + i*N + j
}  // namespace stream_tag

struct SampleConfig {
  int k = 1;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

/// Entries i.i.d. complex Gaussian, mean 0, variance 1/k.
inline ComplexMatrix ginibre(const SampleConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("dimension must be >= 1");
  GaussianStream g(cfg.seed, cfg.trial, stream_tag::ginibre);
  ComplexMatrix x(cfg.k);
  double var = 1.0 / cfg.k;
  for (auto& e : x.entries) e = g.complex_gaussian(var);
  return x;
}

/// Strictly upper-triangular, entries above the diagonal i.i.d. complex
/// Gaussian variance 1/k.  Nilpotent by construction.
inline ComplexMatrix dt_sample(const SampleConfig& cfg) {
  if (cfg.k < 1) throw std::invalid_argument("dimension must be >= 1");
  GaussianStream g(cfg.seed, cfg.trial, stream_tag::dt);
  ComplexMatrix x(cfg.k);
  double var = 1.0 / cfg.k;
  for (int r = 0; r < cfg.k; ++r)
    for (int c = r + 1; c < cfg.k; ++c) x(r, c) = g.complex_gaussian(var);
  return x;
}

/// Diagonal microstate for D: entries (2i-1)/(2k), the interval midpoints.
inline ComplexMatrix d_microstate(int k) {
  ComplexMatrix x(k);
  for (int i = 0; i < k; ++i) x(i, i) = (2.0 * i + 1.0) / (2.0 * k);
  return x;
}

/// Kernel-weighted Gaussian model: block (i,j) of size b = k/n carries
/// i.i.d. entries of variance value/k on the cell's support pattern.
inline ComplexMatrix weighted_sample(const GridKernel& kern,
                                     const SampleConfig& cfg) {
  int n = kern.n();
  if (cfg.k < 1) throw std::invalid_argument("dimension must be >= 1");
  if (cfg.k % n != 0)
    throw ShapeError("matrix dimension not divisible by grid order");
  int b = cfg.k / n;
  GaussianStream g(cfg.seed, cfg.trial, stream_tag::weighted);
  ComplexMatrix x(cfg.k);
  double base_var = 1.0 / cfg.k;
  for (int r = 0; r < cfg.k; ++r)
    for (int c = 0; c < cfg.k; ++c) {
      // One draw per position regardless of mask, so the stream layout
      // does not depend on the kernel.
      cplx z = g.complex_gaussian(base_var);
      const Cell& cell = kern.at(r / b, c / b);
      bool on = cell.fill == CellFill::Full ||
                (cell.fill == CellFill::UpperTri && r % b < c % b);
      if (on) x(r, c) = std::sqrt(cell.value) * z;
    }
  return x;
}

/// Block lift: the same DT sample of size k/N on every diagonal N-block,
/// independent Ginibre blocks scaled by c[i][j] off the diagonal, the
/// whole matrix scaled by 1/sqrt(N).  `independent_diagonals` replaces the
/// shared DT sample with independent copies (sensitivity studies only).
inline ComplexMatrix lifted_sample(int N, int p,
                                   const std::vector<std::vector<double>>& c,
                                   const SampleConfig& cfg,
                                   bool independent_diagonals = false) {
  if (N < 2) throw std::invalid_argument("block count must be >= 2");
  if (p < 1) throw std::invalid_argument("sub-block count must be >= 1");
  if ((int)c.size() != N)
    throw std::invalid_argument("weight matrix must be N x N");
  for (int i = 0; i < N; ++i) {
    if ((int)c[i].size() != N)
      throw std::invalid_argument("weight matrix must be N x N");
    if (c[i][i] != 0.0)
      throw std::invalid_argument("weight matrix must have zero diagonal");
  }
  if (cfg.k % (N * p) != 0)
    throw ShapeError("matrix dimension not divisible by N*p");
  int inner = cfg.k / N;
  double scale = 1.0 / std::sqrt(double(N));

  ComplexMatrix x(cfg.k);
  SampleConfig sub{inner, cfg.seed, cfg.trial};
  ComplexMatrix shared_dt(1);
  if (!independent_diagonals) {
    GaussianStream g(cfg.seed, cfg.trial, stream_tag::lifted_diag);
    shared_dt = ComplexMatrix(inner);
    double var = 1.0 / inner;
    for (int r = 0; r < inner; ++r)
      for (int cc = r + 1; cc < inner; ++cc)
        shared_dt(r, cc) = g.complex_gaussian(var);
  }
  for (int bi = 0; bi < N; ++bi)
    for (int bj = 0; bj < N; ++bj) {
      if (bi == bj) {
        const ComplexMatrix* blk = &shared_dt;
        ComplexMatrix own(1);
        if (independent_diagonals) {
          GaussianStream g(cfg.seed, cfg.trial, stream_tag::lifted_diag + bi);
          own = ComplexMatrix(inner);
          double var = 1.0 / inner;
          for (int r = 0; r < inner; ++r)
            for (int cc = r + 1; cc < inner; ++cc)
              own(r, cc) = g.complex_gaussian(var);
          blk = &own;
        }
        for (int r = 0; r < inner; ++r)
          for (int cc = 0; cc < inner; ++cc)
            x(bi * inner + r, bj * inner + cc) = scale * (*blk)(r, cc);
      } else if (c[bi][bj] > 0.0) {
        GaussianStream g(cfg.seed, cfg.trial,
                         stream_tag::lifted_off + std::uint64_t(bi) * N + bj);
        double var = 1.0 / inner;
        double w = scale * c[bi][bj];
        for (int r = 0; r < inner; ++r)
          for (int cc = 0; cc < inner; ++cc)
            x(bi * inner + r, bj * inner + cc) = w * g.complex_gaussian(var);
      }
    }
  return x;
}

/// z = c * (y_k + eps * w_k) with y_k a DT sample and w_k an independent
/// Ginibre sample; the matrix model whose spectral measure approaches the
/// uniform disk of radius c * log(1 + eps^-2)^{-1/2}.
inline ComplexMatrix perturbed_dt(const SampleConfig& cfg, double eps,
                                  double c) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  ComplexMatrix y = dt_sample(cfg);
  GaussianStream g(cfg.seed, cfg.trial, stream_tag::perturbation);
  double var = 1.0 / cfg.k;
  for (int r = 0; r < cfg.k; ++r)
    for (int cc = 0; cc < cfg.k; ++cc)
      y(r, cc) = c * (y(r, cc) + eps * g.complex_gaussian(var));
  return y;
}

/// Empirical kernel estimate: H_hat[i][j] = (n^2/k) * sum over block (i,j)
/// of |x_ab|^2.  For the weighted model the expectation is the cell value
/// on Full cells and value*(b-1)/(2b) on UpperTri cells.
inline std::vector<std::vector<double>> kernel_recovery(const ComplexMatrix& x,
                                                        int n) {
  if (n < 1) throw std::invalid_argument("grid order must be >= 1");
  if (x.k % n != 0)
    throw ShapeError("matrix dimension not divisible by grid order");
  int b = x.k / n;
  std::vector<std::vector<double>> h(n, std::vector<double>(n, 0.0));
  for (int r = 0; r < x.k; ++r)
    for (int c = 0; c < x.k; ++c) h[r / b][c / b] += std::norm(x(r, c));
  double scale = double(n) * n / x.k;
  for (auto& row : h)
    for (double& v : row) v *= scale;
  return h;
}

}  // namespace circlab

#endif
