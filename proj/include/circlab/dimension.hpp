#ifndef CIRCLAB_DIMENSION_HPP
#define CIRCLAB_DIMENSION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlab/grid_kernel.hpp"
#include "circlab/packing.hpp"
#include "circlab/samplers.hpp"

namespace circlab {

// Regularized log-integral ratio
//   int_0^1 log(max(f(t),eps)) dt / |log eps|,
// exact for step functions; tends to measure(supp f) - 1 as eps -> 0.
inline double prop1_ratio(const StepFunction& f, double eps) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw std::invalid_argument("eps must lie in (0,1)");
  for (double v : f.values)
    if (v < 0.0) throw std::invalid_argument("f must be nonnegative");
  double s = 0.0;
  for (double v : f.values) s += std::log(std::max(v, eps));
  return (s / f.n) / std::abs(std::log(eps));
}

struct Prop1Report {
  std::vector<double> eps_grid;  // decreasing
  std::vector<double> ratios;
  double limit_target = 0.0;  // measure(supp f) - 1
  double final_error_bound = 0.0;
  bool within_bound = false;
};

inline Prop1Report prop1_limit_check(const StepFunction& f,
                                     std::vector<double> eps_grid) {
  Prop1Report r;
  std::sort(eps_grid.begin(), eps_grid.end(), std::greater<>());
  r.eps_grid = eps_grid;
  int support_intervals = 0;
  double log_sum = 0.0;  // sum over positive values of |log v_i| / n
  for (double v : f.values)
    if (v > 0.0) {
      ++support_intervals;
      log_sum += std::abs(std::log(v)) / f.n;
    }
  r.limit_target = double(support_intervals) / f.n - 1.0;
  for (double eps : eps_grid) r.ratios.push_back(prop1_ratio(f, eps));
  double eps_min = eps_grid.back();
  // For a step function with eps below every positive value the ratio is
  // exactly target + (1/|log eps|) * (1/n) sum_{v_i>0} log v_i.
  r.final_error_bound = log_sum / std::abs(std::log(eps_min));
  r.within_bound =
      std::abs(r.ratios.back() - r.limit_target) <= r.final_error_bound + 1e-15;
  return r;
}

/// area(K_N) = (N-1)/(2N).
inline double kn_area(int N) {
  if (N < 2) throw std::invalid_argument("N must be >= 2");
  return double(N - 1) / (2.0 * N);
}

struct DimensionBounds {
  std::optional<double> lower;
  double upper = 0.0;
  HypothesisReport hypothesis;
  // (N, 1 + 2*area(supp(H) ∩ K_N)) for each N >= 2 dividing the grid
  // order; nondecreasing in N for upper-triangular supports, with limit
  // equal to the lower bound.
  std::vector<std::pair<int, double>> kn_series;
};

inline DimensionBounds dimension_bounds(const GridKernel& k) {
  DimensionBounds b;
  b.hypothesis = theorem_main_hypothesis(k);
  b.lower = delta0_lower(k);
  b.upper = delta0_upper(k);
  for (int N = 2; N <= k.n(); ++N)
    if (k.n() % N == 0)
      b.kn_series.emplace_back(N, 1.0 + 2.0 * support_area_in_kn(k, N));
  return b;
}

struct DimensionExperimentConfig {
  std::vector<int> k_list;
  int trials = 0;
  std::vector<double> eps_grid;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct DimensionExperimentReport {
  std::string kernel_id;
  DimensionExperimentConfig config;
  DimensionBounds bounds;
  std::vector<std::pair<int, PackingReport>> per_k;  // ordered by k
};

/// Draws `trials` weighted samples per k, builds the pairwise-distance
/// cloud and its packing report, and attaches the exact bound formulas.
/// Deterministic for a fixed seed: each trial's randomness is a pure
/// function of (seed, trial index).
inline DimensionExperimentReport dimension_experiment(
    const GridKernel& kern, const DimensionExperimentConfig& cfg,
    std::string kernel_id = "") {
  if (cfg.trials < 1 || cfg.trials > kMaxCloudSize)
    throw std::invalid_argument("trials must lie in [1, 4096]");
  if (cfg.k_list.empty()) throw std::invalid_argument("empty k list");
  if (cfg.eps_grid.empty()) throw std::invalid_argument("empty eps grid");
  DimensionExperimentReport rep;
  rep.kernel_id = std::move(kernel_id);
  rep.config = cfg;
  rep.bounds = dimension_bounds(kern);
  for (int k : cfg.k_list) {
    std::vector<ComplexMatrix> samples;
    samples.reserve(cfg.trials);
    for (int t = 0; t < cfg.trials; ++t)
      samples.push_back(
          weighted_sample(kern, SampleConfig{k, cfg.seed, std::uint64_t(t)}));
    PointCloud cloud = cloud_from_samples(samples);
    rep.per_k.emplace_back(k, packing_report(cloud, cfg.eps_grid));
  }
  return rep;
}

}  // namespace circlab

#endif
