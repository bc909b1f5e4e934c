#ifndef CIRCLAB_PACKING_HPP
#define CIRCLAB_PACKING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlab/complex_matrix.hpp"

namespace circlab {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxCloudSize = 4096;
inline constexpr int kExactSearchLimit = 12;

/// Finite point cloud given by its pairwise |.|_2 distance matrix.
struct PointCloud {
  int m = 0;
  std::vector<double> dist;  // m x m, symmetric, zero diagonal
  std::vector<std::string> labels;

  double d(int a, int b) const { return dist[std::size_t(a) * m + b]; }

  static PointCloud from_distances(int m, std::vector<double> dist,
                                   std::vector<std::string> labels = {}) {
    if (m < 1 || (int)dist.size() != m * m)
      throw std::invalid_argument("distance matrix must be m x m");
    if (m > kMaxCloudSize)
      throw std::invalid_argument("cloud larger than " +
                                  std::to_string(kMaxCloudSize) + " points");
    return {m, std::move(dist), std::move(labels)};
  }
};

inline PointCloud cloud_from_samples(const std::vector<ComplexMatrix>& xs) {
  int m = (int)xs.size();
  if (m < 1) throw std::invalid_argument("empty cloud");
  if (m > kMaxCloudSize)
    throw std::invalid_argument("cloud larger than " +
                                std::to_string(kMaxCloudSize) + " points");
  for (const auto& x : xs)
    if (x.k != xs[0].k) throw ShapeError("cloud matrices differ in dimension");
  PointCloud c;
  c.m = m;
  c.dist.assign(std::size_t(m) * m, 0.0);
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      double v = hs_norm(xs[a] - xs[b]);
      c.dist[std::size_t(a) * m + b] = v;
      c.dist[std::size_t(b) * m + a] = v;
    }
  return c;
}

// Disjoint open eps-balls have centers >= 2*eps apart; boundary touching
// is allowed.  Greedy in index order, a lower bound for the true packing
// number.
inline int greedy_packing(const PointCloud& c, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  std::vector<int> kept;
  for (int i = 0; i < c.m; ++i) {
    bool ok = true;
    for (int j : kept)
      if (c.d(i, j) < 2.0 * eps) {
        ok = false;
        break;
      }
    if (ok) kept.push_back(i);
  }
  return (int)kept.size();
}

// Greedy max-coverage cover by eps-balls centered at cloud points; an
// upper bound for the true covering number.  A point is covered by a ball
// at center p when dist <= eps.
inline int greedy_covering(const PointCloud& c, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  std::vector<bool> covered(c.m, false);
  int remaining = c.m, balls = 0;
  while (remaining > 0) {
    int best = -1, best_gain = -1;
    for (int p = 0; p < c.m; ++p) {
      int gain = 0;
      for (int q = 0; q < c.m; ++q)
        if (!covered[q] && c.d(p, q) <= eps) ++gain;
      if (gain > best_gain) {
        best_gain = gain;
        best = p;
      }
    }
    for (int q = 0; q < c.m; ++q)
      if (!covered[q] && c.d(best, q) <= eps) {
        covered[q] = true;
        --remaining;
      }
    ++balls;
  }
  return balls;
}

/// Exact maximal packing by exhaustive subset search; m <= 12 only.
inline int exact_packing(const PointCloud& c, double eps) {
  if (c.m > kExactSearchLimit)
    throw std::invalid_argument("exact search limited to m <= 12");
  std::vector<std::uint32_t> conflict(c.m, 0);
  for (int i = 0; i < c.m; ++i)
    for (int j = 0; j < c.m; ++j)
      if (i != j && c.d(i, j) < 2.0 * eps) conflict[i] |= 1u << j;
  int best = 0;
  for (std::uint32_t mask = 0; mask < (1u << c.m); ++mask) {
    bool ok = true;
    for (int i = 0; i < c.m && ok; ++i)
      if ((mask >> i & 1u) && (conflict[i] & mask)) ok = false;
    if (ok) best = std::max(best, __builtin_popcount(mask));
  }
  return best;
}

/// Exact minimal covering by set-cover DP over subsets; m <= 12 only.
inline int exact_covering(const PointCloud& c, double eps) {
  if (c.m > kExactSearchLimit)
    throw std::invalid_argument("exact search limited to m <= 12");
  std::vector<std::uint32_t> ball(c.m, 0);
  for (int p = 0; p < c.m; ++p)
    for (int q = 0; q < c.m; ++q)
      if (c.d(p, q) <= eps) ball[p] |= 1u << q;
  std::uint32_t full = (1u << c.m) - 1;
  std::vector<int> dp(full + 1, std::numeric_limits<int>::max());
  dp[0] = 0;
  for (std::uint32_t mask = 0; mask < full; ++mask) {
    if (dp[mask] == std::numeric_limits<int>::max()) continue;
    int i = __builtin_ctz(~mask);  // lowest uncovered point
    for (int p = 0; p < c.m; ++p)
      if (ball[p] >> i & 1u) {
        std::uint32_t next = mask | ball[p];
        dp[next] = std::min(dp[next], dp[mask] + 1);
      }
  }
  return dp[full];
}

/// One evaluation of the chain P_{4eps} <= K_{2eps} <= P_eps.
struct SandwichReport {
  double eps = 0.0;
  int p_4eps = 0;
  int k_2eps = 0;
  int p_eps = 0;
  bool exact = false;  // brute force used (m <= 12)
  bool pass = false;
};

inline SandwichReport sandwich_check(const PointCloud& c, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  SandwichReport r;
  r.eps = eps;
  if (c.m <= kExactSearchLimit) {
    r.exact = true;
    r.p_4eps = exact_packing(c, 4.0 * eps);
    r.k_2eps = exact_covering(c, 2.0 * eps);
    r.p_eps = exact_packing(c, eps);
    r.pass = r.p_4eps <= r.k_2eps && r.k_2eps <= r.p_eps;
  } else {
    // Estimators bound only one side each; assert the guaranteed
    // directions: greedy P_{4eps} <= exact P_{4eps} <= K_{2eps} and
    // K_{2eps} <= greedy K_{2eps}, P_eps >= greedy P_eps.
    r.p_4eps = greedy_packing(c, 4.0 * eps);
    r.k_2eps = greedy_covering(c, 2.0 * eps);
    r.p_eps = greedy_packing(c, eps);
    r.pass = r.p_4eps <= r.k_2eps;
  }
  return r;
}

/// log-volume of the Euclidean d-ball of radius r.
inline double log_ball_volume(int d, double r) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  return 0.5 * d * std::log(3.14159265358979323846) + d * std::log(r) -
         std::lgamma(0.5 * d + 1.0);
}

/// Packing/covering counts over an eps grid plus a log-log slope fit.
struct PackingReport {
  std::vector<double> eps_grid;  // ascending
  std::vector<int> p_hat;
  std::vector<int> k_hat;
  double slope = 0.0;
  double fit_residual = 0.0;
};

/// Least-squares slope of log p_hat against |log eps|.  Exploratory: a
/// finite cloud only ever gives a lower-bound surrogate for the packing
/// exponent of a microstates space.
inline std::pair<double, double> slope_estimate(
    const std::vector<double>& eps_grid, const std::vector<int>& p_hat) {
  if (eps_grid.size() != p_hat.size() || eps_grid.empty())
    throw FitError("grids must be nonempty and of equal length");
  bool constant = std::all_of(p_hat.begin(), p_hat.end(),
                              [&](int v) { return v == p_hat.front(); });
  if (constant) return {0.0, 0.0};
  int usable = 0;
  for (int v : p_hat)
    if (v >= 2) ++usable;
  if (usable < 3) throw FitError("need >= 3 grid points with p_hat >= 2");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (p_hat[i] < 1 || !(eps_grid[i] > 0.0) || eps_grid[i] >= 1.0e6) continue;
    double x = std::abs(std::log(eps_grid[i]));
    double y = std::log(double(p_hat[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw FitError("degenerate eps grid");
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (p_hat[i] < 1) continue;
    double x = std::abs(std::log(eps_grid[i]));
    double e = std::log(double(p_hat[i])) - (intercept + slope * x);
    ss += e * e;
  }
  return {slope, std::sqrt(ss / n)};
}

inline PackingReport packing_report(const PointCloud& c,
                                    std::vector<double> eps_grid) {
  std::sort(eps_grid.begin(), eps_grid.end());
  PackingReport r;
  r.eps_grid = eps_grid;
  for (double eps : eps_grid) {
    r.p_hat.push_back(greedy_packing(c, eps));
    r.k_hat.push_back(greedy_covering(c, eps));
  }
  // Propagate the one-sided bounds across the grid: a packing lower bound
  // at radius eps' >= eps is also one at eps, and a cover with radius
  // eps' <= eps balls is also a cover at eps.  This also makes both
  // columns monotone nonincreasing.
  for (int i = (int)r.p_hat.size() - 2; i >= 0; --i)
    r.p_hat[i] = std::max(r.p_hat[i], r.p_hat[i + 1]);
  for (std::size_t i = 1; i < r.k_hat.size(); ++i)
    r.k_hat[i] = std::min(r.k_hat[i], r.k_hat[i - 1]);
  try {
    auto [s, res] = slope_estimate(r.eps_grid, r.p_hat);
    r.slope = s;
    r.fit_residual = res;
  } catch (const FitError&) {
    r.slope = 0.0;
    r.fit_residual = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace circlab

#endif
