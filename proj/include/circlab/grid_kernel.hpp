#ifndef CIRCLAB_GRID_KERNEL_HPP
#define CIRCLAB_GRID_KERNEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace circlab {

// Exact piecewise description of a nonnegative kernel H on [0,1]^2 over a
// regular n x n grid.  Cell (i,j), 0-based, occupies
// [i/n,(i+1)/n] x [j/n,(j+1)/n]; the first index follows the first
// coordinate s, the second follows t.  UpperTri means the open upper
// triangle {(s,t) in the cell : s - s0 < t - t0}; the boundary convention
// is fixed here once and is irrelevant to all integrals.

enum class CellFill : std::uint8_t { Empty, Full, UpperTri };

struct Cell {
  CellFill fill = CellFill::Empty;
  double value = 0.0;
};

struct RefinementError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct UnsupportedRegionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

class GridKernel {
 public:
  explicit GridKernel(int n) : n_(n), cells_(std::size_t(n) * n) {
    if (n < 1) throw std::invalid_argument("grid order must be >= 1");
  }

  int n() const { return n_; }
  const Cell& at(int i, int j) const { return cells_[std::size_t(i) * n_ + j]; }

  void set(int i, int j, CellFill fill, double value) {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
      throw std::invalid_argument("cell index out of range");
    if (!std::isfinite(value) || value < 0.0)
      throw std::invalid_argument("cell value must be finite and >= 0");
    if (fill == CellFill::Empty || value == 0.0)
      cells_[std::size_t(i) * n_ + j] = Cell{};
    else
      cells_[std::size_t(i) * n_ + j] = Cell{fill, value};
  }

  /// Same function at grid order 2n.  Full/Empty cells split into four
  /// alike; an UpperTri cell splits into two UpperTri, one Full and one
  /// Empty sub-cell.
  GridKernel refine() const {
    GridKernel out(2 * n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        const Cell& c = at(i, j);
        if (c.fill == CellFill::Empty) continue;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            CellFill f = c.fill;
            if (c.fill == CellFill::UpperTri) {
              if (a < b)
                f = CellFill::Full;
              else if (a > b)
                f = CellFill::Empty;
            }
            if (f != CellFill::Empty) out.set(2 * i + a, 2 * j + b, f, c.value);
          }
      }
    return out;
  }

 private:
  int n_;
  std::vector<Cell> cells_;
};

// -------- builders --------

inline GridKernel build_constant(int n, double c) {
  if (!std::isfinite(c) || c < 0.0)
    throw std::invalid_argument("constant kernel value must be finite, >= 0");
  GridKernel k(n);
  if (c > 0.0)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) k.set(i, j, CellFill::Full, c);
  return k;
}

/// The indicator of the upper triangle {s < t}, represented exactly.
inline GridKernel build_upper_triangle(int n) {
  GridKernel k(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i < j)
        k.set(i, j, CellFill::Full, 1.0);
      else if (i == j)
        k.set(i, j, CellFill::UpperTri, 1.0);
    }
  return k;
}

/// r disjoint triangles along the diagonal, each of height 1/r, value c.
inline GridKernel build_diagonal_triangles(int r, double c) {
  if (r < 1) throw std::invalid_argument("triangle count must be >= 1");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("triangle value must be positive and finite");
  GridKernel k(r);
  for (int i = 0; i < r; ++i) k.set(i, i, CellFill::UpperTri, c);
  return k;
}

/// Band above the diagonal of width w cells (alpha = w/n), value c.
inline GridKernel build_band(int n, int w, double c) {
  if (w < 1 || w > n) throw std::invalid_argument("band width outside [1,n]");
  if (!(c > 0.0) || !std::isfinite(c))
    throw std::invalid_argument("band value must be positive and finite");
  GridKernel k(n);
  for (int i = 0; i < n; ++i) {
    k.set(i, i, CellFill::UpperTri, c);
    for (int j = i + 1; j < std::min(n, i + w); ++j)
      k.set(i, j, CellFill::Full, c);
  }
  return k;
}

/// Continuum area of the band {0 <= x < y < min(1, x+alpha)}, for
/// comparison with the grid discretization.
inline double band_area_continuum(double alpha) {
  return alpha - alpha * alpha / 2.0;
}

/// Block-lifted kernel: N diagonal blocks each carrying the upper-triangle
/// pattern with value 1, off-diagonal block (i,j) filled constant c[i][j]^2
/// over its p x p sub-cells.
inline GridKernel build_lifted(int N, int p,
                               const std::vector<std::vector<double>>& c) {
  if (N < 2) throw std::invalid_argument("block count must be >= 2");
  if (p < 1) throw std::invalid_argument("sub-block count must be >= 1");
  if ((int)c.size() != N)
    throw std::invalid_argument("weight matrix must be N x N");
  for (int i = 0; i < N; ++i) {
    if ((int)c[i].size() != N)
      throw std::invalid_argument("weight matrix must be N x N");
    if (c[i][i] != 0.0)
      throw std::invalid_argument("weight matrix must have zero diagonal");
    for (double v : c[i])
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("weights must be finite and >= 0");
  }
  GridKernel k(N * p);
  for (int bi = 0; bi < N; ++bi)
    for (int bj = 0; bj < N; ++bj) {
      if (bi == bj) {
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b) {
            if (a < b)
              k.set(bi * p + a, bj * p + b, CellFill::Full, 1.0);
            else if (a == b)
              k.set(bi * p + a, bj * p + b, CellFill::UpperTri, 1.0);
          }
      } else if (c[bi][bj] > 0.0) {
        double v = c[bi][bj] * c[bi][bj];
        for (int a = 0; a < p; ++a)
          for (int b = 0; b < p; ++b)
            k.set(bi * p + a, bj * p + b, CellFill::Full, v);
      }
    }
  return k;
}

// -------- exact geometry --------

inline double support_area(const GridKernel& k) {
  // Exact: count cells in integers, divide once.
  std::int64_t twice_cells = 0;  // in units of 1/(2n^2)
  for (int i = 0; i < k.n(); ++i)
    for (int j = 0; j < k.n(); ++j) {
      const Cell& c = k.at(i, j);
      if (c.fill == CellFill::Full)
        twice_cells += 2;
      else if (c.fill == CellFill::UpperTri)
        twice_cells += 1;
    }
  return double(twice_cells) / (2.0 * k.n() * k.n());
}

inline double l1_mass(const GridKernel& k) {
  double s = 0.0;
  for (int i = 0; i < k.n(); ++i)
    for (int j = 0; j < k.n(); ++j) {
      const Cell& c = k.at(i, j);
      if (c.fill == CellFill::Full)
        s += c.value;
      else if (c.fill == CellFill::UpperTri)
        s += c.value / 2.0;
    }
  return s / (double(k.n()) * k.n());
}

// Coordinate expectations CE1(H)(x) = int H(x,y) dy and
// CE2(H)(y) = int H(x,y) dx are affine within each grid strip, so their
// suprema are attained at strip boundaries: for CE1 the triangle
// contribution is largest at the left edge of the strip, for CE2 at the
// right edge, where each UpperTri cell contributes its full width.
inline std::pair<double, double> ce_sup(const GridKernel& k) {
  int n = k.n();
  double sup1 = 0.0, sup2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < n; ++j) {
      const Cell& rc = k.at(i, j);
      if (rc.fill != CellFill::Empty) row += rc.value;
      const Cell& cc = k.at(j, i);
      if (cc.fill != CellFill::Empty) col += cc.value;
    }
    sup1 = std::max(sup1, row / n);
    sup2 = std::max(sup2, col / n);
  }
  return {sup1, sup2};
}

/// Piecewise-constant function on [0,1]: value[i] on [i/n,(i+1)/n).
struct StepFunction {
  int n = 1;
  std::vector<double> values;

  StepFunction() : values{0.0} {}
  StepFunction(int intervals, std::vector<double> v)
      : n(intervals), values(std::move(v)) {
    if (n < 1 || (int)values.size() != n)
      throw std::invalid_argument("step function needs n >= 1 values");
    for (double x : values)
      if (!std::isfinite(x))
        throw std::invalid_argument("step function values must be finite");
  }
  static StepFunction constant(double v) { return StepFunction(1, {v}); }

  double eval(double x) const {
    if (x < 0.0 || x > 1.0) throw std::domain_error("argument outside [0,1]");
    int i = std::min(n - 1, (int)(x * n));
    return values[i];
  }

  /// Exact integral over [a,b] within [0,1].
  double integral(double a, double b) const {
    if (b <= a) return 0.0;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      double lo = std::max(a, double(i) / n);
      double hi = std::min(b, double(i + 1) / n);
      if (hi > lo) s += values[i] * (hi - lo);
    }
    return s;
  }
};

namespace detail {
inline int common_refinement(int kn, int fn) {
  if (fn % kn != 0 && kn % fn != 0)
    throw RefinementError("incompatible partitions: no common refinement");
  return std::lcm(kn, fn);
}

// Value/fill of the kernel on the (a,b) sub-cell of the L x L refinement.
inline Cell refined_cell(const GridKernel& k, int L, int a, int b) {
  int m = L / k.n();
  const Cell& c = k.at(a / m, b / m);
  if (c.fill != CellFill::UpperTri) return c;
  int la = a % m, lb = b % m;
  if (la < lb) return Cell{CellFill::Full, c.value};
  if (la > lb) return Cell{};
  return c;
}
}  // namespace detail

/// Exact value of the bilinear form  integral f(s) H(s,t) g(t) ds dt.
inline double pair_integral(const GridKernel& k, const StepFunction& f,
                            const StepFunction& g) {
  int L = detail::common_refinement(k.n(), f.n);
  L = std::lcm(L, detail::common_refinement(k.n(), g.n));
  double s = 0.0;
  double cell = 1.0 / (double(L) * L);
  for (int a = 0; a < L; ++a) {
    double fa = f.values[a / (L / f.n)];
    if (fa == 0.0) continue;
    for (int b = 0; b < L; ++b) {
      double gb = g.values[b / (L / g.n)];
      if (gb == 0.0) continue;
      Cell c = detail::refined_cell(k, L, a, b);
      if (c.fill == CellFill::Full)
        s += c.value * fa * gb * cell;
      else if (c.fill == CellFill::UpperTri)
        s += c.value * fa * gb * cell / 2.0;
    }
  }
  return s;
}

/// alpha_H(f)(x) = int_0^1 H(t,x) f(t) dt, exact for step functions.
inline double alpha_eval(const GridKernel& k, const StepFunction& f, double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("argument outside [0,1]");
  detail::common_refinement(k.n(), f.n);
  int n = k.n();
  int j = std::min(n - 1, (int)(x * n));  // column strip of x (t coordinate)
  double t0 = double(j) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const Cell& c = k.at(i, j);
    if (c.fill == CellFill::Empty) continue;
    double lo = double(i) / n, hi = double(i + 1) / n;
    if (c.fill == CellFill::Full) {
      s += c.value * f.integral(lo, hi);
    } else {
      // H(t,x) = v on the part of the strip with t - lo < x - t0.
      double cut = std::min(hi, lo + (x - t0));
      if (cut > lo) s += c.value * f.integral(lo, cut);
    }
  }
  return s;
}

/// beta_H(f)(x) = int_0^1 H(x,t) f(t) dt, exact for step functions.
inline double beta_eval(const GridKernel& k, const StepFunction& f, double x) {
  if (x < 0.0 || x > 1.0) throw std::domain_error("argument outside [0,1]");
  detail::common_refinement(k.n(), f.n);
  int n = k.n();
  int i = std::min(n - 1, (int)(x * n));  // row strip of x (s coordinate)
  double s0 = double(i) / n;
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const Cell& c = k.at(i, j);
    if (c.fill == CellFill::Empty) continue;
    double lo = double(j) / n, hi = double(j + 1) / n;
    if (c.fill == CellFill::Full) {
      s += c.value * f.integral(lo, hi);
    } else {
      // H(x,t) = v on the part of the strip with t - lo > x - s0.
      double cut = std::max(lo, lo + (x - s0));
      if (hi > cut) s += c.value * f.integral(cut, hi);
    }
  }
  return s;
}

// -------- hypothesis and bound formulas --------

struct HypothesisReport {
  bool holds = false;
  std::optional<int> r;
  std::optional<double> c;
  std::optional<std::string> failure_reason;
};

/// Checks that supp(H) lies in the upper triangle and that H is a positive
/// constant on a union of r diagonal triangles of height 1/r, for some r
/// dividing the grid order.  Reports the largest such r.
inline HypothesisReport theorem_main_hypothesis(const GridKernel& k) {
  int n = k.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Cell& c = k.at(i, j);
      if (i > j && c.fill != CellFill::Empty)
        return {false, {}, {}, "support not in upper triangle"};
      if (i == j && c.fill == CellFill::Full)
        return {false, {}, {}, "support not in upper triangle"};
    }
  // Try divisors r of n, largest first.
  for (int r = n; r >= 1; --r) {
    if (n % r != 0) continue;
    int m = n / r;
    double c = -1.0;
    bool ok = true;
    for (int d = 0; d < r && ok; ++d)
      for (int a = 0; a < m && ok; ++a)
        for (int b = a; b < m && ok; ++b) {
          const Cell& cell = k.at(d * m + a, d * m + b);
          CellFill want = (a == b) ? CellFill::UpperTri : CellFill::Full;
          if (cell.fill != want || !(cell.value > 0.0)) {
            ok = false;
          } else if (c < 0.0) {
            c = cell.value;
          } else if (cell.value != c) {
            ok = false;
          }
        }
    if (ok) return {true, r, c, {}};
  }
  return {false, {}, {}, "no diagonal triangle family with constant value"};
}

inline std::optional<double> delta0_lower(const GridKernel& k) {
  if (!theorem_main_hypothesis(k).holds) return std::nullopt;
  return 1.0 + 2.0 * support_area(k);
}

inline double delta0_upper(const GridKernel& k) {
  return std::min(2.0, 1.0 + 2.0 * support_area(k));
}

// K_N is the union of the strictly super-diagonal N-blocks of [0,1]^2,
// i.e. blocks (i,j) with i < j; its area is (N-1)/(2N).
struct Region {
  enum class Kind { Full, KN } kind = Kind::Full;
  int N = 0;
  static Region full() { return {}; }
  static Region kn(int N) { return {Kind::KN, N}; }
};

/// integral over the region of log(max(H,eps)); exact per-cell closed form.
inline double log_max_integral(const GridKernel& k, double eps, Region region) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  int n = k.n();
  int m = 0;
  if (region.kind == Region::Kind::KN) {
    if (region.N < 2 || n % region.N != 0)
      throw RefinementError("grid order not divisible by N");
    m = n / region.N;
  }
  double cell = 1.0 / (double(n) * n);
  double log_eps = std::log(eps);
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (region.kind == Region::Kind::KN && !(i / m < j / m)) continue;
      const Cell& c = k.at(i, j);
      switch (c.fill) {
        case CellFill::Empty:
          s += cell * log_eps;
          break;
        case CellFill::Full:
          s += cell * std::log(std::max(c.value, eps));
          break;
        case CellFill::UpperTri:
          if (region.kind == Region::Kind::KN)
            throw UnsupportedRegionError(
                "UpperTri cell inside K_N: exact form not supported");
          s += cell / 2.0 * (std::log(std::max(c.value, eps)) + log_eps);
          break;
      }
    }
  return s;
}

/// area(supp(H) ∩ K_N), exact; requires N | n.
inline double support_area_in_kn(const GridKernel& k, int N) {
  if (N < 2 || k.n() % N != 0)
    throw RefinementError("grid order not divisible by N");
  int n = k.n(), m = n / N;
  std::int64_t twice_cells = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!(i / m < j / m)) continue;
      const Cell& c = k.at(i, j);
      if (c.fill == CellFill::Full)
        twice_cells += 2;
      else if (c.fill == CellFill::UpperTri)
        twice_cells += 1;
    }
  return double(twice_cells) / (2.0 * n * n);
}

}  // namespace circlab

#endif
