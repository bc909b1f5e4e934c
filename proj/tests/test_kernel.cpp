#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "circlab/grid_kernel.hpp"

using namespace circlab;

namespace {

GridKernel random_kernel(std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> fill(0, 2);
  std::uniform_real_distribution<double> val(0.1, 4.0);
  GridKernel k(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int f = fill(rng);
      if (f == 1)
        k.set(i, j, CellFill::Full, val(rng));
      else if (f == 2)
        k.set(i, j, CellFill::UpperTri, val(rng));
    }
  return k;
}

StepFunction random_step(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = val(rng);
  return StepFunction(n, std::move(v));
}

// Integral of g(x) * alpha(f)(x) dx on the common refinement.  alpha(f)
// is affine on each open refinement interval but can jump at interval
// boundaries, so sample two symmetric interior points (their average is
// the exact mean of an affine function).
double integrate_g_alpha(const GridKernel& k, const StepFunction& f,
                         const StepFunction& g) {
  int L = std::lcm(std::lcm(k.n(), f.n), g.n);
  double s = 0.0;
  for (int a = 0; a < L; ++a) {
    double w = 1.0 / L;
    double p = (a + 0.25) * w, q = (a + 0.75) * w;
    double gv = g.values[a / (L / g.n)];
    s += gv * (alpha_eval(k, f, p) + alpha_eval(k, f, q)) / 2.0 * w;
  }
  return s;
}

double integrate_f_beta(const GridKernel& k, const StepFunction& f,
                        const StepFunction& g) {
  int L = std::lcm(std::lcm(k.n(), f.n), g.n);
  double s = 0.0;
  for (int a = 0; a < L; ++a) {
    double w = 1.0 / L;
    double p = (a + 0.25) * w, q = (a + 0.75) * w;
    double fv = f.values[a / (L / f.n)];
    s += fv * (beta_eval(k, g, p) + beta_eval(k, g, q)) / 2.0 * w;
  }
  return s;
}

}  // namespace

TEST_CASE("constant kernel builder") {
  GridKernel k1 = build_constant(1, 1.0);
  CHECK(k1.at(0, 0).fill == CellFill::Full);
  CHECK(support_area(k1) == 1.0);

  GridKernel k0 = build_constant(2, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(k0.at(i, j).fill == CellFill::Empty);
  CHECK(support_area(k0) == 0.0);

  GridKernel k4 = build_constant(4, 2.5);
  CHECK(l1_mass(k4) == Catch::Approx(2.5).epsilon(1e-15));

  CHECK_THROWS_AS(build_constant(4, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_constant(0, 1.0), std::invalid_argument);
}

TEST_CASE("upper triangle builder") {
  GridKernel k1 = build_upper_triangle(1);
  CHECK(k1.at(0, 0).fill == CellFill::UpperTri);
  CHECK(support_area(k1) == 0.5);

  GridKernel k2 = build_upper_triangle(2);
  CHECK(k2.at(0, 1).fill == CellFill::Full);
  CHECK(k2.at(0, 0).fill == CellFill::UpperTri);
  CHECK(k2.at(1, 1).fill == CellFill::UpperTri);
  CHECK(k2.at(1, 0).fill == CellFill::Empty);
  CHECK(support_area(k2) == 0.5);
  CHECK(support_area(build_upper_triangle(4)) == 0.5);
  CHECK(support_area(build_upper_triangle(5)) == 0.5);
  CHECK(l1_mass(build_upper_triangle(2)) == 0.5);
}

TEST_CASE("diagonal triangles builder") {
  GridKernel k = build_diagonal_triangles(1, 1.0);
  CHECK(k.at(0, 0).fill == CellFill::UpperTri);
  CHECK(support_area(k) == 0.5);

  CHECK(support_area(build_diagonal_triangles(2, 1.0)) == 0.25);
  CHECK(*delta0_lower(build_diagonal_triangles(2, 1.0)) == 1.5);
  CHECK(support_area(build_diagonal_triangles(3, 1.0)) ==
        Catch::Approx(1.0 / 6).epsilon(1e-15));
  CHECK(*delta0_lower(build_diagonal_triangles(3, 1.0)) ==
        Catch::Approx(4.0 / 3).epsilon(1e-15));
  CHECK(support_area(build_diagonal_triangles(4, 2.0)) == 0.125);

  CHECK_THROWS_AS(build_diagonal_triangles(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_diagonal_triangles(2, 0.0), std::invalid_argument);
}

TEST_CASE("band builder") {
  GridKernel b1 = build_band(4, 1, 1.0);
  GridKernel d4 = build_diagonal_triangles(4, 1.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(b1.at(i, j).fill == d4.at(i, j).fill);
      CHECK(b1.at(i, j).value == d4.at(i, j).value);
    }

  GridKernel bfull = build_band(4, 4, 1.0);
  GridKernel ut = build_upper_triangle(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(bfull.at(i, j).fill == ut.at(i, j).fill);

  CHECK(support_area(build_band(8, 2, 1.0)) == 0.171875);
  CHECK(band_area_continuum(0.25) == 0.25 - 0.03125);

  CHECK_THROWS_AS(build_band(4, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_band(4, 5, 1.0), std::invalid_argument);
}

TEST_CASE("lifted builder") {
  std::vector<std::vector<double>> zero{{0, 0}, {0, 0}};
  GridKernel k = build_lifted(2, 1, zero);
  CHECK(k.n() == 2);
  CHECK(k.at(0, 0).fill == CellFill::UpperTri);
  CHECK(k.at(1, 1).fill == CellFill::UpperTri);
  CHECK(support_area(k) == 0.25);

  std::vector<std::vector<double>> ones{{0, 1}, {1, 0}};
  CHECK(support_area(build_lifted(2, 1, ones)) == 0.75);

  std::vector<std::vector<double>> c12{{0, 2}, {0, 0}};
  CHECK(l1_mass(build_lifted(2, 1, c12)) == 1.25);

  // Off-diagonal blocks are p x p constant; diagonal blocks carry the
  // upper-triangle pattern.
  GridKernel big = build_lifted(2, 4, ones);
  CHECK(big.n() == 8);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      CHECK(big.at(a, 4 + b).fill == CellFill::Full);
      CHECK(big.at(a, 4 + b).value == 1.0);
      CellFill want = a < b    ? CellFill::Full
                      : a == b ? CellFill::UpperTri
                               : CellFill::Empty;
      CHECK(big.at(a, b).fill == want);
    }

  std::vector<std::vector<double>> bad{{1, 0}, {0, 0}};
  CHECK_THROWS_AS(build_lifted(2, 1, bad), std::invalid_argument);
}

TEST_CASE("coordinate expectation suprema") {
  auto [a1, b1] = ce_sup(build_constant(1, 1.0));
  CHECK(a1 == 1.0);
  CHECK(b1 == 1.0);

  auto [a2, b2] = ce_sup(build_upper_triangle(1));
  CHECK(a2 == 1.0);
  CHECK(b2 == 1.0);

  auto [a3, b3] = ce_sup(build_diagonal_triangles(2, 1.0));
  CHECK(a3 == 0.5);
  CHECK(b3 == 0.5);
}

TEST_CASE("pair integral") {
  StepFunction one = StepFunction::constant(1.0);
  CHECK(pair_integral(build_constant(1, 1.0), one, one) == 1.0);
  CHECK(pair_integral(build_upper_triangle(1), one, one) == 0.5);

  StepFunction lo_half(2, {1.0, 0.0});
  StepFunction hi_half(2, {0.0, 1.0});
  CHECK(pair_integral(build_upper_triangle(2), lo_half, hi_half) == 0.25);

  StepFunction thirds(3, {1.0, 1.0, 1.0});
  CHECK_THROWS_AS(pair_integral(build_upper_triangle(2), thirds, one),
                  RefinementError);
}

TEST_CASE("alpha and beta evaluation") {
  StepFunction one = StepFunction::constant(1.0);
  for (double x : {0.0, 0.3, 0.5, 1.0}) {
    CHECK(alpha_eval(build_constant(1, 2.0), one, x) == 2.0);
    CHECK(alpha_eval(build_upper_triangle(1), one, x) ==
          Catch::Approx(x).margin(1e-15));
    CHECK(beta_eval(build_upper_triangle(1), one, x) ==
          Catch::Approx(1.0 - x).margin(1e-15));
  }
  CHECK_THROWS_AS(alpha_eval(build_constant(1, 1.0), one, 1.5),
                  std::domain_error);
  CHECK_THROWS_AS(beta_eval(build_constant(1, 1.0), one, -0.1),
                  std::domain_error);
}

TEST_CASE("alpha/beta duality against pair_integral") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + int(rng() % 4);
    GridKernel k = random_kernel(rng, n);
    StepFunction f = random_step(rng, (rng() % 2) ? n : 2 * n);
    StepFunction g = random_step(rng, (rng() % 2) ? n : 1);
    double direct = pair_integral(k, f, g);
    CHECK(integrate_g_alpha(k, f, g) == Catch::Approx(direct).margin(1e-12));
    CHECK(integrate_f_beta(k, f, g) == Catch::Approx(direct).margin(1e-12));
  }
}

TEST_CASE("refinement leaves exact geometry unchanged") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 1 + int(rng() % 3);
    GridKernel k = random_kernel(rng, n);
    GridKernel r = k.refine();
    CHECK(support_area(r) == Catch::Approx(support_area(k)).margin(1e-15));
    CHECK(l1_mass(r) == Catch::Approx(l1_mass(k)).margin(1e-15));
    CHECK(delta0_upper(r) == Catch::Approx(delta0_upper(k)).margin(1e-15));
    CHECK(delta0_lower(r).has_value() == delta0_lower(k).has_value());
    StepFunction f = random_step(rng, n);
    StepFunction g = random_step(rng, n);
    CHECK(pair_integral(r, f, g) ==
          Catch::Approx(pair_integral(k, f, g)).margin(1e-13));
  }
}

TEST_CASE("main hypothesis checker") {
  HypothesisReport h = theorem_main_hypothesis(build_upper_triangle(4));
  REQUIRE(h.holds);
  CHECK(*h.r == 4);
  CHECK(*h.c == 1.0);

  HypothesisReport hb = theorem_main_hypothesis(build_band(8, 2, 3.0));
  REQUIRE(hb.holds);
  CHECK(*hb.r == 8);
  CHECK(*hb.c == 3.0);

  GridKernel below(2);
  below.set(1, 0, CellFill::Full, 1.0);
  below.set(0, 0, CellFill::UpperTri, 1.0);
  below.set(1, 1, CellFill::UpperTri, 1.0);
  HypothesisReport hn = theorem_main_hypothesis(below);
  CHECK_FALSE(hn.holds);
  CHECK(*hn.failure_reason == "support not in upper triangle");

  for (int n = 1; n <= 8; ++n)
    CHECK(theorem_main_hypothesis(build_upper_triangle(n)).holds);

  GridKernel diag_full(2);
  diag_full.set(0, 0, CellFill::Full, 1.0);
  CHECK_FALSE(theorem_main_hypothesis(diag_full).holds);
}

TEST_CASE("delta0 bounds") {
  CHECK(*delta0_lower(build_upper_triangle(3)) == 2.0);
  CHECK(delta0_upper(build_upper_triangle(3)) == 2.0);
  for (int n : {2, 3, 4})
    CHECK(*delta0_lower(build_diagonal_triangles(n, 1.0)) ==
          Catch::Approx(1.0 + 1.0 / n).epsilon(1e-15));
  CHECK_FALSE(delta0_lower(build_constant(1, 1.0)).has_value());
  CHECK(delta0_upper(build_constant(1, 1.0)) == 2.0);
}

TEST_CASE("delta0 ordering when lower present") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    GridKernel k = random_kernel(rng, 1 + int(rng() % 4));
    auto lo = delta0_lower(k);
    if (lo) CHECK(*lo <= delta0_upper(k) + 1e-15);
    double area = support_area(k);
    CHECK(area >= 0.0);
    CHECK(area <= 1.0);
  }
}

TEST_CASE("log max integral") {
  CHECK(log_max_integral(build_constant(2, 1.0), 0.5, Region::full()) == 0.0);

  double v = log_max_integral(build_diagonal_triangles(2, 1.0), std::exp(-1.0),
                              Region::kn(2));
  CHECK(v == Catch::Approx(-0.25).margin(1e-15));

  std::vector<std::vector<double>> c{{0, 1}, {0, 0}};
  CHECK(log_max_integral(build_lifted(2, 1, c), 0.1, Region::kn(2)) == 0.0);

  CHECK_THROWS_AS(
      log_max_integral(build_constant(3, 1.0), 0.1, Region::kn(2)),
      RefinementError);
  // UpperTri cell inside K_N is rejected, never silently approximated.
  GridKernel tri_in_kn(2);
  tri_in_kn.set(0, 1, CellFill::UpperTri, 1.0);
  CHECK_THROWS_AS(log_max_integral(tri_in_kn, 0.1, Region::kn(2)),
                  UnsupportedRegionError);
}

TEST_CASE("step function basics") {
  StepFunction f(2, {1.0, 0.0});
  CHECK(f.eval(0.25) == 1.0);
  CHECK(f.eval(0.75) == 0.0);
  CHECK(f.integral(0.0, 1.0) == 0.5);
  CHECK(f.integral(0.25, 0.75) == 0.25);
  CHECK_THROWS_AS(StepFunction(0, {}), std::invalid_argument);
}
