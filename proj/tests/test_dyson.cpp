#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "circlab/dyson.hpp"

using namespace circlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("normalization constant small cases") {
  CHECK(dyson_log_c(1) == Catch::Approx(std::log(kPi)).epsilon(1e-14));
  CHECK(dyson_log_c(2) ==
        Catch::Approx(3.0 * std::log(kPi) - std::log(2.0)).epsilon(1e-14));
  CHECK(dyson_log_c(3) ==
        Catch::Approx(6.0 * std::log(kPi) - std::log(12.0)).epsilon(1e-14));
  CHECK_THROWS_AS(dyson_log_c(0), std::invalid_argument);
}

TEST_CASE("normalization constant vs integer factorial oracle") {
  // prod_{j<=k} j! fits in uint64 only through k=20 via incremental
  // factorials; accumulate the log of the product instead, from exact
  // integer factorials.
  std::uint64_t fact = 1;
  double log_prod = 0.0;
  for (int k = 1; k <= 20; ++k) {
    fact *= std::uint64_t(k);
    log_prod += std::log(double(fact));
    double expect = 0.5 * k * (k + 1) * std::log(kPi) - log_prod;
    CHECK(dyson_log_c(k) == Catch::Approx(expect).margin(1e-10));
  }
}

TEST_CASE("log density") {
  ComplexMatrix t(2);
  t(0, 0) = 0.0;
  t(1, 1) = 1.0;
  t(0, 1) = cplx(2, 3);
  DysonLogDensity d = dyson_log_density(t);
  CHECK(d.finite);
  CHECK(d.interaction == 0.0);
  CHECK(d.total ==
        Catch::Approx(3.0 * std::log(kPi) - std::log(2.0)).epsilon(1e-14));

  ComplexMatrix rep(3);
  rep(0, 0) = rep(2, 2) = cplx(1, 1);
  rep(1, 1) = 5.0;
  DysonLogDensity dr = dyson_log_density(rep);
  CHECK_FALSE(dr.finite);
  CHECK(std::isinf(dr.total));

  ComplexMatrix t3(3);
  t3(0, 0) = 0.0;
  t3(1, 1) = 1.0;
  t3(2, 2) = 2.0;
  CHECK(dyson_log_density(t3).interaction ==
        Catch::Approx(2.0 * std::log(2.0)).epsilon(1e-14));

  ComplexMatrix full(2);
  full(1, 0) = 1.0;
  CHECK_THROWS_AS(dyson_log_density(full), ShapeError);
}

TEST_CASE("interaction depends only on the diagonal multiset") {
  ComplexMatrix a(4);
  a(0, 0) = cplx(0.3, -0.1);
  a(1, 1) = cplx(-1, 2);
  a(2, 2) = 0.5;
  a(3, 3) = cplx(0, -0.7);
  a(0, 2) = 9.0;
  a(1, 3) = cplx(-4, 4);
  ComplexMatrix b(4);
  b(0, 0) = a(3, 3);
  b(1, 1) = a(0, 0);
  b(2, 2) = a(1, 1);
  b(3, 3) = a(2, 2);
  b(0, 1) = 100.0;
  CHECK(dyson_log_density(a).interaction ==
        Catch::Approx(dyson_log_density(b).interaction).epsilon(1e-14));
}

TEST_CASE("diagonal scaling identity") {
  int k = 6;
  ComplexMatrix t(k);
  for (int i = 0; i < k; ++i) t(i, i) = cplx(0.2 * i + 0.1, -0.3 * i);
  t(0, 3) = 7.0;
  double base = dyson_log_density(t).interaction;
  for (double s : {2.0, 0.25, -3.0}) {
    ComplexMatrix ts = t;
    for (int i = 0; i < k; ++i) ts(i, i) = s * t(i, i);
    double expect = base + k * (k - 1) * std::log(std::abs(s));
    CHECK(dyson_log_density(ts).interaction ==
          Catch::Approx(expect).margin(1e-9));
  }
}

TEST_CASE("triangular sampler") {
  ComplexMatrix t = dyson_sample(32, {0, 12, 0});
  for (int r = 1; r < 32; ++r)
    for (int c = 0; c < r; ++c) CHECK(std::abs(t(r, c)) <= 1e-12);

  // The diagonal equals the eigenvalue multiset of the underlying draw.
  SpectralSample ev = eigenvalues(ginibre({32, 12, 0}));
  std::vector<double> diag;
  for (int i = 0; i < 32; ++i) diag.push_back(std::abs(t(i, i)));
  std::sort(diag.begin(), diag.end());
  for (int i = 0; i < 32; ++i)
    CHECK(std::abs(diag[i] - ev.radii_sorted[i]) <= 1e-10);
}

TEST_CASE("no exact diagonal collisions in practice") {
  for (int t = 0; t < 50; ++t) {
    DysonLogDensity d =
        dyson_log_density(dyson_sample(24, {77, std::uint64_t(t), 0}));
    CHECK(d.finite);
  }
}

TEST_CASE("diagonal radial distribution approaches the circular law") {
  int k = 200, trials = 5;
  double ks_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    ComplexMatrix tri = dyson_sample(k, {k, 5, std::uint64_t(t)});
    SpectralSample s;
    for (int i = 0; i < k; ++i) s.eigenvalues.push_back(tri(i, i));
    for (const cplx& z : s.eigenvalues)
      s.radii_sorted.push_back(std::abs(z));
    std::sort(s.radii_sorted.begin(), s.radii_sorted.end());
    ks_sum += ks_uniform_disk(s, 1.0);
  }
  CHECK(ks_sum / trials <= 0.12);
}
