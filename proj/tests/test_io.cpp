#include <catch_amalgamated.hpp>

#include <sstream>

#include "circlab/io.hpp"
#include "circlab/manifest.hpp"
#include "circlab/samplers.hpp"

using namespace circlab;

TEST_CASE("kernel json round trip") {
  for (const GridKernel& k :
       {build_upper_triangle(3), build_band(8, 2, 2.5), build_constant(2, 0.0),
        build_lifted(2, 2, {{0, 1.5}, {0.5, 0}})}) {
    nlohmann::json j = kernel_to_json(k);
    GridKernel back = kernel_from_json(j);
    REQUIRE(back.n() == k.n());
    for (int i = 0; i < k.n(); ++i)
      for (int jj = 0; jj < k.n(); ++jj) {
        CHECK(back.at(i, jj).fill == k.at(i, jj).fill);
        CHECK(back.at(i, jj).value == k.at(i, jj).value);
      }
    // Canonical form is stable under a second round trip.
    CHECK(kernel_to_json(back) == j);
  }
}

TEST_CASE("kernel json validation") {
  CHECK_THROWS_AS(kernel_from_json(nlohmann::json::array()), ParseError);
  CHECK_THROWS_AS(kernel_from_json({{"cells", nlohmann::json::array()}}),
                  ParseError);
  CHECK_THROWS_AS(kernel_from_json({{"n", 0}}), ParseError);
  nlohmann::json bad_cell = {
      {"n", 2},
      {"cells", {{{"i", 3}, {"j", 1}, {"fill", "full"}, {"value", 1.0}}}}};
  CHECK_THROWS_AS(kernel_from_json(bad_cell), ParseError);
  nlohmann::json bad_fill = {
      {"n", 2},
      {"cells", {{{"i", 1}, {"j", 1}, {"fill", "wavy"}, {"value", 1.0}}}}};
  CHECK_THROWS_AS(kernel_from_json(bad_fill), ParseError);
  nlohmann::json missing = {{"n", 2}, {"cells", {{{"i", 1}, {"j", 1}}}}};
  CHECK_THROWS_AS(kernel_from_json(missing), ParseError);

  // 1-based indexing: cell (1,1) is the lower-left corner cell.
  nlohmann::json ok = {
      {"n", 2},
      {"cells", {{{"i", 1}, {"j", 2}, {"fill", "full"}, {"value", 3.0}}}}};
  GridKernel k = kernel_from_json(ok);
  CHECK(k.at(0, 1).fill == CellFill::Full);
  CHECK(k.at(0, 1).value == 3.0);
  CHECK(k.at(0, 0).fill == CellFill::Empty);
}

TEST_CASE("matrix csv round trip") {
  ComplexMatrix x = ginibre({7, 12345, 0});
  std::stringstream ss;
  save_matrix_csv(x, ss);
  ComplexMatrix back = load_matrix_csv(ss);
  REQUIRE(back.k == x.k);
  for (std::size_t i = 0; i < x.entries.size(); ++i)
    CHECK(back.entries[i] == x.entries[i]);

  std::stringstream bad("not,a,matrix\n");
  CHECK_THROWS_AS(load_matrix_csv(bad), ParseError);
  std::stringstream empty("i,j,re,im\n");
  CHECK_THROWS_AS(load_matrix_csv(empty), ParseError);
}

TEST_CASE("matrix raw round trip") {
  ComplexMatrix x = ginibre({5, 999, 3});
  std::stringstream ss;
  save_matrix_raw(x, ss);
  std::string payload = ss.str();
  CHECK(payload.size() == 16 + std::size_t(5) * 5 * 16);
  CHECK(payload.compare(0, 8, "CMPXMAT1") == 0);
  ComplexMatrix back = load_matrix_raw(ss);
  REQUIRE(back.k == x.k);
  CHECK(back.entries == x.entries);

  std::stringstream bad("XXXXXXXXgarbage");
  CHECK_THROWS_AS(load_matrix_raw(bad), ParseError);
  std::stringstream truncated(payload.substr(0, 40));
  CHECK_THROWS_AS(load_matrix_raw(truncated), ParseError);
}

TEST_CASE("spectral dumps") {
  SpectralSample s;
  s.eigenvalues = {cplx(1, 0), cplx(0, -2)};
  s.radii_sorted = {1.0, 2.0};
  std::stringstream ev;
  save_eigenvalues_csv(s, ev);
  CHECK(ev.str() == "re,im\n1,0\n0,-2\n");

  std::stringstream cdf;
  save_radial_cdf_csv(s, 2.0, cdf);
  CHECK(cdf.str() == "r,F_emp,F_theory\n1,0.5,0.25\n2,1,1\n");
}

TEST_CASE("report serialization") {
  DimensionExperimentConfig cfg;
  cfg.k_list = {8};
  cfg.trials = 8;
  cfg.eps_grid = {0.1, 0.4};
  cfg.seed = 3;
  DimensionExperimentReport rep =
      dimension_experiment(build_upper_triangle(2), cfg, "upper-triangle:2");
  nlohmann::json j = report_to_json(rep, "0.1.0");
  CHECK(j["kernel"] == "upper-triangle:2");
  CHECK(j["seed"] == 3);
  CHECK(j["bounds"]["lower"] == 2.0);
  CHECK(j["bounds"]["upper"] == 2.0);
  CHECK(j["bounds"]["hypothesis"]["holds"] == true);
  CHECK(j["per_k"].size() == 1);
  CHECK(j["per_k"][0]["k"] == 8);
  CHECK(j["per_k"][0]["p_hat"].size() == 2);

  DimensionBounds nb = dimension_bounds(build_constant(2, 1.0));
  nlohmann::json bj = bounds_to_json(nb);
  CHECK(bj["lower"].is_null());
  CHECK(bj["hypothesis"]["holds"] == false);
  CHECK(bj["hypothesis"].contains("failure_reason"));
}

TEST_CASE("manifest round trip and digests") {
  RunManifest m;
  m.subcommand = "kernel";
  m.args = {"--builder", "upper-triangle", "--n", "4"};
  m.seed = 17;
  m.version = kVersion;
  m.started_at = "2026-01-01T00:00:00Z";
  m.finished_at = "2026-01-01T00:00:01Z";
  m.outputs = {{"kernel.json", "abcdef0123456789"}};
  nlohmann::json j = m.to_json();
  RunManifest back = RunManifest::from_json(j);
  CHECK(back.subcommand == m.subcommand);
  CHECK(back.args == m.args);
  CHECK(back.seed == m.seed);
  CHECK(back.outputs == m.outputs);

  // FNV-1a is a pure function of file content.
  auto write_tmp = [](const std::string& name, const std::string& content) {
    std::string path = "io_test_" + name;
    std::ofstream f(path, std::ios::binary);
    f << content;
    return path;
  };
  std::string a = write_tmp("a", "hello");
  std::string b = write_tmp("b", "hello");
  std::string c = write_tmp("c", "hello ");
  CHECK(file_digest(a) == file_digest(b));
  CHECK(file_digest(a) != file_digest(c));
  CHECK(file_digest(a).size() == 16);
  CHECK_THROWS(file_digest("io_test_missing_file"));
}
