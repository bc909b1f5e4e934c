// circlab command-line laboratory: every experiment as a seeded,
// reproducible subcommand.  Exit codes: 0 success, 1 invariant failure,
// 2 usage/config error, 3 numerical failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "circlab/dimension.hpp"
#include "circlab/dyson.hpp"
#include "circlab/io.hpp"
#include "circlab/manifest.hpp"
#include "circlab/packing.hpp"
#include "circlab/parallel.hpp"
#include "circlab/samplers.hpp"
#include "circlab/spectra.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace circlab;

namespace {

struct NanEmitted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All numeric CSV output funnels through here; a NaN is a hard error.
std::string num(double v) {
  if (!std::isfinite(v)) throw NanEmitted("non-finite value in output");
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw CLI::ValidationError("empty numeric list: " + s);
  return out;
}

// ---- kernel selection shared by several subcommands ----

struct KernelChoice {
  std::string spec_path;
  std::string builder;
  int n = 4;
  double c = 1.0;
  int r = 2;
  int w = 1;
  int blocks = 2;  // N
  int p = 1;
  std::vector<double> cij;  // row-major N x N, zero diagonal

  void add_options(CLI::App* app) {
    app->add_option("--spec", spec_path, "kernel spec JSON file");
    app->add_option("--builder", builder,
                    "constant|upper-triangle|diag-triangles|band|lifted");
    app->add_option("--n", n, "grid order");
    app->add_option("--c", c, "constant cell value");
    app->add_option("--r", r, "diagonal triangle count");
    app->add_option("--w", w, "band width in cells");
    app->add_option("--N", blocks, "lifted: block count");
    app->add_option("--p", p, "lifted: sub-blocks per block");
    app->add_option("--cij", cij,
                    "lifted: N*N off-diagonal weights, row-major")
        ->delimiter(',');
  }

  GridKernel build() const {
    if (!spec_path.empty()) return load_kernel(spec_path);
    if (builder == "constant") return build_constant(n, c);
    if (builder == "upper-triangle") return build_upper_triangle(n);
    if (builder == "diag-triangles") return build_diagonal_triangles(r, c);
    if (builder == "band") return build_band(n, w, c);
    if (builder == "lifted") {
      std::vector<std::vector<double>> m(blocks,
                                         std::vector<double>(blocks, 0.0));
      if (!cij.empty()) {
        if ((int)cij.size() != blocks * blocks)
          throw CLI::ValidationError("--cij needs N*N values");
        for (int i = 0; i < blocks; ++i)
          for (int j = 0; j < blocks; ++j) m[i][j] = cij[i * blocks + j];
      }
      return build_lifted(blocks, p, m);
    }
    throw CLI::ValidationError("need --spec or a valid --builder");
  }

  std::string id() const {
    if (!spec_path.empty()) return "spec:" + spec_path;
    std::ostringstream os;
    os << builder;
    if (builder == "constant")
      os << "(" << n << "," << c << ")";
    else if (builder == "upper-triangle")
      os << "(" << n << ")";
    else if (builder == "diag-triangles")
      os << "(" << r << "," << c << ")";
    else if (builder == "band")
      os << "(" << n << "," << w << "," << c << ")";
    else if (builder == "lifted")
      os << "(" << blocks << "," << p << ")";
    return os.str();
  }
};

// ---- output sink: stdout, or files under --out-dir with a manifest ----

struct Sink {
  std::string out_dir;
  RunManifest manifest;

  bool to_files() const { return !out_dir.empty(); }

  void write(const std::string& name, const std::string& content) {
    if (!to_files()) {
      std::cout << content;
      return;
    }
    fs::create_directories(out_dir);
    fs::path p = fs::path(out_dir) / name;
    {
      std::ofstream f(p, std::ios::binary);
      f << content;
    }
    manifest.outputs.emplace_back(name, file_digest(p.string()));
  }

  void finish() {
    if (!to_files()) return;
    manifest.finished_at = RunManifest::now_iso8601();
    std::ofstream f(fs::path(out_dir) / "manifest.json");
    f << manifest.to_json().dump(2) << "\n";
  }
};

constexpr const char* kCsvTrailer = "# manifest: manifest.json\n";

// ---- subcommand bodies; each returns the exit code ----

int run_kernel(const KernelChoice& kc, Sink& sink) {
  GridKernel k = kc.build();
  json canonical = kernel_to_json(k);
  DimensionBounds b = dimension_bounds(k);
  auto [ce1, ce2] = ce_sup(k);
  json summary = {{"support_area", support_area(k)},
                  {"l1_mass", l1_mass(k)},
                  {"ce_sup", {ce1, ce2}},
                  {"bounds", bounds_to_json(b)}};
  sink.write("kernel.json", canonical.dump(2) + "\n");
  sink.write("summary.json", summary.dump(2) + "\n");
  return 0;
}

int run_brown_disk(int k, const std::vector<double>& eps_list, double c,
                   int trials, std::uint64_t seed, int threads, Sink& sink) {
  if (trials < 1) throw CLI::ValidationError("--trials must be >= 1");
  struct Row {
    int trial;
    double eps, ks, rho, r_theory;
  };
  std::vector<Row> rows(trials * eps_list.size());
  parallel_for(trials, threads, [&](int t) {
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
      double eps = eps_list[e];
      ComplexMatrix z =
          perturbed_dt(SampleConfig{k, seed, std::uint64_t(t)}, eps, c);
      SpectralSample s = eigenvalues(z);
      double r_th = disk_radius(eps, c);
      rows[t * eps_list.size() + e] =
          Row{t, eps, ks_uniform_disk(s, r_th), spectral_radius(s), r_th};
    }
  });
  std::ostringstream os;
  os << "trial,eps,ks,spectral_radius,r_theory\n";
  for (const Row& r : rows)
    os << r.trial << ',' << num(r.eps) << ',' << num(r.ks) << ','
       << num(r.rho) << ',' << num(r.r_theory) << '\n';
  os << kCsvTrailer;
  sink.write("brown_disk.csv", os.str());
  return 0;
}

int run_covariance(const KernelChoice& kc, int k, int trials,
                   std::uint64_t seed, int threads, Sink& sink) {
  GridKernel kern = kc.build();
  int n = kern.n();
  if (k % n != 0)
    throw CLI::ValidationError("--k must be divisible by the grid order");
  if (trials < 1) throw CLI::ValidationError("--trials must be >= 1");
  int b = k / n;
  std::vector<std::vector<std::vector<double>>> per_trial(trials);
  parallel_for(trials, threads, [&](int t) {
    per_trial[t] = kernel_recovery(
        weighted_sample(kern, SampleConfig{k, seed, std::uint64_t(t)}), n);
  });
  std::ostringstream os;
  os << "i,j,mean,se,target\n";
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double mean = 0.0;
      for (int t = 0; t < trials; ++t) mean += per_trial[t][i][j];
      mean /= trials;
      double var = 0.0;
      for (int t = 0; t < trials; ++t) {
        double d = per_trial[t][i][j] - mean;
        var += d * d;
      }
      var = trials > 1 ? var / (trials - 1) : 0.0;
      const Cell& cell = kern.at(i, j);
      // Finite-k target: Full cells hit the value, UpperTri cells carry
      // the (b-1)/(2b) occupancy bias.
      double target = 0.0;
      if (cell.fill == CellFill::Full)
        target = cell.value;
      else if (cell.fill == CellFill::UpperTri)
        target = cell.value * (b - 1) / (2.0 * b);
      os << i + 1 << ',' << j + 1 << ',' << num(mean) << ','
         << num(std::sqrt(var / trials)) << ',' << num(target) << '\n';
    }
  os << kCsvTrailer;
  sink.write("covariance.csv", os.str());
  return 0;
}

int run_dyson(int k, int trials, std::uint64_t seed, int threads, Sink& sink) {
  if (trials < 1) throw CLI::ValidationError("--trials must be >= 1");
  struct Row {
    double log_c, interaction, total, rho, ks_circular;
    bool finite;
  };
  std::vector<Row> rows(trials);
  parallel_for(trials, threads, [&](int t) {
    ComplexMatrix tm = dyson_sample(k, SampleConfig{k, seed, std::uint64_t(t)});
    DysonLogDensity d = dyson_log_density(tm);
    SpectralSample s;
    for (int i = 0; i < k; ++i) s.eigenvalues.push_back(tm(i, i));
    for (const cplx& z : s.eigenvalues)
      s.radii_sorted.push_back(std::abs(z));
    std::sort(s.radii_sorted.begin(), s.radii_sorted.end());
    rows[t] = Row{d.log_c, d.interaction, d.total, spectral_radius(s),
                  ks_uniform_disk(s, 1.0), d.finite};
  });
  std::ostringstream os;
  os << "trial,log_c,interaction,total,spectral_radius,ks_circular\n";
  for (int t = 0; t < trials; ++t) {
    const Row& r = rows[t];
    if (!r.finite)
      throw NanEmitted("diagonal collision: density is -inf at trial " +
                       std::to_string(t));
    os << t << ',' << num(r.log_c) << ',' << num(r.interaction) << ','
       << num(r.total) << ',' << num(r.rho) << ',' << num(r.ks_circular)
       << '\n';
  }
  os << kCsvTrailer;
  sink.write("dyson.csv", os.str());
  return 0;
}

int run_packing(const std::vector<std::string>& cloud_files,
                const std::string& generator, int k, int m,
                const std::string& eps_spec, std::uint64_t seed, Sink& sink) {
  PointCloud cloud;
  if (!cloud_files.empty()) {
    std::vector<ComplexMatrix> mats;
    for (const auto& f : cloud_files) {
      std::ifstream in(f, std::ios::binary);
      if (!in) throw CLI::ValidationError("cannot open cloud file: " + f);
      char magic[8] = {};
      in.read(magic, 8);
      in.seekg(0);
      if (std::memcmp(magic, kMatrixMagic, 8) == 0)
        mats.push_back(load_matrix_raw(in));
      else
        mats.push_back(load_matrix_csv(in));
    }
    cloud = cloud_from_samples(mats);
  } else if (generator == "ginibre") {
    if (m < 1) throw CLI::ValidationError("--m must be >= 1");
    std::vector<ComplexMatrix> mats;
    for (int t = 0; t < m; ++t)
      mats.push_back(ginibre(SampleConfig{k, seed, std::uint64_t(t)}));
    cloud = cloud_from_samples(mats);
  } else {
    throw CLI::ValidationError("need --cloud files or --generator ginibre");
  }

  std::vector<double> eps_grid;
  if (eps_spec == "auto") {
    // Geometric grid around the median pairwise distance.
    std::vector<double> ds;
    for (int a = 0; a < cloud.m; ++a)
      for (int b = a + 1; b < cloud.m; ++b) ds.push_back(cloud.d(a, b));
    if (ds.empty()) throw CLI::ValidationError("cloud has a single point");
    std::sort(ds.begin(), ds.end());
    double med = ds[ds.size() / 2];
    for (double f : {1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0})
      eps_grid.push_back(med * f);
  } else {
    eps_grid = parse_double_list(eps_spec);
  }

  PackingReport rep = packing_report(cloud, eps_grid);
  SandwichReport sw = sandwich_check(cloud, rep.eps_grid.front());
  std::ostringstream os;
  os << "eps,p_hat,k_hat\n";
  for (std::size_t i = 0; i < rep.eps_grid.size(); ++i)
    os << num(rep.eps_grid[i]) << ',' << rep.p_hat[i] << ',' << rep.k_hat[i]
       << '\n';
  os << "# slope: " << num(rep.slope) << "\n";
  os << "# sandwich(" << num(sw.eps) << "): " << sw.p_4eps << " <= "
     << sw.k_2eps << " <= " << sw.p_eps << (sw.exact ? " exact " : " est ")
     << (sw.pass ? "pass" : "FAIL") << "\n";
  os << kCsvTrailer;
  sink.write("packing.csv", os.str());
  return sw.pass ? 0 : 1;
}

int run_prop1(const std::string& f_spec, const std::string& eps_spec,
              Sink& sink) {
  std::vector<double> values = parse_double_list(f_spec);
  StepFunction f((int)values.size(), values);
  Prop1Report rep = prop1_limit_check(f, parse_double_list(eps_spec));
  std::ostringstream os;
  os << "eps,ratio,target\n";
  for (std::size_t i = 0; i < rep.eps_grid.size(); ++i)
    os << num(rep.eps_grid[i]) << ',' << num(rep.ratios[i]) << ','
       << num(rep.limit_target) << '\n';
  os << "# final_error_bound: " << num(rep.final_error_bound) << "\n";
  os << kCsvTrailer;
  sink.write("prop1.csv", os.str());
  return rep.within_bound ? 0 : 1;
}

int run_experiment(const std::string& config_path, int threads, Sink& sink) {
  std::ifstream in(config_path);
  if (!in) throw CLI::ValidationError("cannot open config: " + config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw CLI::ValidationError(std::string("config parse error: ") + e.what());
  }
  GridKernel kern = kernel_from_json(cfg.at("kernel"));
  DimensionExperimentConfig ec;
  ec.k_list = cfg.at("k_list").get<std::vector<int>>();
  ec.trials = cfg.at("trials").get<int>();
  ec.eps_grid = cfg.at("eps_grid").get<std::vector<double>>();
  ec.seed = cfg.at("seed").get<std::uint64_t>();
  ec.threads = threads;
  DimensionExperimentReport rep =
      dimension_experiment(kern, ec, cfg.value("id", "experiment"));

  sink.write("report.json", report_to_json(rep, kVersion).dump(2) + "\n");
  for (const auto& [k, pr] : rep.per_k) {
    std::ostringstream os;
    os << "eps,p_hat,k_hat\n";
    for (std::size_t i = 0; i < pr.eps_grid.size(); ++i)
      os << num(pr.eps_grid[i]) << ',' << pr.p_hat[i] << ',' << pr.k_hat[i]
         << '\n';
    os << kCsvTrailer;
    sink.write("packing_k" + std::to_string(k) + ".csv", os.str());
  }
  // Invariant gate: report nonzero if the exact bound ordering is broken.
  if (rep.bounds.lower && *rep.bounds.lower > rep.bounds.upper + 1e-12)
    return 1;
  for (std::size_t i = 1; i < rep.bounds.kn_series.size(); ++i)
    if (rep.bounds.kn_series[i].second + 1e-12 <
        rep.bounds.kn_series[i - 1].second)
      return 1;
  return 0;
}

int dispatch(std::vector<std::string> args, int threads,
             const std::string& out_dir);

int run_replay(const std::string& manifest_path, const std::string& out_dir,
               int threads) {
  std::ifstream in(manifest_path);
  if (!in) throw CLI::ValidationError("cannot open manifest: " + manifest_path);
  json j;
  in >> j;
  RunManifest m = RunManifest::from_json(j);
  std::vector<std::string> args = m.args;
  args.insert(args.begin(), m.subcommand);
  return dispatch(std::move(args), threads, out_dir);
}

// Re-entry point used by both main() and replay.
int dispatch(std::vector<std::string> args, int threads,
             const std::string& out_dir) {
  CLI::App app{"circlab: weighted Gaussian random-matrix laboratory"};
  app.require_subcommand(1);

  Sink sink;
  sink.out_dir = out_dir;
  sink.manifest.started_at = RunManifest::now_iso8601();
  if (!args.empty()) {
    sink.manifest.subcommand = args[0];
    sink.manifest.args.assign(args.begin() + 1, args.end());
  }

  // kernel
  auto* sc_kernel = app.add_subcommand("kernel", "kernel geometry and bounds");
  KernelChoice kc_kernel;
  kc_kernel.add_options(sc_kernel);

  // brown-disk
  auto* sc_brown = app.add_subcommand("brown-disk", "perturbed DT disk law");
  int bd_k = 400, bd_trials = 10;
  double bd_c = 1.0;
  std::string bd_eps = "0.25,0.5,1.0";
  std::uint64_t bd_seed = 0;
  sc_brown->add_option("--k", bd_k, "matrix dimension");
  sc_brown->add_option("--eps", bd_eps, "comma-separated eps list");
  sc_brown->add_option("--c", bd_c, "scale factor");
  sc_brown->add_option("--trials", bd_trials, "trial count");
  sc_brown->add_option("--seed", bd_seed, "random seed");

  // covariance
  auto* sc_cov = app.add_subcommand("covariance", "kernel recovery means");
  KernelChoice kc_cov;
  kc_cov.add_options(sc_cov);
  int cov_k = 64, cov_trials = 100;
  std::uint64_t cov_seed = 0;
  sc_cov->add_option("--k", cov_k, "matrix dimension");
  sc_cov->add_option("--trials", cov_trials, "trial count");
  sc_cov->add_option("--seed", cov_seed, "random seed");

  // dyson check
  auto* sc_dyson = app.add_subcommand("dyson", "triangular ensemble density");
  auto* sc_dyson_check = sc_dyson->add_subcommand("check", "sample and score");
  int dy_k = 16, dy_trials = 10;
  std::uint64_t dy_seed = 0;
  sc_dyson_check->add_option("--k", dy_k, "matrix dimension");
  sc_dyson_check->add_option("--trials", dy_trials, "trial count");
  sc_dyson_check->add_option("--seed", dy_seed, "random seed");
  sc_dyson->require_subcommand(1);

  // packing
  auto* sc_pack = app.add_subcommand("packing", "packing/covering counts");
  std::vector<std::string> pk_cloud;
  std::string pk_gen, pk_eps = "auto";
  int pk_k = 16, pk_m = 12;
  std::uint64_t pk_seed = 0;
  sc_pack->add_option("--cloud", pk_cloud, "matrix files forming the cloud");
  sc_pack->add_option("--generator", pk_gen, "cloud generator (ginibre)");
  sc_pack->add_option("--k", pk_k, "matrix dimension for the generator");
  sc_pack->add_option("--m", pk_m, "cloud size for the generator");
  sc_pack->add_option("--eps", pk_eps, "comma-separated eps list, or auto");
  sc_pack->add_option("--seed", pk_seed, "random seed");

  // prop1
  auto* sc_prop1 = app.add_subcommand("prop1", "regularized log-integral");
  std::string p1_f = "1", p1_eps = "1e-2,1e-4,1e-8";
  sc_prop1->add_option("--f", p1_f, "step function values, comma-separated");
  sc_prop1->add_option("--eps", p1_eps, "comma-separated eps list");

  // experiment
  auto* sc_exp = app.add_subcommand("experiment", "end-to-end orchestration");
  std::string exp_config;
  sc_exp->add_option("--config", exp_config, "JSON config file")->required();

  std::vector<const char*> argv;
  argv.push_back("circlab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse((int)argv.size(), argv.data());
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  int rc = 0;
  if (sc_kernel->parsed()) {
    sink.manifest.seed = 0;
    rc = run_kernel(kc_kernel, sink);
  } else if (sc_brown->parsed()) {
    sink.manifest.seed = bd_seed;
    rc = run_brown_disk(bd_k, parse_double_list(bd_eps), bd_c, bd_trials,
                        bd_seed, threads, sink);
  } else if (sc_cov->parsed()) {
    sink.manifest.seed = cov_seed;
    rc = run_covariance(kc_cov, cov_k, cov_trials, cov_seed, threads, sink);
  } else if (sc_dyson->parsed()) {
    sink.manifest.seed = dy_seed;
    rc = run_dyson(dy_k, dy_trials, dy_seed, threads, sink);
  } else if (sc_pack->parsed()) {
    sink.manifest.seed = pk_seed;
    rc = run_packing(pk_cloud, pk_gen, pk_k, pk_m, pk_eps, pk_seed, sink);
  } else if (sc_prop1->parsed()) {
    rc = run_prop1(p1_f, p1_eps, sink);
  } else if (sc_exp->parsed()) {
    std::ifstream cin_(exp_config);
    if (cin_) {
      json cj;
      try {
        cin_ >> cj;
        sink.manifest.seed = cj.value("seed", std::uint64_t(0));
      } catch (...) {
      }
    }
    rc = run_experiment(exp_config, threads, sink);
  }
  sink.finish();
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  int threads = 1;
  std::string out_dir;
  std::string replay_manifest;

  // Global flags are peeled off before subcommand dispatch so that replay
  // can reuse the recorded argument list verbatim.
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--threads" && i + 1 < args.size()) {
      threads = std::stoi(args[++i]);
    } else if (args[i] == "--out-dir" && i + 1 < args.size()) {
      out_dir = args[++i];
    } else {
      rest.push_back(args[i]);
    }
  }

  try {
    if (!rest.empty() && rest[0] == "replay") {
      CLI::App replay{"replay a recorded run"};
      std::string manifest_path;
      replay.add_option("--manifest", manifest_path, "manifest.json to replay")
          ->required();
      std::vector<const char*> argv2{"replay"};
      for (std::size_t i = 1; i < rest.size(); ++i)
        argv2.push_back(rest[i].c_str());
      try {
        replay.parse((int)argv2.size(), argv2.data());
      } catch (const CLI::ParseError& e) {
        replay.exit(e);
        return 2;
      }
      return run_replay(manifest_path, out_dir, threads);
    }
    return dispatch(rest, threads, out_dir);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const RefinementError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const NanEmitted& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
