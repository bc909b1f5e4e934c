#ifndef CIRCLAB_IO_HPP
#define CIRCLAB_IO_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "circlab/complex_matrix.hpp"
#include "circlab/dimension.hpp"
#include "circlab/grid_kernel.hpp"
#include "circlab/spectra.hpp"

namespace circlab {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- kernel spec files ----
// JSON document { "n": int, "cells": [ {"i","j","fill","value"} ] } with
// 1-based cell indices, fill "full" or "tri", omitted cells Empty.

inline GridKernel kernel_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer())
    throw ParseError("kernel spec: missing integer field \"n\"");
  int n = j["n"].get<int>();
  if (n < 1) throw ParseError("kernel spec: n must be >= 1");
  GridKernel k(n);
  if (!j.contains("cells")) return k;
  if (!j["cells"].is_array())
    throw ParseError("kernel spec: \"cells\" must be an array");
  for (const auto& c : j["cells"]) {
    for (const char* field : {"i", "j", "fill", "value"})
      if (!c.contains(field))
        throw ParseError(std::string("kernel spec: cell missing field \"") +
                         field + "\"");
    int i = c["i"].get<int>(), jj = c["j"].get<int>();
    if (i < 1 || i > n || jj < 1 || jj > n)
      throw ParseError("kernel spec: cell (" + std::to_string(i) + "," +
                       std::to_string(jj) + ") out of range");
    std::string fill = c["fill"].get<std::string>();
    double v = c["value"].get<double>();
    if (fill == "full")
      k.set(i - 1, jj - 1, CellFill::Full, v);
    else if (fill == "tri")
      k.set(i - 1, jj - 1, CellFill::UpperTri, v);
    else
      throw ParseError("kernel spec: fill must be \"full\" or \"tri\"");
  }
  return k;
}

inline GridKernel load_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open kernel spec: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("kernel spec " + path + ": " + e.what());
  }
  return kernel_from_json(j);
}

/// Canonical form: cells sorted by (i,j), Empty cells omitted.
inline nlohmann::json kernel_to_json(const GridKernel& k) {
  nlohmann::json cells = nlohmann::json::array();
  for (int i = 0; i < k.n(); ++i)
    for (int j = 0; j < k.n(); ++j) {
      const Cell& c = k.at(i, j);
      if (c.fill == CellFill::Empty) continue;
      cells.push_back({{"i", i + 1},
                       {"j", j + 1},
                       {"fill", c.fill == CellFill::Full ? "full" : "tri"},
                       {"value", c.value}});
    }
  return {{"n", k.n()}, {"cells", cells}};
}

// ---- matrix persistence ----

/// CSV with header "i,j,re,im", 0-based indices.
inline void save_matrix_csv(const ComplexMatrix& x, std::ostream& out) {
  out << "i,j,re,im\n";
  out << std::setprecision(17);
  for (int r = 0; r < x.k; ++r)
    for (int c = 0; c < x.k; ++c)
      out << r << ',' << c << ',' << x(r, c).real() << ',' << x(r, c).imag()
          << '\n';
}

inline ComplexMatrix load_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("i,j,re,im", 0) != 0)
    throw ParseError("matrix CSV: missing \"i,j,re,im\" header");
  struct Entry {
    int i, j;
    double re, im;
  };
  std::vector<Entry> entries;
  int kmax = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    Entry e;
    char c1, c2, c3;
    std::istringstream ls(line);
    if (!(ls >> e.i >> c1 >> e.j >> c2 >> e.re >> c3 >> e.im) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      throw ParseError("matrix CSV: bad row: " + line);
    kmax = std::max({kmax, e.i, e.j});
    entries.push_back(e);
  }
  if (kmax < 0) throw ParseError("matrix CSV: no entries");
  ComplexMatrix x(kmax + 1);
  for (const Entry& e : entries) x(e.i, e.j) = {e.re, e.im};
  return x;
}

// Raw format: 16-byte header (magic "CMPXMAT1", u32 k, u32 reserved), then
// little-endian float64 interleaved re/im, row-major.
inline constexpr char kMatrixMagic[8] = {'C', 'M', 'P', 'X', 'M', 'A', 'T', '1'};

inline void save_matrix_raw(const ComplexMatrix& x, std::ostream& out) {
  out.write(kMatrixMagic, 8);
  std::uint32_t k = std::uint32_t(x.k), reserved = 0;
  out.write(reinterpret_cast<const char*>(&k), 4);
  out.write(reinterpret_cast<const char*>(&reserved), 4);
  for (const cplx& e : x.entries) {
    double re = e.real(), im = e.imag();
    out.write(reinterpret_cast<const char*>(&re), 8);
    out.write(reinterpret_cast<const char*>(&im), 8);
  }
}

inline ComplexMatrix load_matrix_raw(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMatrixMagic, 8) != 0)
    throw ParseError("raw matrix: bad magic");
  std::uint32_t k = 0, reserved = 0;
  in.read(reinterpret_cast<char*>(&k), 4);
  in.read(reinterpret_cast<char*>(&reserved), 4);
  if (!in || k < 1) throw ParseError("raw matrix: bad header");
  ComplexMatrix x{int(k)};
  for (cplx& e : x.entries) {
    double re, im;
    in.read(reinterpret_cast<char*>(&re), 8);
    in.read(reinterpret_cast<char*>(&im), 8);
    if (!in) throw ParseError("raw matrix: truncated payload");
    e = {re, im};
  }
  return x;
}

// ---- spectral dumps ----

inline void save_eigenvalues_csv(const SpectralSample& s, std::ostream& out) {
  out << "re,im\n" << std::setprecision(17);
  for (const cplx& z : s.eigenvalues)
    out << z.real() << ',' << z.imag() << '\n';
}

/// Radial CDF against the uniform-disk law, for plotting.
inline void save_radial_cdf_csv(const SpectralSample& s, double r_max,
                                std::ostream& out) {
  out << "r,F_emp,F_theory\n" << std::setprecision(17);
  int k = (int)s.radii_sorted.size();
  for (int i = 0; i < k; ++i) {
    double r = s.radii_sorted[i];
    double f = std::min(1.0, (r / r_max) * (r / r_max));
    out << r << ',' << double(i + 1) / k << ',' << f << '\n';
  }
}

// ---- experiment report ----

inline nlohmann::json bounds_to_json(const DimensionBounds& b) {
  nlohmann::json h = {{"holds", b.hypothesis.holds}};
  if (b.hypothesis.holds) {
    h["r"] = *b.hypothesis.r;
    h["c"] = *b.hypothesis.c;
  } else {
    h["failure_reason"] = *b.hypothesis.failure_reason;
  }
  nlohmann::json kn = nlohmann::json::array();
  for (auto [N, v] : b.kn_series) kn.push_back({{"N", N}, {"value", v}});
  nlohmann::json j = {{"upper", b.upper}, {"hypothesis", h}, {"kn_series", kn}};
  if (b.lower)
    j["lower"] = *b.lower;
  else
    j["lower"] = nullptr;
  return j;
}

inline nlohmann::json report_to_json(const DimensionExperimentReport& r,
                                     const std::string& version) {
  nlohmann::json per_k = nlohmann::json::array();
  for (const auto& [k, pr] : r.per_k) {
    per_k.push_back({{"k", k},
                     {"eps_grid", pr.eps_grid},
                     {"p_hat", pr.p_hat},
                     {"k_hat", pr.k_hat},
                     {"slope", pr.slope},
                     {"fit_residual", std::isfinite(pr.fit_residual)
                                          ? nlohmann::json(pr.fit_residual)
                                          : nlohmann::json(nullptr)}});
  }
  return {{"kernel", r.kernel_id},
          {"version", version},
          {"seed", r.config.seed},
          {"trials", r.config.trials},
          {"k_list", r.config.k_list},
          {"eps_grid", r.config.eps_grid},
          {"bounds", bounds_to_json(r.bounds)},
          {"per_k", per_k}};
}

}  // namespace circlab

#endif
