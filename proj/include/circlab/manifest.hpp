#ifndef CIRCLAB_MANIFEST_HPP
#define CIRCLAB_MANIFEST_HPP

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace circlab {

inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a 64-bit digest of a file, as 16 hex digits.
inline std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= std::uint8_t(buf[i]);
      h *= 0x100000001B3ULL;
    }
    if (!in) break;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// Every run with an output directory emits a manifest; replaying it
// reproduces all deterministic outputs byte-for-byte (timestamps live only
// in the manifest itself, never in output files).
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> args;  // full CLI argument list after the command
  std::uint64_t seed = 0;
  std::string version = kVersion;
  std::string started_at;
  std::string finished_at;
  std::vector<std::pair<std::string, std::string>> outputs;  // file, digest

  static std::string now_iso8601() {
    auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
  }

  nlohmann::json to_json() const {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& [f, d] : outputs)
      outs.push_back({{"file", f}, {"digest", d}});
    return {{"subcommand", subcommand}, {"args", args},
            {"seed", seed},             {"version", version},
            {"started_at", started_at}, {"finished_at", finished_at},
            {"outputs", outs}};
  }

  static RunManifest from_json(const nlohmann::json& j) {
    RunManifest m;
    m.subcommand = j.at("subcommand").get<std::string>();
    m.args = j.at("args").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    for (const auto& o : j.at("outputs"))
      m.outputs.emplace_back(o.at("file").get<std::string>(),
                             o.at("digest").get<std::string>());
    return m;
  }
};

}  // namespace circlab

#endif
