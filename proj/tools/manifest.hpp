#pragma once

#include <citeflow/io.hpp>
#include <citeflow/types.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <ctime>
#include <map>
#include <string>
#include <vector>

namespace citeflow::cli {

// Run record written next to a command's outputs as <name>.manifest.json.
// Carries the invocation, input fingerprints, settings, counters, and wall
// times. The timestamp makes manifests the one output that is not
// byte-reproducible; every other artifact is.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, fnv1a64 hex)
  std::vector<std::string> outputs;
  nlohmann::json settings = nlohmann::json::object();
  nlohmann::json counts = nlohmann::json::object();
  std::map<std::string, double> wall_seconds;

  void add_input(const std::string& path) { inputs.emplace_back(path, to_hex64(fnv1a64_file(path))); }

  void write(const std::string& path) const {
    nlohmann::json j;
    j["tool_version"] = kToolVersion;
    j["command"] = command;
    j["argv"] = argv;
    auto in = nlohmann::json::object();
    for (const auto& [p, h] : inputs) in[p] = h;
    j["inputs"] = in;
    j["outputs"] = outputs;
    j["settings"] = settings;
    j["counts"] = counts;
    j["wall_seconds"] = wall_seconds;
    j["generated_at"] = iso_now();
    write_file(path, j.dump(2) + "\n");
  }

  static std::string iso_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }
};

struct Stopwatch {
  std::chrono::steady_clock::time_point last = std::chrono::steady_clock::now();

  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last).count();
    last = now;
    return s;
  }
};

}  // namespace citeflow::cli
