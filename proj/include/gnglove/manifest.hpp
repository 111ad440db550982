#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnglove/util.hpp"

namespace gnglove {

#ifndef GNGLOVE_VERSION
#define GNGLOVE_VERSION "0.0.0"
#endif

/// Reproducibility record written next to every output artifact. Replaying
/// the recorded argv must regenerate the outputs byte for byte.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;
  std::map<std::string, std::string> flags;  // resolved values, incl. defaults
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string version = GNGLOVE_VERSION;
  double wallclock_s = 0.0;
};

inline void write_manifest(const RunManifest& m, const std::string& path) {
  nlohmann::json j;
  j["subcommand"] = m.subcommand;
  j["argv"] = m.argv;
  j["flags"] = m.flags;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["wallclock_s"] = m.wallclock_s;
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

inline RunManifest read_manifest(const std::string& path) {
  auto in = open_input(path);
  nlohmann::json j = nlohmann::json::parse(in);
  RunManifest m;
  m.subcommand = j.at("subcommand").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.flags = j.at("flags").get<std::map<std::string, std::string>>();
  m.inputs = j.at("inputs").get<std::vector<std::string>>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.version = j.at("version").get<std::string>();
  m.wallclock_s = j.at("wallclock_s").get<double>();
  return m;
}

}  // namespace gnglove
