#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace contagion {

inline constexpr const char* kToolVersion = "contagion 1.0.0";

/// Record of one CLI run: enough to reproduce every artifact bit-for-bit.
struct RunManifest {
  std::string subcommand;
  std::string config_json;     // resolved configuration, serialised
  std::uint64_t master_seed = 0;
  std::vector<std::string> artifacts;
  std::string tool_version = kToolVersion;
  double duration_seconds = 0.0;
};

/// Serialises the manifest as JSON (stable key order).
std::string to_json(const RunManifest& manifest);

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace contagion
