#include "contagion/manifest.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace contagion {

std::string to_json(const RunManifest& manifest) {
  nlohmann::json j;
  j["subcommand"] = manifest.subcommand;
  nlohmann::json cfg = nlohmann::json::parse(manifest.config_json, nullptr,
                                             /*allow_exceptions=*/false);
  j["config"] = cfg.is_discarded() ? nlohmann::json(manifest.config_json) : cfg;
  j["master_seed"] = manifest.master_seed;
  j["artifacts"] = manifest.artifacts;
  j["tool_version"] = manifest.tool_version;
  j["duration_seconds"] = manifest.duration_seconds;
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << to_json(manifest);
}

}  // namespace contagion
