#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "psiart/creative.hpp"
#include "psiart/memory.hpp"

namespace psiart {

// Every tunable constant of the engine in one block. Loaded from JSON; keys
// that are absent keep their defaults.
struct EngineConfig {
  MemoryConfig memory;
  CreativeConfig creative;
  std::string face_domain = "faces";
  int min_face_templates = 5;
  // Domains not listed here use the grid crop policy.
  std::map<std::string, CropPolicy> crop_policies{{"faces", CropPolicy::whole_image()}};

  const CropPolicy& crop_policy(const std::string& domain) const;
};

nlohmann::json to_json(const EngineConfig& c);
EngineConfig engine_config_from_json(const nlohmann::json& j);
EngineConfig load_engine_config(const std::filesystem::path& path);

nlohmann::json to_json(const SomConfig& c);
SomConfig som_config_from_json(const nlohmann::json& j, SomConfig defaults = {});

}  // namespace psiart
