#pragma once

#include <filesystem>

#include <json.hpp>

#include "atm/memory.hpp"

// Versioned JSON snapshot of a ScenarioMemory:
// {"version": 1, "goals": [{"scenario": [..], "records": [{"goal_id", "weight"}]}],
//  "action_outcomes": [...], "solutions": [...], "history": [...],
//  "experience": [...], "update_log": [...]}
namespace atm::snapshot {

inline constexpr int kVersion = 1;

nlohmann::json to_json(const ScenarioMemory& memory);
// Throws ConfigError on an unknown version or malformed content.
ScenarioMemory from_json(const nlohmann::json& doc);

void save(const ScenarioMemory& memory, const std::filesystem::path& path);
ScenarioMemory load(const std::filesystem::path& path);

}  // namespace atm::snapshot
