#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "atm/common.hpp"

namespace atm::simlab {

using nlohmann::json;

struct Thresholds {
    double theta_e = 0.5;
    double theta_create = 0.4;
    double theta_delete = 0.2;
    double theta_ckpt = 0.0;
    double theta_f = 0.3;
    double theta_s_state = 0.05;
    double theta_contra = 0.5;
    double theta_ind = 0.5;
    double theta_ext = 0.5;
    double theta_sim = 0.5;
    double theta_t = 0.5;
    double theta_s_spatial = 0.5;
    double theta_cooccur = 0.5;
    double theta_eff = 1.0;
};

/// Parsed experiment configuration.
///
/// Sections are kept as raw JSON and read by each runner with defaults;
/// unknown top-level keys are rejected.
struct SimConfig {
    json world = json::object();
    json selector = json::object();
    json tasking = json::object();
    json executor = json::object();
    json measurement = json::object();
    json patterns = json::object();
    json acceptance = json::object();
    Thresholds thresholds;
    std::vector<std::uint64_t> seeds;

    json echo() const;
};

SimConfig parse_config(const json& doc);
SimConfig load_config(const std::filesystem::path& path);

// Seeds 0..n-1.
std::vector<std::uint64_t> seed_range(std::size_t n);
// "20" -> 0..19, "3,5,8" -> {3, 5, 8}.
std::vector<std::uint64_t> parse_seeds(const std::string& spec);

// Typed lookup with a default; a present key of the wrong type is a ConfigError.
template <typename T>
T get_or(const json& section, const char* key, T fallback) {
    if (!section.is_object() || !section.contains(key)) return fallback;
    try {
        return section.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

}  // namespace atm::simlab
