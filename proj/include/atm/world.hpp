#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "atm/common.hpp"

namespace atm {

// Environmental state E_t: an opaque, fixed-dimension feature vector.
struct EnvState {
    Vec features;
    std::int64_t step = 0;
};

// Internal system state S_t.
struct SysState {
    Vec features;
    std::int64_t step = 0;
};

// Discretized (env, sys) snapshot used to index memory.
struct ScenarioKey {
    std::vector<std::int64_t> buckets;

    auto operator<=>(const ScenarioKey&) const = default;
    bool operator==(const ScenarioKey&) const = default;
};

std::string to_string(const ScenarioKey& key);

struct ScenarioKeyHash {
    std::size_t operator()(const ScenarioKey& key) const noexcept;
};

double env_difference(const EnvState& a, const EnvState& b, Norm norm = Norm::L2);

// floor(feature / bucket_width) per coordinate of concat(env, sys).
ScenarioKey scenario_key(const EnvState& env, const SysState& sys, double bucket_width);
ScenarioKey quantize(std::span<const double> features, double bucket_width);
Vec bucket_center(const ScenarioKey& key, double bucket_width);

struct ChangeDetectorState {
    EnvState last_env;
    double theta_e = 0.0;
    std::int64_t last_trigger_step = -1;
};

struct ChangeResult {
    bool changed = false;
    double delta = 0.0;
};

// Single-lag test: changed iff ||last_env - e|| > theta_e. Updates last_env.
ChangeResult detect_change(ChangeDetectorState& det, const EnvState& e, Norm norm = Norm::L2);

struct ChangeDetectorConfig {
    double theta_e = 0.5;
    // 1 = single-lag difference; W > 1 compares the means of the two most
    // recent disjoint windows of W observations.
    std::size_t window = 1;
    Norm norm = Norm::L2;
};

/// Change detector owned by one agent loop.
///
/// With window == 1 this is exactly detect_change(). The windowed variant is
/// meant for noisy observation streams: it stays silent until 2W samples have
/// been seen since the last trigger, then fires when the mean of the latest W
/// observations departs from the mean of the W before them by more than
/// theta_e. Both buffers are cleared after a trigger.
class ChangeDetector {
public:
    explicit ChangeDetector(ChangeDetectorConfig cfg);

    ChangeResult observe(const EnvState& e);
    void reset();

    std::int64_t last_trigger_step() const { return last_trigger_step_; }
    const ChangeDetectorConfig& config() const { return cfg_; }

private:
    ChangeDetectorConfig cfg_;
    std::optional<ChangeDetectorState> single_;
    std::deque<Vec> recent_;
    std::int64_t last_trigger_step_ = -1;
};

}  // namespace atm
