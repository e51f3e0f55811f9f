#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "atm/goal.hpp"
#include "atm/world.hpp"

namespace atm {

enum class PlanKind { Plan, Replan, Predict, Reflect, Intuition };

std::string_view to_string(PlanKind kind);
PlanKind parse_plan_kind(std::string_view name);

struct PlanStage {
    EnvState expected_env;
    std::string action;
};

enum class ReplanTrigger { Checkpoint, Noncompliance };

// Checkpoint replans carry the deviation (expected - observed) at the current
// stage and the remaining plan suffix; non-compliance replans ask for a fresh
// sub-plan for the request's (scenario, goal).
struct ReplanContext {
    ReplanTrigger trigger = ReplanTrigger::Checkpoint;
    EnvState observed_env;
    Vec deviation;
    std::vector<PlanStage> remaining;
    double rho = 0.0;
};

struct PredictContext {
    ScenarioKey first;
    std::int64_t first_step = 0;
    ScenarioKey last;
    std::int64_t last_step = 0;
    std::int64_t target_step = 0;
    double bucket_width = 1.0;
};

struct TraceStep {
    std::int64_t step = 0;
    ScenarioKey scenario;
    std::string action;
    bool compliant = true;
    double cost = 0.0;
};

struct ReflectContext {
    std::vector<TraceStep> summary;
    double theta_eff = 0.0;
};

using PlanContext = std::variant<std::monostate, ReplanContext, PredictContext, ReflectContext>;

struct PlanRequest {
    PlanKind kind = PlanKind::Plan;
    EnvState env;
    SysState sys;
    Goal goal;
    ScenarioKey scenario;
    PlanContext context;
};

// Structured improvement record returned by reflection.
struct Suggestion {
    std::int64_t target_step = 0;
    std::string proposed_change;
    std::string rationale_code;

    bool operator==(const Suggestion&) const = default;
};

struct PlanResponse {
    std::vector<std::string> actions;
    std::vector<EnvState> expected_envs;
    std::vector<Suggestion> suggestions;
};

/// Stand-in for the language-model calls of the agent: plan, replan,
/// predict, reflect, intuition. Implementations must tolerate sequential
/// reuse; one instance is never called concurrently by the same agent.
class PlannerPort {
public:
    virtual ~PlannerPort() = default;
    virtual PlanResponse handle(const PlanRequest& request) = 0;
};

/// Deterministic table-driven planner.
class ScriptedPlanner final : public PlannerPort {
public:
    struct Entry {
        std::vector<std::string> actions;
        // Optional; when empty the request's env is repeated per action.
        std::vector<EnvState> expected_envs;
    };

    void add_plan(const ScenarioKey& scenario, const std::string& goal_id, Entry entry);
    void set_default_plan(Entry entry) { default_plan_ = std::move(entry); }
    void add_intuition(const ScenarioKey& scenario, std::string action);
    void set_default_intuition(std::string action) { default_intuition_ = std::move(action); }

    PlanResponse handle(const PlanRequest& request) override;

private:
    PlanResponse lookup_plan(const PlanRequest& request) const;
    PlanResponse replan(const PlanRequest& request) const;
    PlanResponse predict(const PlanRequest& request) const;
    PlanResponse reflect(const PlanRequest& request) const;
    PlanResponse intuition(const PlanRequest& request) const;

    std::map<std::pair<ScenarioKey, std::string>, Entry> table_;
    std::optional<Entry> default_plan_;
    std::map<ScenarioKey, std::string> intuition_;
    std::optional<std::string> default_intuition_;
};

class PlannerError : public std::runtime_error {
public:
    enum class Kind { Timeout, Schema, Transport };

    PlannerError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Client for an out-of-process planner speaking the JSON-over-HTTP protocol.
class ExternalPlanner final : public PlannerPort {
public:
    ExternalPlanner(std::string endpoint, std::chrono::milliseconds timeout);

    PlanResponse handle(const PlanRequest& request) override;

private:
    std::string base_url_;
    std::string path_;
    std::chrono::milliseconds timeout_;
};

/// Routes requests to `primary`; any PlannerError is logged and the request
/// is answered by `fallback` instead.
class FallbackPlanner final : public PlannerPort {
public:
    FallbackPlanner(std::unique_ptr<PlannerPort> primary, std::shared_ptr<PlannerPort> fallback);

    PlanResponse handle(const PlanRequest& request) override;
    std::size_t fallback_count() const { return fallback_count_; }

private:
    std::unique_ptr<PlannerPort> primary_;
    std::shared_ptr<PlannerPort> fallback_;
    std::size_t fallback_count_ = 0;
};

inline constexpr std::int64_t kDefaultPlannerTimeoutMs = 2000;
inline constexpr const char* kPlannerUrlEnv = "ATM_PLANNER_URL";

// The scripted planner, wrapped with an external client when ATM_PLANNER_URL is set.
std::shared_ptr<PlannerPort> planner_from_environment(std::shared_ptr<PlannerPort> scripted,
                                                      std::chrono::milliseconds timeout);

}  // namespace atm
