#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "atm/common.hpp"
#include "atm/planner.hpp"
#include "atm/world.hpp"

namespace atm {

struct GoalRecord {
    std::string goal_id;
    double weight = 0.0;
};

struct ActionOutcomeRecord {
    std::string action_id;
    std::string outcome_id;
    double weight = 0.0;
};

struct SolutionEntry {
    std::string question_id;
    ScenarioKey scenario;
    std::string method_id;
    double quality = 0.0;
};

struct SolutionHit {
    std::string method_id;
    bool cross_scenario = false;
};

struct HistoryEntry {
    std::int64_t step = 0;
    ScenarioKey scenario;
    std::string summary_id;
    Vec env_delta;  // E_t - E_norm
    bool is_key_state = false;
    std::string action_id;
    bool failure = false;
};

struct GoalTarget {
    std::string goal_id;
    bool operator==(const GoalTarget&) const = default;
};

struct ActionOutcomeTarget {
    std::string action_id;
    std::string outcome_id;
    bool operator==(const ActionOutcomeTarget&) const = default;
};

using WeightTarget = std::variant<GoalTarget, ActionOutcomeTarget>;

// One applied weight update, kept so the whole store can be replayed.
struct WeightUpdate {
    ScenarioKey scenario;
    WeightTarget target;
    double reward = 0.0;
    double eta = 0.0;
    double before = 0.0;
    double after = 0.0;
};

enum class RetrievalMode { Max, Sample };

// Reflection output persisted as experience.
struct ExperienceRecord {
    std::int64_t step = 0;
    ScenarioKey scenario;
    std::vector<Suggestion> suggestions;
};

HistoryEntry make_history_entry(std::int64_t step, const ScenarioKey& scenario, const EnvState& env,
                                const EnvState& env_norm, std::string summary_id, bool is_key_state);

// env_norm + entry.env_delta.
EnvState reconstruct_state(const HistoryEntry& entry, const EnvState& env_norm);

/// Scenario-separated memory.
///
/// Holds the weighted scenario->goal and scenario->(action, outcome) maps,
/// the question->scenario->solution layer, reflection experience, and the
/// chronological process history (newest first). Weights are stored
/// unnormalized and normalized only when sampling. Ties resolve to the
/// record inserted first.
///
/// Single writer; copy the object to hand an immutable snapshot to readers.
class ScenarioMemory {
public:
    // phi maps a reward in [0, 1] to the weight target; identity by default.
    using RewardMap = std::function<double(double)>;

    ScenarioMemory() = default;
    explicit ScenarioMemory(RewardMap phi) : phi_(std::move(phi)) {}

    void add_goal(const ScenarioKey& scenario, const std::string& goal_id, double weight);
    void add_action_outcome(const ScenarioKey& scenario, const std::string& action_id,
                            const std::string& outcome_id, double weight);

    std::string retrieve_goal(const ScenarioKey& scenario, RetrievalMode mode, Rng& rng) const;
    std::pair<std::string, std::string> retrieve_action_outcome(const ScenarioKey& scenario) const;

    const std::vector<GoalRecord>& goals(const ScenarioKey& scenario) const;
    const std::vector<ActionOutcomeRecord>& action_outcomes(const ScenarioKey& scenario) const;
    // Weight of the goal in the scenario divided by the scenario's total; 0 when absent.
    double normalized_goal_weight(const ScenarioKey& scenario, const std::string& goal_id) const;

    // w <- (1 - eta) w + eta phi(r); absent targets start at weight 0.
    double update_weight(const ScenarioKey& scenario, const WeightTarget& target, double reward, double eta);
    const std::vector<WeightUpdate>& update_log() const { return log_; }
    void restore_log(std::vector<WeightUpdate> log) { log_ = std::move(log); }

    // Scenarios holding goal or action/outcome records, in key order.
    std::vector<ScenarioKey> scenarios() const;
    const std::vector<SolutionEntry>& solutions() const { return solutions_; }
    bool analyzed(std::int64_t step) const;

    void store_solution(SolutionEntry entry);
    std::optional<SolutionHit> lookup_solution(const std::string& question_id, const ScenarioKey& scenario) const;

    void record_history(HistoryEntry entry);
    std::vector<HistoryEntry> recall_window(std::int64_t from_step, std::int64_t to_step) const;
    const std::deque<HistoryEntry>& history() const { return history_; }

    // Entries not yet processed by spare-time analysis, newest first.
    std::vector<HistoryEntry> unanalyzed(std::size_t limit) const;
    void mark_analyzed(std::int64_t step);
    std::size_t backlog() const { return history_.size() - analyzed_count_; }

    void store_experience(ExperienceRecord record) { experience_.push_back(std::move(record)); }
    const std::vector<ExperienceRecord>& experience() const { return experience_; }

private:
    RewardMap phi_ = [](double r) { return r; };
    std::unordered_map<ScenarioKey, std::vector<GoalRecord>, ScenarioKeyHash> goals_;
    std::unordered_map<ScenarioKey, std::vector<ActionOutcomeRecord>, ScenarioKeyHash> action_outcomes_;
    std::vector<WeightUpdate> log_;
    std::vector<SolutionEntry> solutions_;
    std::deque<HistoryEntry> history_;  // newest first
    std::deque<bool> analyzed_;         // parallel to history_
    std::size_t analyzed_count_ = 0;
    std::vector<ExperienceRecord> experience_;
};

// Estimates the scenario at step t strictly between two recorded anchors by
// asking the planner to predict, then re-keying its estimate.
ScenarioKey fill_intermediate(const HistoryEntry& first, const HistoryEntry& last, std::int64_t t,
                              PlannerPort& planner, double bucket_width);

}  // namespace atm
