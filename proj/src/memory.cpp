#include "atm/memory.hpp"

#include <algorithm>
#include <cmath>

namespace atm {

namespace {

template <typename Record>
std::size_t argmax_weight(const std::vector<Record>& records) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].weight > records[best].weight) best = i;
    }
    return best;
}

void check_weight(double weight) {
    require(std::isfinite(weight) && weight >= 0.0, "memory: weights must be finite and >= 0");
}

}  // namespace

HistoryEntry make_history_entry(std::int64_t step, const ScenarioKey& scenario, const EnvState& env,
                                const EnvState& env_norm, std::string summary_id, bool is_key_state) {
    require(env.features.size() == env_norm.features.size(), "history entry: env/norm dimension mismatch");
    HistoryEntry entry;
    entry.step = step;
    entry.scenario = scenario;
    entry.summary_id = std::move(summary_id);
    entry.is_key_state = is_key_state;
    entry.env_delta.resize(env.features.size());
    for (std::size_t k = 0; k < env.features.size(); ++k) {
        entry.env_delta[k] = env.features[k] - env_norm.features[k];
    }
    return entry;
}

EnvState reconstruct_state(const HistoryEntry& entry, const EnvState& env_norm) {
    require(entry.env_delta.size() == env_norm.features.size(), "reconstruct_state: dimension mismatch");
    EnvState out;
    out.step = entry.step;
    out.features.resize(env_norm.features.size());
    for (std::size_t k = 0; k < out.features.size(); ++k) {
        out.features[k] = env_norm.features[k] + entry.env_delta[k];
    }
    return out;
}

void ScenarioMemory::add_goal(const ScenarioKey& scenario, const std::string& goal_id, double weight) {
    check_weight(weight);
    auto& records = goals_[scenario];
    for (auto& r : records) {
        if (r.goal_id == goal_id) {
            r.weight = weight;
            return;
        }
    }
    records.push_back({goal_id, weight});
}

void ScenarioMemory::add_action_outcome(const ScenarioKey& scenario, const std::string& action_id,
                                        const std::string& outcome_id, double weight) {
    check_weight(weight);
    auto& records = action_outcomes_[scenario];
    for (auto& r : records) {
        if (r.action_id == action_id && r.outcome_id == outcome_id) {
            r.weight = weight;
            return;
        }
    }
    records.push_back({action_id, outcome_id, weight});
}

const std::vector<GoalRecord>& ScenarioMemory::goals(const ScenarioKey& scenario) const {
    static const std::vector<GoalRecord> empty;
    auto it = goals_.find(scenario);
    return it == goals_.end() ? empty : it->second;
}

const std::vector<ActionOutcomeRecord>& ScenarioMemory::action_outcomes(const ScenarioKey& scenario) const {
    static const std::vector<ActionOutcomeRecord> empty;
    auto it = action_outcomes_.find(scenario);
    return it == action_outcomes_.end() ? empty : it->second;
}

std::string ScenarioMemory::retrieve_goal(const ScenarioKey& scenario, RetrievalMode mode, Rng& rng) const {
    const auto& records = goals(scenario);
    if (records.empty()) throw NotFound("no goals stored for scenario " + to_string(scenario));

    if (mode == RetrievalMode::Sample) {
        double total = 0.0;
        for (const auto& r : records) total += r.weight;
        // All-zero weights carry no preference; fall through to the max rule.
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double acc = 0.0;
            for (const auto& r : records) {
                acc += r.weight;
                if (u < acc) return r.goal_id;
            }
            for (auto it = records.rbegin(); it != records.rend(); ++it) {
                if (it->weight > 0.0) return it->goal_id;
            }
        }
    }
    return records[argmax_weight(records)].goal_id;
}

std::pair<std::string, std::string> ScenarioMemory::retrieve_action_outcome(const ScenarioKey& scenario) const {
    const auto& records = action_outcomes(scenario);
    if (records.empty()) throw NotFound("no action/outcome records for scenario " + to_string(scenario));
    const auto& best = records[argmax_weight(records)];
    return {best.action_id, best.outcome_id};
}

double ScenarioMemory::normalized_goal_weight(const ScenarioKey& scenario, const std::string& goal_id) const {
    const auto& records = goals(scenario);
    double total = 0.0;
    double mine = 0.0;
    for (const auto& r : records) {
        total += r.weight;
        if (r.goal_id == goal_id) mine = r.weight;
    }
    return total > 0.0 ? mine / total : 0.0;
}

double ScenarioMemory::update_weight(const ScenarioKey& scenario, const WeightTarget& target, double reward,
                                     double eta) {
    require(eta > 0.0 && eta <= 1.0, "update_weight: eta must lie in (0, 1]");
    require(std::isfinite(reward), "update_weight: reward must be finite");
    const double mapped = phi_(reward);

    double* weight = nullptr;
    if (const auto* g = std::get_if<GoalTarget>(&target)) {
        auto& records = goals_[scenario];
        auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) { return r.goal_id == g->goal_id; });
        if (it == records.end()) {
            records.push_back({g->goal_id, 0.0});
            it = std::prev(records.end());
        }
        weight = &it->weight;
    } else {
        const auto& ao = std::get<ActionOutcomeTarget>(target);
        auto& records = action_outcomes_[scenario];
        auto it = std::find_if(records.begin(), records.end(), [&](const auto& r) {
            return r.action_id == ao.action_id && r.outcome_id == ao.outcome_id;
        });
        if (it == records.end()) {
            records.push_back({ao.action_id, ao.outcome_id, 0.0});
            it = std::prev(records.end());
        }
        weight = &it->weight;
    }

    const double before = *weight;
    *weight = (1.0 - eta) * before + eta * mapped;
    log_.push_back({scenario, target, reward, eta, before, *weight});
    return *weight;
}

std::vector<ScenarioKey> ScenarioMemory::scenarios() const {
    std::vector<ScenarioKey> keys;
    for (const auto& [k, v] : goals_) keys.push_back(k);
    for (const auto& [k, v] : action_outcomes_) {
        if (!goals_.contains(k)) keys.push_back(k);
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

void ScenarioMemory::store_solution(SolutionEntry entry) {
    require(entry.quality >= 0.0 && entry.quality <= 1.0, "store_solution: quality must lie in [0, 1]");
    for (auto& s : solutions_) {
        if (s.question_id == entry.question_id && s.scenario == entry.scenario) {
            s = std::move(entry);
            return;
        }
    }
    solutions_.push_back(std::move(entry));
}

std::optional<SolutionHit> ScenarioMemory::lookup_solution(const std::string& question_id,
                                                           const ScenarioKey& scenario) const {
    const SolutionEntry* best = nullptr;
    for (const auto& s : solutions_) {
        if (s.question_id != question_id) continue;
        if (s.scenario == scenario) return SolutionHit{s.method_id, false};
        if (best == nullptr || s.quality > best->quality) best = &s;
    }
    if (best == nullptr) return std::nullopt;
    return SolutionHit{best->method_id, true};
}

void ScenarioMemory::record_history(HistoryEntry entry) {
    if (!history_.empty()) {
        require(entry.step > history_.front().step, "record_history: steps must be strictly increasing");
    }
    history_.push_front(std::move(entry));
    analyzed_.push_front(false);
}

std::vector<HistoryEntry> ScenarioMemory::recall_window(std::int64_t from_step, std::int64_t to_step) const {
    std::vector<HistoryEntry> out;
    for (const auto& e : history_) {
        if (e.step < from_step) break;
        if (e.step <= to_step) out.push_back(e);
    }
    return out;
}

std::vector<HistoryEntry> ScenarioMemory::unanalyzed(std::size_t limit) const {
    std::vector<HistoryEntry> out;
    for (std::size_t i = 0; i < history_.size() && out.size() < limit; ++i) {
        if (!analyzed_[i]) out.push_back(history_[i]);
    }
    return out;
}

void ScenarioMemory::mark_analyzed(std::int64_t step) {
    // history_ is ordered by decreasing step.
    auto it = std::lower_bound(history_.begin(), history_.end(), step,
                               [](const HistoryEntry& e, std::int64_t s) { return e.step > s; });
    if (it == history_.end() || it->step != step) return;
    const auto idx = static_cast<std::size_t>(it - history_.begin());
    if (!analyzed_[idx]) {
        analyzed_[idx] = true;
        ++analyzed_count_;
    }
}

bool ScenarioMemory::analyzed(std::int64_t step) const {
    auto it = std::lower_bound(history_.begin(), history_.end(), step,
                               [](const HistoryEntry& e, std::int64_t s) { return e.step > s; });
    if (it == history_.end() || it->step != step) return false;
    return analyzed_[static_cast<std::size_t>(it - history_.begin())];
}

ScenarioKey fill_intermediate(const HistoryEntry& first, const HistoryEntry& last, std::int64_t t,
                              PlannerPort& planner, double bucket_width) {
    require(first.step < t && t < last.step, "fill_intermediate: t must lie strictly between the anchors");
    PlanRequest request;
    request.kind = PlanKind::Predict;
    request.env.step = t;
    request.scenario = first.scenario;
    request.context = PredictContext{first.scenario, first.step, last.scenario, last.step, t, bucket_width};
    const PlanResponse response = planner.handle(request);
    if (response.expected_envs.empty()) throw NotFound("planner returned no prediction");
    return quantize(response.expected_envs.front().features, bucket_width);
}

}  // namespace atm
