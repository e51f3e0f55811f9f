#include "atm/snapshot.hpp"

#include <fstream>

namespace atm::snapshot {

using nlohmann::json;

namespace {

json key_json(const ScenarioKey& key) { return key.buckets; }

ScenarioKey key_from(const json& j) { return ScenarioKey{j.get<std::vector<std::int64_t>>()}; }

json target_json(const WeightTarget& target) {
    if (const auto* g = std::get_if<GoalTarget>(&target)) return {{"goal_id", g->goal_id}};
    const auto& ao = std::get<ActionOutcomeTarget>(target);
    return {{"action_id", ao.action_id}, {"outcome_id", ao.outcome_id}};
}

WeightTarget target_from(const json& j) {
    if (j.contains("goal_id")) return GoalTarget{j.at("goal_id").get<std::string>()};
    return ActionOutcomeTarget{j.at("action_id").get<std::string>(), j.at("outcome_id").get<std::string>()};
}

}  // namespace

json to_json(const ScenarioMemory& memory) {
    json doc;
    doc["version"] = kVersion;
    doc["goals"] = json::array();
    doc["action_outcomes"] = json::array();
    for (const ScenarioKey& key : memory.scenarios()) {
        if (const auto& goals = memory.goals(key); !goals.empty()) {
            json records = json::array();
            for (const auto& g : goals) records.push_back({{"goal_id", g.goal_id}, {"weight", g.weight}});
            doc["goals"].push_back({{"scenario", key_json(key)}, {"records", records}});
        }
        if (const auto& aos = memory.action_outcomes(key); !aos.empty()) {
            json records = json::array();
            for (const auto& r : aos) {
                records.push_back({{"action_id", r.action_id}, {"outcome_id", r.outcome_id}, {"weight", r.weight}});
            }
            doc["action_outcomes"].push_back({{"scenario", key_json(key)}, {"records", records}});
        }
    }

    doc["solutions"] = json::array();
    for (const auto& s : memory.solutions()) {
        doc["solutions"].push_back({{"question_id", s.question_id},
                                    {"scenario", key_json(s.scenario)},
                                    {"method_id", s.method_id},
                                    {"quality", s.quality}});
    }

    // Oldest first so that loading replays record_history in order.
    doc["history"] = json::array();
    const auto& history = memory.history();
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        doc["history"].push_back({{"step", it->step},
                                  {"scenario", key_json(it->scenario)},
                                  {"summary_id", it->summary_id},
                                  {"env_delta", it->env_delta},
                                  {"is_key_state", it->is_key_state},
                                  {"action_id", it->action_id},
                                  {"failure", it->failure},
                                  {"analyzed", memory.analyzed(it->step)}});
    }

    doc["experience"] = json::array();
    for (const auto& rec : memory.experience()) {
        json suggestions = json::array();
        for (const auto& s : rec.suggestions) {
            suggestions.push_back({{"target_step", s.target_step},
                                   {"proposed_change", s.proposed_change},
                                   {"rationale_code", s.rationale_code}});
        }
        doc["experience"].push_back(
            {{"step", rec.step}, {"scenario", key_json(rec.scenario)}, {"suggestions", suggestions}});
    }

    doc["update_log"] = json::array();
    for (const auto& u : memory.update_log()) {
        doc["update_log"].push_back({{"scenario", key_json(u.scenario)},
                                     {"target", target_json(u.target)},
                                     {"reward", u.reward},
                                     {"eta", u.eta},
                                     {"before", u.before},
                                     {"after", u.after}});
    }
    return doc;
}

ScenarioMemory from_json(const json& doc) {
    try {
        const int version = doc.at("version").get<int>();
        if (version != kVersion) {
            throw ConfigError("memory snapshot: unsupported version " + std::to_string(version));
        }
        ScenarioMemory memory;
        for (const auto& block : doc.at("goals")) {
            const ScenarioKey key = key_from(block.at("scenario"));
            for (const auto& r : block.at("records")) {
                memory.add_goal(key, r.at("goal_id").get<std::string>(), r.at("weight").get<double>());
            }
        }
        for (const auto& block : doc.at("action_outcomes")) {
            const ScenarioKey key = key_from(block.at("scenario"));
            for (const auto& r : block.at("records")) {
                memory.add_action_outcome(key, r.at("action_id").get<std::string>(),
                                          r.at("outcome_id").get<std::string>(), r.at("weight").get<double>());
            }
        }
        for (const auto& s : doc.at("solutions")) {
            memory.store_solution({s.at("question_id").get<std::string>(), key_from(s.at("scenario")),
                                   s.at("method_id").get<std::string>(), s.at("quality").get<double>()});
        }
        std::vector<std::int64_t> analyzed;
        for (const auto& h : doc.at("history")) {
            HistoryEntry entry;
            entry.step = h.at("step").get<std::int64_t>();
            entry.scenario = key_from(h.at("scenario"));
            entry.summary_id = h.at("summary_id").get<std::string>();
            entry.env_delta = h.at("env_delta").get<Vec>();
            entry.is_key_state = h.at("is_key_state").get<bool>();
            entry.action_id = h.value("action_id", std::string{});
            entry.failure = h.value("failure", false);
            if (h.value("analyzed", false)) analyzed.push_back(entry.step);
            memory.record_history(std::move(entry));
        }
        for (std::int64_t step : analyzed) memory.mark_analyzed(step);
        for (const auto& e : doc.at("experience")) {
            ExperienceRecord rec;
            rec.step = e.at("step").get<std::int64_t>();
            rec.scenario = key_from(e.at("scenario"));
            for (const auto& s : e.at("suggestions")) {
                rec.suggestions.push_back({s.at("target_step").get<std::int64_t>(),
                                           s.at("proposed_change").get<std::string>(),
                                           s.at("rationale_code").get<std::string>()});
            }
            memory.store_experience(std::move(rec));
        }
        std::vector<WeightUpdate> log;
        for (const auto& u : doc.at("update_log")) {
            log.push_back({key_from(u.at("scenario")), target_from(u.at("target")), u.at("reward").get<double>(),
                           u.at("eta").get<double>(), u.at("before").get<double>(), u.at("after").get<double>()});
        }
        memory.restore_log(std::move(log));
        return memory;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("memory snapshot: ") + e.what());
    } catch (const ContractViolation& e) {
        throw ConfigError(std::string("memory snapshot: ") + e.what());
    }
}

void save(const ScenarioMemory& memory, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write memory snapshot to " + path.string());
    out << to_json(memory).dump(2) << '\n';
}

ScenarioMemory load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read memory snapshot " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("memory snapshot " + path.string() + ": " + e.what());
    }
    return from_json(doc);
}

}  // namespace atm::snapshot
