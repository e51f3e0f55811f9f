#include "atm/planner_wire.hpp"

namespace atm::wire {

namespace {

[[noreturn]] void schema_error(const std::string& what) {
    throw PlannerError(PlannerError::Kind::Schema, "planner schema violation: " + what);
}

json env_json(const Vec& features, std::int64_t step) {
    return json{{"features", features}, {"step", step}};
}

Vec numbers(const json& j, const char* field) {
    if (!j.is_array()) schema_error(std::string(field) + " must be an array of numbers");
    Vec out;
    out.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) schema_error(std::string(field) + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

ScenarioKey key_from(const json& j, const char* field) {
    if (!j.is_array()) schema_error(std::string(field) + " must be an array of integers");
    ScenarioKey key;
    for (const auto& x : j) {
        if (!x.is_number_integer()) schema_error(std::string(field) + " must be an array of integers");
        key.buckets.push_back(x.get<std::int64_t>());
    }
    return key;
}

EnvState env_from(const json& j) {
    if (!j.is_object()) schema_error("env state must be an object");
    EnvState e;
    e.features = numbers(j.at("features"), "features");
    e.step = j.value("step", std::int64_t{0});
    return e;
}

json context_json(const PlanContext& context) {
    if (const auto* r = std::get_if<ReplanContext>(&context)) {
        json remaining = json::array();
        for (const auto& s : r->remaining) {
            remaining.push_back({{"expected_env", env_json(s.expected_env.features, s.expected_env.step)},
                                 {"action", s.action}});
        }
        return {{"trigger", r->trigger == ReplanTrigger::Checkpoint ? "checkpoint" : "noncompliance"},
                {"observed_env", env_json(r->observed_env.features, r->observed_env.step)},
                {"deviation", r->deviation},
                {"remaining", remaining},
                {"rho", r->rho}};
    }
    if (const auto* p = std::get_if<PredictContext>(&context)) {
        return {{"first", p->first.buckets}, {"first_step", p->first_step},
                {"last", p->last.buckets},   {"last_step", p->last_step},
                {"target_step", p->target_step}, {"bucket_width", p->bucket_width}};
    }
    if (const auto* f = std::get_if<ReflectContext>(&context)) {
        json summary = json::array();
        for (const auto& s : f->summary) {
            summary.push_back({{"step", s.step}, {"scenario", s.scenario.buckets}, {"action", s.action},
                               {"compliant", s.compliant}, {"cost", s.cost}});
        }
        return {{"summary", summary}, {"theta_eff", f->theta_eff}};
    }
    return json::object();
}

PlanContext context_from(PlanKind kind, const json& j) {
    switch (kind) {
        case PlanKind::Replan: {
            ReplanContext r;
            const std::string trigger = j.at("trigger").get<std::string>();
            if (trigger == "checkpoint") {
                r.trigger = ReplanTrigger::Checkpoint;
            } else if (trigger == "noncompliance") {
                r.trigger = ReplanTrigger::Noncompliance;
            } else {
                schema_error("unknown replan trigger '" + trigger + "'");
            }
            r.observed_env = env_from(j.at("observed_env"));
            r.deviation = numbers(j.at("deviation"), "deviation");
            for (const auto& s : j.at("remaining")) {
                r.remaining.push_back({env_from(s.at("expected_env")), s.at("action").get<std::string>()});
            }
            r.rho = j.value("rho", 0.0);
            return r;
        }
        case PlanKind::Predict: {
            PredictContext p;
            p.first = key_from(j.at("first"), "first");
            p.first_step = j.at("first_step").get<std::int64_t>();
            p.last = key_from(j.at("last"), "last");
            p.last_step = j.at("last_step").get<std::int64_t>();
            p.target_step = j.at("target_step").get<std::int64_t>();
            p.bucket_width = j.at("bucket_width").get<double>();
            return p;
        }
        case PlanKind::Reflect: {
            ReflectContext f;
            for (const auto& s : j.at("summary")) {
                f.summary.push_back({s.at("step").get<std::int64_t>(), key_from(s.at("scenario"), "scenario"),
                                     s.at("action").get<std::string>(), s.value("compliant", true),
                                     s.value("cost", 0.0)});
            }
            f.theta_eff = j.value("theta_eff", 0.0);
            return f;
        }
        default:
            return std::monostate{};
    }
}

}  // namespace

json to_json(const PlanRequest& request) {
    const Goal& g = request.goal;
    return {{"kind", std::string(to_string(request.kind))},
            {"env", env_json(request.env.features, request.env.step)},
            {"sys", env_json(request.sys.features, request.sys.step)},
            {"goal",
             {{"goal_id", g.id},
              {"kind", g.kind == GoalKind::Explicit ? "explicit" : "implicit"},
              {"target_features", g.target_features},
              {"tolerance", g.tolerance},
              {"projection", g.projection}}},
            {"scenario", request.scenario.buckets},
            {"context", context_json(request.context)}};
}

json to_json(const PlanResponse& response) {
    json envs = json::array();
    for (const auto& e : response.expected_envs) envs.push_back(e.features);
    json suggestions = json::array();
    for (const auto& s : response.suggestions) {
        suggestions.push_back({{"target_step", s.target_step},
                               {"proposed_change", s.proposed_change},
                               {"rationale_code", s.rationale_code}});
    }
    return {{"actions", response.actions}, {"expected_envs", envs}, {"suggestions", suggestions}};
}

PlanRequest request_from_json(const json& body) {
    try {
        if (!body.is_object()) schema_error("request must be an object");
        PlanRequest r;
        r.kind = parse_plan_kind(body.at("kind").get<std::string>());
        r.env = env_from(body.at("env"));
        const EnvState sys = env_from(body.at("sys"));
        r.sys = SysState{sys.features, sys.step};
        const json& g = body.at("goal");
        r.goal.id = g.at("goal_id").get<std::string>();
        r.goal.kind = g.value("kind", std::string("explicit")) == "implicit" ? GoalKind::Implicit : GoalKind::Explicit;
        r.goal.target_features = numbers(g.at("target_features"), "target_features");
        r.goal.tolerance = g.at("tolerance").get<double>();
        r.goal.projection = g.value("projection", std::vector<std::size_t>{});
        r.scenario = key_from(body.at("scenario"), "scenario");
        r.context = context_from(r.kind, body.value("context", json::object()));
        return r;
    } catch (const json::exception& e) {
        schema_error(e.what());
    }
}

PlanResponse response_from_json(const json& body, PlanKind kind) {
    PlanResponse r;
    try {
        if (!body.is_object()) schema_error("response must be an object");
        const json& actions = body.at("actions");
        if (!actions.is_array()) schema_error("actions must be an array of strings");
        for (const auto& a : actions) {
            if (!a.is_string()) schema_error("actions must be an array of strings");
            r.actions.push_back(a.get<std::string>());
        }
        const json& envs = body.at("expected_envs");
        if (!envs.is_array()) schema_error("expected_envs must be an array");
        for (const auto& e : envs) r.expected_envs.push_back(EnvState{numbers(e, "expected_envs"), 0});
        if (body.contains("suggestions")) {
            for (const auto& s : body.at("suggestions")) {
                r.suggestions.push_back({s.at("target_step").get<std::int64_t>(),
                                         s.at("proposed_change").get<std::string>(),
                                         s.at("rationale_code").get<std::string>()});
            }
        }
    } catch (const json::exception& e) {
        schema_error(e.what());
    }
    switch (kind) {
        case PlanKind::Plan:
        case PlanKind::Replan:
            if (r.actions.empty()) schema_error("plan responses need at least one action");
            if (r.expected_envs.size() != r.actions.size()) schema_error("expected_envs must match actions");
            break;
        case PlanKind::Intuition:
            if (r.actions.empty()) schema_error("intuition responses need an action");
            break;
        case PlanKind::Predict:
            if (r.expected_envs.empty()) schema_error("predict responses need an estimated state");
            break;
        case PlanKind::Reflect:
            break;
    }
    return r;
}

ScriptedPlanner scripted_planner_from_json(const json& table) {
    ScriptedPlanner planner;
    const double width = table.value("bucket_width", 1.0);
    auto entry_from = [](const json& j) {
        ScriptedPlanner::Entry entry;
        entry.actions = j.at("actions").get<std::vector<std::string>>();
        if (j.contains("expected_envs")) {
            for (const auto& e : j.at("expected_envs")) entry.expected_envs.push_back(EnvState{e.get<Vec>(), 0});
        }
        return entry;
    };
    auto key_of = [width](const json& j) {
        if (j.contains("scenario")) return ScenarioKey{j.at("scenario").get<std::vector<std::int64_t>>()};
        if (j.contains("env")) return quantize(j.at("env").get<Vec>(), width);
        throw ConfigError("planner table entry needs 'scenario' or 'env'");
    };
    try {
        for (const auto& p : table.value("plans", json::array())) {
            planner.add_plan(key_of(p), p.at("goal").get<std::string>(), entry_from(p));
        }
        if (table.contains("default_plan")) planner.set_default_plan(entry_from(table.at("default_plan")));
        for (const auto& i : table.value("intuition", json::array())) {
            planner.add_intuition(key_of(i), i.at("action").get<std::string>());
        }
        if (table.contains("default_intuition")) {
            planner.set_default_intuition(table.at("default_intuition").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("planner table: ") + e.what());
    }
    return planner;
}

}  // namespace atm::wire
