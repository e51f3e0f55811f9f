#include "atm/planner.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cstdlib>

#include "atm/planner_wire.hpp"

namespace atm {

std::string_view to_string(PlanKind kind) {
    switch (kind) {
        case PlanKind::Plan: return "plan";
        case PlanKind::Replan: return "replan";
        case PlanKind::Predict: return "predict";
        case PlanKind::Reflect: return "reflect";
        case PlanKind::Intuition: return "intuition";
    }
    return "plan";
}

PlanKind parse_plan_kind(std::string_view name) {
    if (name == "plan") return PlanKind::Plan;
    if (name == "replan") return PlanKind::Replan;
    if (name == "predict") return PlanKind::Predict;
    if (name == "reflect") return PlanKind::Reflect;
    if (name == "intuition") return PlanKind::Intuition;
    throw PlannerError(PlannerError::Kind::Schema, "unknown plan kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------- scripted

void ScriptedPlanner::add_plan(const ScenarioKey& scenario, const std::string& goal_id, Entry entry) {
    require(!entry.actions.empty(), "scripted planner: plan entry needs at least one action");
    require(entry.expected_envs.empty() || entry.expected_envs.size() == entry.actions.size(),
            "scripted planner: expected_envs must match actions");
    table_[{scenario, goal_id}] = std::move(entry);
}

void ScriptedPlanner::add_intuition(const ScenarioKey& scenario, std::string action) {
    intuition_[scenario] = std::move(action);
}

PlanResponse ScriptedPlanner::handle(const PlanRequest& request) {
    switch (request.kind) {
        case PlanKind::Plan: return lookup_plan(request);
        case PlanKind::Replan: return replan(request);
        case PlanKind::Predict: return predict(request);
        case PlanKind::Reflect: return reflect(request);
        case PlanKind::Intuition: return intuition(request);
    }
    throw ContractViolation("scripted planner: unknown request kind");
}

PlanResponse ScriptedPlanner::lookup_plan(const PlanRequest& request) const {
    const Entry* entry = nullptr;
    if (auto it = table_.find({request.scenario, request.goal.id}); it != table_.end()) {
        entry = &it->second;
    } else if (default_plan_) {
        entry = &*default_plan_;
    } else {
        throw NotFound("no plan for scenario " + to_string(request.scenario) + " and goal '" +
                       request.goal.id + "'");
    }
    PlanResponse response;
    response.actions = entry->actions;
    if (entry->expected_envs.empty()) {
        response.expected_envs.assign(entry->actions.size(), request.env);
    } else {
        response.expected_envs = entry->expected_envs;
    }
    return response;
}

PlanResponse ScriptedPlanner::replan(const PlanRequest& request) const {
    const auto* ctx = std::get_if<ReplanContext>(&request.context);
    require(ctx != nullptr, "replan: request has no replan context");
    if (ctx->trigger == ReplanTrigger::Noncompliance) {
        return lookup_plan(request);
    }
    require(!ctx->remaining.empty(), "replan: checkpoint context has no remaining stages");
    require(ctx->rho >= 0.0 && ctx->rho < 1.0, "replan: rho must lie in [0, 1)");
    const std::size_t dim = ctx->deviation.size();
    require(dim == ctx->observed_env.features.size(), "replan: deviation and observation dimensions differ");

    // Each remaining expectation moves by (1 - rho) of the observed deviation,
    // so the current stage lands at observed + rho * (expected - observed).
    PlanResponse response;
    for (const PlanStage& stage : ctx->remaining) {
        require(stage.expected_env.features.size() == dim, "replan: stage dimension mismatch");
        EnvState shifted = stage.expected_env;
        for (std::size_t k = 0; k < dim; ++k) {
            shifted.features[k] -= (1.0 - ctx->rho) * ctx->deviation[k];
        }
        response.actions.push_back(stage.action);
        response.expected_envs.push_back(std::move(shifted));
    }
    return response;
}

PlanResponse ScriptedPlanner::predict(const PlanRequest& request) const {
    const auto* ctx = std::get_if<PredictContext>(&request.context);
    require(ctx != nullptr, "predict: request has no predict context");
    require(ctx->first_step < ctx->target_step && ctx->target_step < ctx->last_step,
            "predict: target step must lie strictly between the endpoints");
    require(ctx->first.buckets.size() == ctx->last.buckets.size(), "predict: endpoint key dimensions differ");

    const Vec a = bucket_center(ctx->first, ctx->bucket_width);
    const Vec b = bucket_center(ctx->last, ctx->bucket_width);
    const double frac = static_cast<double>(ctx->target_step - ctx->first_step) /
                        static_cast<double>(ctx->last_step - ctx->first_step);
    EnvState estimate;
    estimate.step = ctx->target_step;
    estimate.features.resize(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        estimate.features[k] = a[k] + frac * (b[k] - a[k]);
    }
    PlanResponse response;
    response.expected_envs.push_back(std::move(estimate));
    return response;
}

PlanResponse ScriptedPlanner::reflect(const PlanRequest& request) const {
    const auto* ctx = std::get_if<ReflectContext>(&request.context);
    require(ctx != nullptr, "reflect: request has no reflect context");
    require(!ctx->summary.empty(), "reflect: empty trace summary");
    PlanResponse response;
    for (const TraceStep& step : ctx->summary) {
        if (!step.compliant) {
            response.suggestions.push_back({step.step, "replan_before:" + step.action, "compliance_violation"});
        }
        if (step.cost > ctx->theta_eff) {
            response.suggestions.push_back({step.step, "reduce_degree:" + step.action, "step_cost"});
        }
    }
    return response;
}

PlanResponse ScriptedPlanner::intuition(const PlanRequest& request) const {
    std::string action;
    if (auto it = intuition_.find(request.scenario); it != intuition_.end()) {
        action = it->second;
    } else if (default_intuition_) {
        action = *default_intuition_;
    } else {
        throw NotFound("no intuitive action for scenario " + to_string(request.scenario));
    }
    PlanResponse response;
    response.actions.push_back(std::move(action));
    response.expected_envs.push_back(request.env);
    return response;
}

// ---------------------------------------------------------------- external

namespace {

// Splits "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    if (scheme == std::string::npos) {
        throw ContractViolation("planner endpoint must be an absolute URL: " + endpoint);
    }
    const auto path_start = endpoint.find('/', scheme + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

}  // namespace

ExternalPlanner::ExternalPlanner(std::string endpoint, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
    require(!endpoint.empty(), "external planner: endpoint not configured");
    require(timeout.count() > 0, "external planner: timeout must be positive");
    std::tie(base_url_, path_) = split_endpoint(endpoint);
}

PlanResponse ExternalPlanner::handle(const PlanRequest& request) {
    httplib::Client client(base_url_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    const std::string body = wire::to_json(request).dump();
    auto result = client.Post(path_, body, "application/json");
    if (!result) {
        const auto err = result.error();
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
            throw PlannerError(PlannerError::Kind::Timeout, "planner timed out: " + httplib::to_string(err));
        }
        throw PlannerError(PlannerError::Kind::Transport, "planner transport failure: " + httplib::to_string(err));
    }
    if (result->status != 200) {
        throw PlannerError(PlannerError::Kind::Transport,
                           "planner returned HTTP " + std::to_string(result->status));
    }
    wire::json parsed;
    try {
        parsed = wire::json::parse(result->body);
    } catch (const wire::json::parse_error& e) {
        throw PlannerError(PlannerError::Kind::Schema, std::string("planner body is not JSON: ") + e.what());
    }
    return wire::response_from_json(parsed, request.kind);
}

FallbackPlanner::FallbackPlanner(std::unique_ptr<PlannerPort> primary, std::shared_ptr<PlannerPort> fallback)
    : primary_(std::move(primary)), fallback_(std::move(fallback)) {
    require(primary_ != nullptr && fallback_ != nullptr, "fallback planner: both planners are required");
}

PlanResponse FallbackPlanner::handle(const PlanRequest& request) {
    try {
        return primary_->handle(request);
    } catch (const PlannerError& e) {
        ++fallback_count_;
        spdlog::warn("external planner failed ({}); answering {} request with scripted planner", e.what(),
                     to_string(request.kind));
        return fallback_->handle(request);
    }
}

std::shared_ptr<PlannerPort> planner_from_environment(std::shared_ptr<PlannerPort> scripted,
                                                      std::chrono::milliseconds timeout) {
    const char* url = std::getenv(kPlannerUrlEnv);
    if (url == nullptr || *url == '\0') return scripted;
    return std::make_shared<FallbackPlanner>(std::make_unique<ExternalPlanner>(url, timeout), std::move(scripted));
}

}  // namespace atm
