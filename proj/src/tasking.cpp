#include "atm/tasking.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>

namespace atm {

int compliance(const Goal& goal, const EnvState& env, const SysState& sys) {
    require(goal.tolerance > 0.0, "compliance: goal tolerance must be > 0");
    Vec joint = env.features;
    joint.insert(joint.end(), sys.features.begin(), sys.features.end());

    Vec projected;
    if (goal.projection.empty()) {
        projected = std::move(joint);
    } else {
        projected.reserve(goal.projection.size());
        for (std::size_t idx : goal.projection) {
            require(idx < joint.size(), "compliance: projection index out of range");
            projected.push_back(joint[idx]);
        }
    }
    require(projected.size() == goal.target_features.size(), "compliance: projection dimension mismatch");
    return distance(projected, goal.target_features) <= goal.tolerance ? 1 : 0;
}

std::string_view to_string(TaskStatus status) {
    switch (status) {
        case TaskStatus::Active: return "active";
        case TaskStatus::Suspended: return "suspended";
        case TaskStatus::Deleted: return "deleted";
    }
    return "active";
}

std::string_view to_string(TaskKind kind) {
    switch (kind) {
        case TaskKind::SelfImprovement: return "self_improvement";
        case TaskKind::Adaptive: return "adaptive";
        case TaskKind::GoalDriven: return "goal_driven";
    }
    return "goal_driven";
}

bool transition_allowed(TaskStatus from, TaskStatus to) {
    if (from == TaskStatus::Deleted) return to == TaskStatus::Deleted;
    return true;
}

void transition(Task& task, TaskStatus to) {
    if (!transition_allowed(task.status, to)) {
        throw ContractViolation("task " + task.task_id + ": illegal transition " +
                                std::string(to_string(task.status)) + " -> " + std::string(to_string(to)));
    }
    task.status = to;
}

void record_compliance(Task& task, int c) {
    require(c == 0 || c == 1, "record_compliance: compliance is 0 or 1");
    require(task.compliance_window > 0, "record_compliance: window must be > 0");
    task.compliance_history.push_back(c);
    while (task.compliance_history.size() > task.compliance_window) task.compliance_history.pop_front();
}

std::optional<double> compliance_rate(const Task& task) {
    if (task.compliance_history.empty()) return std::nullopt;
    const int sum = std::accumulate(task.compliance_history.begin(), task.compliance_history.end(), 0);
    return static_cast<double>(sum) / static_cast<double>(task.compliance_history.size());
}

double utility(const Task& task, const EnvState& env, const SysState& sys, double measurement_score) {
    require(measurement_score >= 0.0 && measurement_score <= 1.0, "utility: measurement score must lie in [0, 1]");
    const double rate = compliance_rate(task).value_or(static_cast<double>(compliance(task.goal, env, sys)));
    return 0.5 * measurement_score + 0.5 * rate;
}

TaskSetUpdate update_task_set(std::vector<Task> tasks, std::vector<Task> candidates,
                              const std::map<std::string, double>& utilities, const TaskSetConfig& cfg) {
    require(cfg.theta_delete < cfg.theta_create, "update_task_set: theta_delete must be < theta_create");
    require(cfg.max_active > 0, "update_task_set: max_active must be > 0");
    auto utility_of = [&](const Task& t) {
        auto it = utilities.find(t.task_id);
        require(it != utilities.end(), "update_task_set: no utility for task " + t.task_id);
        return it->second;
    };

    TaskSetUpdate out;
    std::size_t active = 0;
    for (auto& t : tasks) {
        if (t.status == TaskStatus::Deleted) continue;
        t.utility = utility_of(t);
        if (t.utility < cfg.theta_delete) {
            transition(t, TaskStatus::Deleted);
            out.deleted.push_back(t.task_id);
            continue;
        }
        if (t.status == TaskStatus::Active) ++active;
        out.tasks.push_back(std::move(t));
    }

    for (auto& c : candidates) c.utility = utility_of(c);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Task& a, const Task& b) { return a.utility > b.utility; });
    for (auto& c : candidates) {
        if (active >= cfg.max_active) break;
        if (!(c.utility > cfg.theta_create)) break;
        c.status = TaskStatus::Active;
        out.admitted.push_back(c.task_id);
        out.tasks.push_back(std::move(c));
        ++active;
    }
    return out;
}

StepOutcome step_task(Task& task, const EnvState& env, const SysState& sys, PlannerPort& planner,
                      const ScenarioKey& scenario) {
    require(task.status == TaskStatus::Active, "step_task: task " + task.task_id + " is not active");
    StepOutcome out;
    out.compliance = compliance(task.goal, env, sys);
    record_compliance(task, out.compliance);

    if (out.compliance == 0) {
        PlanRequest request;
        request.kind = PlanKind::Replan;
        request.env = env;
        request.sys = sys;
        request.goal = task.goal;
        request.scenario = scenario;
        ReplanContext ctx;
        ctx.trigger = ReplanTrigger::Noncompliance;
        ctx.observed_env = env;
        request.context = std::move(ctx);
        PlanResponse response;
        try {
            response = planner.handle(request);
        } catch (...) {
            transition(task, TaskStatus::Suspended);
            throw;
        }
        if (response.actions.empty()) {
            transition(task, TaskStatus::Suspended);
            throw NotFound("step_task: replan for task " + task.task_id + " returned no actions");
        }
        task.actions = std::move(response.actions);
        task.cursor = 0;
        task.env_snapshot = env;
        task.sys_snapshot = sys;
        out.replanned = true;
    }

    if (task.cursor < task.actions.size()) {
        out.action = task.actions[task.cursor++];
    } else if (out.compliance == 1) {
        task.completed = true;
        out.completed = true;
    }
    return out;
}

std::vector<TraceStep> summarize_trace(std::span<const TraceStep> trace) {
    require(!trace.empty(), "summarize_trace: empty trace");
    std::vector<TraceStep> out;
    out.push_back(trace.front());
    for (std::size_t i = 1; i + 1 < trace.size(); ++i) {
        if (!trace[i].compliant) out.push_back(trace[i]);
    }
    if (trace.size() > 1) out.push_back(trace.back());
    return out;
}

ExperienceRecord reflect(std::span<const TraceStep> trace, const EnvState& env, const SysState& sys,
                         PlannerPort& planner, ScenarioMemory& memory, double theta_eff) {
    require(!trace.empty(), "reflect: empty trace");
    PlanRequest request;
    request.kind = PlanKind::Reflect;
    request.env = env;
    request.sys = sys;
    request.scenario = trace.back().scenario;
    request.context = ReflectContext{summarize_trace(trace), theta_eff};

    ExperienceRecord record;
    record.step = trace.back().step;
    record.scenario = trace.back().scenario;
    try {
        record.suggestions = planner.handle(request).suggestions;
    } catch (const std::exception& e) {
        spdlog::warn("reflection failed at step {}: {}", record.step, e.what());
        record.suggestions.clear();
        return record;
    }
    memory.store_experience(record);
    return record;
}

namespace {

ImprovementProposals spare_time_pass(ScenarioMemory& memory, const std::function<CoherenceSet()>& mine,
                                     std::span<const Method> methods, PlannerPort& planner,
                                     const SpareTimeConfig& cfg) {
    require(cfg.budget > 0, "run_spare_time: budget must be > 0");
    ImprovementProposals out;
    const std::vector<HistoryEntry> batch = memory.unanalyzed(cfg.budget);
    if (batch.empty()) return out;

    for (const HistoryEntry& entry : batch) {
        if (!entry.failure) continue;
        out.tasks.push_back({entry.scenario, "recover:" + entry.action_id, entry.step, TaskKind::SelfImprovement});
        out.weights.push_back({entry.scenario, ActionOutcomeTarget{entry.action_id, "failure"}, 0.0});
        const Method* best = nullptr;
        for (const Method& m : methods) {
            if (m.id == entry.action_id) continue;
            if (best == nullptr || m.estimate > best->estimate) best = &m;
        }
        if (best != nullptr) out.replacements.push_back({entry.scenario, entry.step, entry.action_id, best->id});
    }

    out.coherence = mine();

    // Reflection reads the batch in chronological order.
    std::vector<TraceStep> trace;
    trace.reserve(batch.size());
    for (auto it = batch.rbegin(); it != batch.rend(); ++it) {
        trace.push_back({it->step, it->scenario, it->action_id, !it->failure, 0.0});
    }
    out.reflection = reflect(trace, EnvState{}, SysState{}, planner, memory, cfg.theta_eff);

    for (const HistoryEntry& entry : batch) memory.mark_analyzed(entry.step);
    out.analyzed = batch.size();
    return out;
}

}  // namespace

ImprovementProposals run_spare_time(ScenarioMemory& memory, const EventStream& events,
                                    std::span<const Method> methods, PlannerPort& planner,
                                    const SpareTimeConfig& cfg) {
    return spare_time_pass(
        memory, [&] { return mine_coherence(events, cfg.window, cfg.theta_cooccur); }, methods, planner, cfg);
}

ImprovementProposals run_spare_time(ScenarioMemory& memory, const IncrementalMiner& miner,
                                    std::span<const Method> methods, PlannerPort& planner,
                                    const SpareTimeConfig& cfg) {
    return spare_time_pass(memory, [&] { return miner.coherence(cfg.theta_cooccur); }, methods, planner, cfg);
}

std::string_view to_string(Tactic tactic) {
    switch (tactic) {
        case Tactic::DegreeReduction: return "degree_reduction";
        case Tactic::Suspension: return "suspension";
        case Tactic::Reversion: return "reversion";
        case Tactic::Substitute: return "substitute";
    }
    return "substitute";
}

double SeverityGates::at(Tactic tactic) const {
    switch (tactic) {
        case Tactic::DegreeReduction: return degree_reduction;
        case Tactic::Suspension: return suspension;
        case Tactic::Reversion: return reversion;
        case Tactic::Substitute: return substitute;
    }
    return substitute;
}

namespace {

void check_metrics(const StepMetrics& m) {
    require(std::isfinite(m.time) && std::isfinite(m.energy) && std::isfinite(m.risk) && std::isfinite(m.safety) &&
                std::isfinite(m.reward),
            "improve_steps: step metrics must be finite");
}

double plan_safety(const std::vector<StepMetrics>& plan) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& m : plan) s = std::min(s, m.safety);
    return s;
}

}  // namespace

double step_cost(const StepMetrics& m, const StepCostWeights& w) {
    return w.lambda_time * m.time + w.lambda_energy * m.energy + w.lambda_risk * m.risk;
}

ImprovedPlan improve_steps(std::span<const StepMetrics> plan, const StepCostWeights& w,
                           const std::map<std::string, std::vector<Alternative>>& alternatives,
                           const SeverityGates& gates) {
    require(w.lambda_time >= 0.0 && w.lambda_energy >= 0.0 && w.lambda_risk >= 0.0,
            "improve_steps: cost weights must be >= 0");
    require(w.lambda_time > 0.0 || w.lambda_energy > 0.0 || w.lambda_risk > 0.0,
            "improve_steps: at least one cost weight must be > 0");
    for (const auto& m : plan) check_metrics(m);

    ImprovedPlan out;
    out.steps.assign(plan.begin(), plan.end());

    for (std::size_t i = 0; i < out.steps.size(); ++i) {
        const StepMetrics current = out.steps[i];
        const double cost = step_cost(current, w);
        if (!(cost > w.theta_eff)) continue;
        const double severity = w.theta_eff > 0.0 ? cost / w.theta_eff : std::numeric_limits<double>::infinity();

        const Alternative* best = nullptr;
        double best_cost = 0.0;
        if (auto it = alternatives.find(current.action); it != alternatives.end()) {
            for (const Alternative& alt : it->second) {
                check_metrics(alt.metrics);
                if (severity < gates.at(alt.tactic)) continue;
                const double alt_cost = step_cost(alt.metrics, w);
                if (!(alt_cost < cost)) continue;
                if (alt.metrics.reward < current.reward) continue;
                out.steps[i] = alt.metrics;
                const bool safe = plan_safety(out.steps) >= w.s_min;
                out.steps[i] = current;
                if (!safe) continue;
                if (best == nullptr || alt_cost < best_cost ||
                    (alt_cost == best_cost && alt.tactic < best->tactic)) {
                    best = &alt;
                    best_cost = alt_cost;
                }
            }
        }
        if (best == nullptr) {
            out.flagged.push_back(i);
            continue;
        }
        out.steps[i] = best->metrics;
        out.replaced.push_back(i);
        out.tactics.push_back(best->tactic);
    }
    return out;
}

}  // namespace atm
