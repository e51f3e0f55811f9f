#include <algorithm>
#include <cmath>
#include <chrono>
#include <map>
#include <memory>
#include <numbers>

#include "atm/measurement.hpp"
#include "atm/memory.hpp"
#include "atm/patterns.hpp"
#include "atm/planner.hpp"
#include "atm/planner_wire.hpp"
#include "atm/selection.hpp"
#include "atm/simlab/experiments.hpp"
#include "atm/tasking.hpp"

namespace atm::simlab {

FullAgentParams FullAgentParams::from(const SimConfig& cfg) {
    FullAgentParams p;
    const json& w = cfg.world;
    if (w.contains("regimes")) {
        for (const auto& r : w.at("regimes")) {
            RegimeSpec spec;
            spec.env = get_or(r, "env", Vec{});
            spec.target = get_or(r, "target", Vec{});
            spec.goal_id = get_or(r, "goal", std::string{});
            p.regimes.push_back(std::move(spec));
        }
    } else {
        p.regimes.push_back({{0.5, 0.5}, {2.0, 1.0}, "reach_a"});
    }
    p.change_points = get_or(w, "change_points", p.change_points);
    p.horizon = get_or(w, "horizon", p.horizon);
    p.env_noise = get_or(w, "env_noise", p.env_noise);
    p.disturbance_sd = get_or(w, "disturbance_sd", p.disturbance_sd);
    p.kick_prob = get_or(w, "kick_prob", p.kick_prob);
    p.kick_size = get_or(w, "kick_size", p.kick_size);
    p.tolerance = get_or(w, "tolerance", p.tolerance);
    p.bucket_width = get_or(w, "bucket_width", p.bucket_width);
    p.goal_weight = get_or(w, "goal_weight", p.goal_weight);
    p.other_goal_weight = get_or(w, "other_goal_weight", p.other_goal_weight);

    if (cfg.selector.contains("methods")) {
        for (const auto& m : cfg.selector.at("methods")) {
            p.methods.push_back({get_or(m, "id", std::string{}), get_or(m, "gain", 0.0)});
        }
    } else {
        p.methods = {{"slow", 0.05}, {"medium", 0.3}, {"fast", 0.8}, {"overshoot", 1.6}};
    }
    p.epsilon_c = get_or(cfg.selector, "epsilon_c", p.epsilon_c);

    p.plan_length = get_or(cfg.tasking, "plan_length", p.plan_length);
    p.compliance_window = get_or(cfg.tasking, "compliance_window", p.compliance_window);
    p.max_active = get_or(cfg.tasking, "max_active", p.max_active);
    p.spare_budget = get_or(cfg.tasking, "spare_budget", p.spare_budget);
    p.history_every = get_or(cfg.tasking, "history_every", p.history_every);
    p.memory_eta = get_or(cfg.tasking, "memory_eta", p.memory_eta);
    if (cfg.tasking.contains("planner")) {
        p.planner_table = cfg.tasking.at("planner");
        wire::scripted_planner_from_json(p.planner_table);
    }
    p.pattern_window = get_or(cfg.patterns, "window", p.pattern_window);
    p.compliance_block = get_or(cfg.acceptance, "compliance_block", p.compliance_block);
    p.max_dip = get_or(cfg.acceptance, "max_compliance_dip", p.max_dip);

    if (p.regimes.empty()) throw ConfigError("full-agent: no regimes");
    for (const auto& r : p.regimes) {
        if (r.env.empty() || r.target.size() != 2 || r.goal_id.empty()) {
            throw ConfigError("full-agent: each regime needs env, a 2-D target and a goal id");
        }
        if (r.env.size() != p.regimes.front().env.size()) throw ConfigError("full-agent: regime env sizes differ");
    }
    for (std::size_t i = 0; i < p.change_points.size(); ++i) {
        if (p.change_points[i] <= 0 || p.change_points[i] >= p.horizon ||
            (i > 0 && p.change_points[i] <= p.change_points[i - 1])) {
            throw ConfigError("full-agent: change points must be strictly increasing inside the horizon");
        }
    }
    if (p.methods.empty()) throw ConfigError("full-agent: no methods");
    if (p.horizon < 1 || p.plan_length < 1 || p.compliance_window < 1 || p.spare_budget < 1 || p.history_every < 1) {
        throw ConfigError("full-agent: horizon, plan_length, compliance_window, spare_budget and history_every must be >= 1");
    }
    if (!(p.tolerance > 0.0) || !(p.bucket_width > 0.0)) throw ConfigError("full-agent: bad tolerance or bucket width");
    if (!(p.memory_eta > 0.0 && p.memory_eta <= 1.0)) throw ConfigError("full-agent: memory_eta must lie in (0, 1]");
    if (p.compliance_block < 1) throw ConfigError("full-agent: compliance_block must be >= 1");
    return p;
}

namespace {

// Rethrows contract violations tagged with the module that raised them.
template <typename Fn>
auto tagged(const char* module, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ContractViolation& e) {
        throw ContractViolation(std::string("[") + module + "] " + e.what());
    }
}

struct AgentTrace {
    std::vector<int> compliance;
    std::vector<double> reward;
    std::vector<std::uint32_t> method;
    std::vector<std::uint32_t> regime;
    std::vector<std::uint32_t> active;
    std::vector<bool> replanned;
    std::vector<bool> changed;
    std::vector<std::string> goal;
    std::vector<std::int64_t> deletions;
    std::vector<std::int64_t> creations;
    std::vector<std::int64_t> remaps;
    std::int64_t replans = 0;
    std::int64_t intuitions = 0;
    std::int64_t proposals = 0;
    std::int64_t suggestions = 0;
    std::size_t coherence_pairs = 0;
};

class Agent {
public:
    Agent(const FullAgentParams& p, const Thresholds& th, std::uint64_t seed, std::chrono::milliseconds timeout)
        : p_(p),
          th_(th),
          world_rng_(mix_seed(seed, 10)),
          env_rng_(mix_seed(seed, 11)),
          memory_rng_(mix_seed(seed, 13)),
          selector_(method_ids(p), selector_config(p, seed)),
          detector_({th.theta_e, 1, Norm::L2}),
          miner_(p.pattern_window),
          position_(2, 0.0) {
        auto script = std::make_shared<ScriptedPlanner>();
        if (!p.planner_table.is_null()) *script = wire::scripted_planner_from_json(p.planner_table);
        const std::vector<std::string> servo(p.plan_length, "servo");
        for (std::size_t r = 0; r < p.regimes.size(); ++r) {
            const ScenarioKey key = quantize(p.regimes[r].env, p.bucket_width);
            if (p.planner_table.is_null()) {
                script->add_plan(key, p.regimes[r].goal_id, {servo, {}});
                script->add_intuition(key, "servo");
            }
            for (std::size_t g = 0; g < p.regimes.size(); ++g) {
                memory_.add_goal(key, p.regimes[g].goal_id, g == r ? p.goal_weight : p.other_goal_weight);
            }
        }
        if (p.planner_table.is_null()) {
            script->set_default_plan({servo, {}});
            script->set_default_intuition("servo");
        }
        env_norm_.features = p.regimes.front().env;
        planner_ = planner_from_environment(std::move(script), timeout);
    }

    AgentTrace run() {
        AgentTrace trace;
        const auto n = static_cast<std::size_t>(p_.horizon);
        trace.compliance.reserve(n);
        trace.reward.reserve(n);
        for (std::int64_t t = 0; t < p_.horizon; ++t) tick(t, trace);
        trace.coherence_pairs = miner_.coherence(th_.theta_cooccur).pairs.size();
        return trace;
    }

private:
    static std::vector<std::string> method_ids(const FullAgentParams& p) {
        std::vector<std::string> ids;
        for (const auto& m : p.methods) ids.push_back(m.id);
        return ids;
    }

    static SelectorConfig selector_config(const FullAgentParams& p, std::uint64_t seed) {
        SelectorConfig cfg;
        cfg.epsilon.c = p.epsilon_c;
        cfg.rng_seed = mix_seed(seed, 12);
        return cfg;
    }

    std::size_t regime_at(std::int64_t t) const {
        const auto passed = std::upper_bound(p_.change_points.begin(), p_.change_points.end(), t) -
                            p_.change_points.begin();
        return static_cast<std::size_t>(passed) % p_.regimes.size();
    }

    Goal goal_for(const std::string& id) const {
        for (const auto& r : p_.regimes) {
            if (r.goal_id == id) {
                Goal g;
                g.id = id;
                g.target_features = r.target;
                g.tolerance = p_.tolerance;
                const std::size_t d_env = r.env.size();
                g.projection = {d_env, d_env + 1};
                return g;
            }
        }
        throw NotFound("full-agent: unknown goal '" + id + "'");
    }

    void emit(const std::string& id, std::int64_t t, const ScenarioKey& scenario) {
        miner_.observe({id, t, to_string(scenario)});
    }

    std::vector<std::string> fresh_plan(const Goal& goal, const EnvState& env, const SysState& sys,
                                        const ScenarioKey& scenario) {
        PlanRequest request;
        request.kind = PlanKind::Plan;
        request.env = env;
        request.sys = sys;
        request.goal = goal;
        request.scenario = scenario;
        return planner_->handle(request).actions;
    }

    void manage_tasks(std::int64_t t, const EnvState& env, const SysState& sys, const ScenarioKey& scenario,
                      AgentTrace& trace) {
        bool have_current = false;
        for (auto& task : tasks_) {
            if (task.goal.id == goal_id_) {
                have_current = true;
                if (task.status == TaskStatus::Suspended) transition(task, TaskStatus::Active);
            } else {
                if (task.status == TaskStatus::Active) {
                    transition(task, TaskStatus::Suspended);
                    emit("task_suspended", t, scenario);
                }
                record_compliance(task, compliance(task.goal, env, sys));
            }
        }

        std::vector<Task> candidates;
        if (!have_current) {
            Task task;
            task.task_id = "task-" + std::to_string(next_task_++);
            task.goal = goal_for(goal_id_);
            task.actions = fresh_plan(task.goal, env, sys, scenario);
            task.env_snapshot = env;
            task.sys_snapshot = sys;
            task.compliance_window = p_.compliance_window;
            candidates.push_back(std::move(task));
        }

        std::map<std::string, double> utilities;
        auto score = [&](const Task& task) {
            const double relevance = memory_.normalized_goal_weight(scenario, task.goal.id);
            const auto it = last_reward_.find(task.task_id);
            return relevance * (it == last_reward_.end() ? 1.0 : it->second);
        };
        for (const auto& task : tasks_) utilities[task.task_id] = utility(task, env, sys, score(task));
        for (const auto& task : candidates) utilities[task.task_id] = utility(task, env, sys, score(task));

        TaskSetConfig cfg{th_.theta_delete, th_.theta_create, p_.max_active};
        TaskSetUpdate update = update_task_set(std::move(tasks_), std::move(candidates), utilities, cfg);
        tasks_ = std::move(update.tasks);
        for (const auto& id : update.deleted) {
            trace.deletions.push_back(t);
            last_reward_.erase(id);
            emit("task_deleted", t, scenario);
        }
        for (std::size_t i = 0; i < update.admitted.size(); ++i) {
            trace.creations.push_back(t);
            emit("task_created", t, scenario);
        }
    }

    Task* current_task() {
        for (auto& task : tasks_) {
            if (task.goal.id == goal_id_ && task.status == TaskStatus::Active) return &task;
        }
        return nullptr;
    }

    std::size_t greedy_method() const {
        const auto methods = selector_.methods();
        std::size_t best = 0;
        for (std::size_t i = 1; i < methods.size(); ++i) {
            if (methods[i].estimate > methods[best].estimate) best = i;
        }
        return best;
    }

    void tick(std::int64_t t, AgentTrace& trace) {
        const std::size_t regime = regime_at(t);
        const RegimeSpec& spec = p_.regimes[regime];

        EnvState env;
        env.step = t;
        env.features = spec.env;
        for (double& f : env.features) f += p_.env_noise * env_rng_.normal();
        SysState sys{position_, t};

        const bool changed = tagged("world", [&] { return detector_.observe(env).changed; });
        const ScenarioKey scenario = tagged("world", [&] { return quantize(env.features, p_.bucket_width); });
        if (t == 0 || changed) {
            try {
                const std::string retrieved = memory_.retrieve_goal(scenario, RetrievalMode::Max, memory_rng_);
                if (retrieved != goal_id_) {
                    if (!goal_id_.empty()) trace.remaps.push_back(t);
                    goal_id_ = retrieved;
                    emit("goal_remap", t, scenario);
                }
            } catch (const NotFound&) {
                // Unfamiliar scenario: keep pursuing the current goal.
            }
            if (changed) emit("env_change", t, scenario);
        }
        const Goal goal = goal_for(goal_id_);

        tagged("tasking", [&] { manage_tasks(t, env, sys, scenario, trace); });

        int c = 0;
        bool replanned = false;
        std::size_t method = 0;
        bool learn = false;
        std::string action;
        if (Task* task = current_task()) {
            const StepOutcome out = tagged("tasking", [&] { return step_task(*task, env, sys, *planner_, scenario); });
            c = out.compliance;
            replanned = out.replanned;
            if (out.completed) {
                task->actions = fresh_plan(task->goal, env, sys, scenario);
                task->cursor = 0;
                task->completed = false;
                action = task->actions[task->cursor++];
            } else {
                action = out.action.value_or("hold");
            }
            method = tagged("selection", [&] { return selector_.select(); });
            learn = true;
        } else {
            action = tagged("selection", [&] { return intuition_fallback(scenario, *planner_, true, env, sys); });
            c = compliance(goal, env, sys);
            method = greedy_method();
            ++trace.intuitions;
        }
        if (replanned) {
            ++trace.replans;
            emit("replan", t, scenario);
        }

        // Executor: first-order servo toward the goal target plus disturbance.
        const double gain = action == "servo" ? p_.methods[method].gain : 0.0;
        Vec intended(2);
        Vec next(2);
        for (std::size_t k = 0; k < 2; ++k) {
            intended[k] = gain * (goal.target_features[k] - position_[k]);
            next[k] = position_[k] + intended[k] + p_.disturbance_sd * world_rng_.normal();
        }
        const bool kicked = world_rng_.uniform() < p_.kick_prob;
        if (kicked) {
            const double angle = 2.0 * std::numbers::pi * world_rng_.uniform();
            next[0] += p_.kick_size * std::cos(angle);
            next[1] += p_.kick_size * std::sin(angle);
            emit("disturbance", t, scenario);
        }
        if (!all_finite(next)) throw ContractViolation("[executor] non-finite position at step " + std::to_string(t));

        const double reward = tagged("measurement", [&] {
            MeasurementReport report;
            report.flag_deviations.push_back({distance(next, goal.target_features), p_.tolerance});
            Vec observed(2);
            for (std::size_t k = 0; k < 2; ++k) observed[k] = next[k] - position_[k];
            if (norm_of(intended) > th_.theta_s_state && norm_of(observed) > 0.0) {
                report.contradiction = contradiction_check(intended, observed, th_.theta_contra).contradiction;
            }
            const Vec start = position_;
            const SimulatorPort model = [&](const EnvState&, const SysState&, std::span<const std::string>) {
                Vec predicted(2);
                for (std::size_t k = 0; k < 2; ++k) predicted[k] = start[k] + intended[k];
                return predicted;
            };
            const std::vector<std::string> acted{action};
            report.simulation = Deviation{simulate_compare(env, sys, acted, next, model, th_.theta_sim).delta, th_.theta_sim};
            return aggregate_reward(report);
        });

        if (learn) {
            tagged("selection", [&] { selector_.update(method, reward); });
            if (Task* task = current_task()) last_reward_[task->task_id] = reward;
        }

        position_ = next;
        const SysState after{position_, t + 1};
        const int c_after = compliance(goal, env, after);
        const std::string& method_id = p_.methods[method].id;
        tagged("memory", [&] {
            memory_.update_weight(scenario, GoalTarget{goal_id_}, reward, p_.memory_eta);
            memory_.update_weight(scenario, ActionOutcomeTarget{method_id, c_after ? "compliant" : "noncompliant"},
                                  reward, p_.memory_eta);
            if (changed || c_after == 0 || t % p_.history_every == 0) {
                HistoryEntry entry = make_history_entry(t, scenario, env, env_norm_, "tick", changed);
                entry.action_id = method_id;
                entry.failure = c_after == 0;
                memory_.record_history(std::move(entry));
            }
        });
        if (c_after == 0) emit("noncompliant", t, scenario);

        tagged("tasking", [&] {
            SpareTimeConfig spare;
            spare.budget = p_.spare_budget;
            spare.window = p_.pattern_window;
            spare.theta_cooccur = th_.theta_cooccur;
            spare.theta_eff = th_.theta_eff;
            const ImprovementProposals proposals = run_spare_time(memory_, miner_, selector_.methods(), *planner_, spare);
            trace.proposals += static_cast<std::int64_t>(proposals.total());
            trace.suggestions += static_cast<std::int64_t>(proposals.reflection.suggestions.size());
        });

        std::uint32_t active = 0;
        for (const auto& task : tasks_) active += task.status == TaskStatus::Active ? 1 : 0;
        trace.compliance.push_back(c);
        trace.reward.push_back(reward);
        trace.method.push_back(static_cast<std::uint32_t>(method));
        trace.regime.push_back(static_cast<std::uint32_t>(regime));
        trace.active.push_back(active);
        trace.replanned.push_back(replanned);
        trace.changed.push_back(changed);
        trace.goal.push_back(goal_id_);
    }

    const FullAgentParams& p_;
    const Thresholds& th_;
    Rng world_rng_;
    Rng env_rng_;
    Rng memory_rng_;
    std::shared_ptr<PlannerPort> planner_;
    ScenarioMemory memory_;
    Selector selector_;
    ChangeDetector detector_;
    IncrementalMiner miner_;
    Vec position_;
    EnvState env_norm_;
    std::string goal_id_;
    std::vector<Task> tasks_;
    std::map<std::string, double> last_reward_;
    std::int64_t next_task_ = 0;
};

// First event step in [from, from + within], or -1.
std::int64_t first_in(const std::vector<std::int64_t>& steps, std::int64_t from, std::int64_t within) {
    for (std::int64_t s : steps) {
        if (s >= from && s <= from + within) return s - from;
    }
    return -1;
}

}  // namespace

ExperimentReport run_full_agent(const SimConfig& cfg, const RunOptions& opts) {
    const FullAgentParams p = FullAgentParams::from(cfg);
    const std::int64_t churn_window = get_or<std::int64_t>(cfg.acceptance, "max_churn_latency", 500);

    struct SeedResult {
        std::vector<double> blocks;
        std::vector<std::int64_t> delete_latency;
        std::vector<std::int64_t> create_latency;
        std::vector<std::int64_t> remap_latency;
        double mean_reward = 0.0;
        double final_compliance = 0.0;
        std::int64_t replans = 0;
        std::int64_t intuitions = 0;
        std::int64_t proposals = 0;
        std::int64_t suggestions = 0;
        std::int64_t created = 0;
        std::int64_t deleted = 0;
        std::size_t coherence_pairs = 0;
        CsvBuilder csv;
    };
    auto results = run_seeds<SeedResult>(
        cfg.seeds,
        [&](std::uint64_t seed, std::size_t) {
            Agent agent(p, cfg.thresholds, seed, opts.planner_timeout);
            const AgentTrace trace = agent.run();
            SeedResult r;
            const auto n = trace.compliance.size();
            const auto block = static_cast<std::size_t>(p.compliance_block);
            for (std::size_t start = 0; start + block <= n; start += block) {
                double s = 0.0;
                for (std::size_t i = start; i < start + block; ++i) s += trace.compliance[i];
                r.blocks.push_back(s / static_cast<double>(block));
            }
            for (std::int64_t tau : p.change_points) {
                r.delete_latency.push_back(first_in(trace.deletions, tau, churn_window));
                r.create_latency.push_back(first_in(trace.creations, tau, churn_window));
                r.remap_latency.push_back(first_in(trace.remaps, tau, churn_window));
            }
            r.mean_reward = mean(trace.reward);
            r.final_compliance = trace.compliance.back();
            r.replans = trace.replans;
            r.intuitions = trace.intuitions;
            r.proposals = trace.proposals;
            r.suggestions = trace.suggestions;
            r.created = static_cast<std::int64_t>(trace.creations.size());
            r.deleted = static_cast<std::int64_t>(trace.deletions.size());
            r.coherence_pairs = trace.coherence_pairs;
            if (opts.emit_csv) {
                for (std::size_t t = 0; t < n; ++t) {
                    r.csv << seed << t << static_cast<std::int64_t>(trace.regime[t]) << trace.goal[t]
                          << trace.compliance[t] << trace.reward[t] << p.methods[trace.method[t]].id
                          << static_cast<std::int64_t>(trace.active[t]) << static_cast<bool>(trace.replanned[t])
                          << static_cast<bool>(trace.changed[t]);
                    r.csv.end_row();
                }
            }
            return r;
        },
        opts.threads);

    ExperimentReport report;
    report.experiment = "full-agent";
    report.config = cfg.echo();
    report.seeds = cfg.seeds;
    CsvBuilder csv({"seed", "step", "regime", "goal", "compliance", "reward", "method", "active_tasks", "replanned",
                    "change_detected"});

    const std::size_t blocks = results.front().blocks.size();
    std::vector<double> curve(blocks, 0.0);
    std::vector<double> rewards;
    std::int64_t replans = 0;
    std::int64_t intuitions = 0;
    std::int64_t proposals = 0;
    std::int64_t suggestions = 0;
    std::int64_t created = 0;
    std::int64_t deleted = 0;
    std::int64_t worst_delete = 0;
    std::int64_t worst_create = 0;
    std::int64_t worst_remap = 0;
    bool churn_ok = true;
    bool remap_ok = true;
    for (const auto& r : results) {
        for (std::size_t b = 0; b < blocks; ++b) curve[b] += r.blocks[b] / static_cast<double>(results.size());
        rewards.push_back(r.mean_reward);
        replans += r.replans;
        intuitions += r.intuitions;
        proposals += r.proposals;
        suggestions += r.suggestions;
        created += r.created;
        deleted += r.deleted;
        for (std::size_t k = 0; k < p.change_points.size(); ++k) {
            churn_ok = churn_ok && r.delete_latency[k] >= 0 && r.create_latency[k] >= 0;
            remap_ok = remap_ok && r.remap_latency[k] >= 0;
            worst_delete = std::max(worst_delete, r.delete_latency[k]);
            worst_create = std::max(worst_create, r.create_latency[k]);
            worst_remap = std::max(worst_remap, r.remap_latency[k]);
        }
        if (opts.emit_csv) csv.append_body(r.csv);
    }
    if (opts.emit_csv) report.csv.emplace_back("full_agent", csv.text());

    double worst_dip = 0.0;
    for (std::size_t b = 1; b < blocks; ++b) worst_dip = std::max(worst_dip, curve[b - 1] - curve[b]);

    report.aggregates = {{"compliance_curve", curve},
                         {"worst_compliance_dip", worst_dip},
                         {"mean_reward", describe(rewards)},
                         {"replans", replans},
                         {"intuition_fallbacks", intuitions},
                         {"spare_time_proposals", proposals},
                         {"reflection_suggestions", suggestions},
                         {"tasks_created", created},
                         {"tasks_deleted", deleted},
                         {"change_points", p.change_points}};
    if (!p.change_points.empty()) {
        report.aggregates["worst_delete_latency"] = worst_delete;
        report.aggregates["worst_create_latency"] = worst_create;
        report.aggregates["worst_goal_remap_latency"] = worst_remap;
    }

    if (blocks >= 2) {
        report.criteria.push_back({"compliance_window_dip", worst_dip, p.max_dip, worst_dip <= p.max_dip,
                                   std::to_string(p.compliance_block) + "-step windows, mean over seeds"});
    }
    if (!p.change_points.empty()) {
        report.criteria.push_back({"task_churn_after_change", churn_ok ? 1.0 : 0.0, 1.0, churn_ok,
                                   "a deletion and a creation within " + std::to_string(churn_window) +
                                       " steps of every change"});
        report.criteria.push_back({"goal_remapped_after_change", remap_ok ? 1.0 : 0.0, 1.0, remap_ok,
                                   "retrieved goal changes after every detected change"});
    }
    return report;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"stationary", "tracking",     "checkpoint",
                                                   "goal-directed", "full-agent", "instrumented"};
    return names;
}

ExperimentReport run_experiment(std::string_view name, const SimConfig& cfg, const RunOptions& opts) {
    if (name == "stationary") return run_stationary(cfg, opts);
    if (name == "tracking") return run_tracking(cfg, opts);
    if (name == "checkpoint") return run_checkpoint(cfg, opts);
    if (name == "goal-directed") return run_goal_directed(cfg, opts);
    if (name == "full-agent") return run_full_agent(cfg, opts);
    if (name == "instrumented") return run_instrumented(cfg, opts);
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

}  // namespace atm::simlab
