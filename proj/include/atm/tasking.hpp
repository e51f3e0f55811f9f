#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atm/goal.hpp"
#include "atm/memory.hpp"
#include "atm/patterns.hpp"
#include "atm/planner.hpp"
#include "atm/selection.hpp"
#include "atm/world.hpp"

namespace atm {

// C(g, E, S): 1 iff the projected state lies in the closed tolerance ball
// around the goal target.
int compliance(const Goal& goal, const EnvState& env, const SysState& sys);

enum class TaskStatus { Active, Suspended, Deleted };
enum class TaskKind { SelfImprovement, Adaptive, GoalDriven };

std::string_view to_string(TaskStatus status);
std::string_view to_string(TaskKind kind);

struct Task {
    std::string task_id;
    Goal goal;
    std::vector<std::string> actions;
    std::size_t cursor = 0;  // next action to emit
    EnvState env_snapshot;
    SysState sys_snapshot;
    double utility = 0.0;
    TaskStatus status = TaskStatus::Active;
    TaskKind kind = TaskKind::GoalDriven;
    std::deque<int> compliance_history;  // newest at the back
    std::size_t compliance_window = 20;
    bool completed = false;
};

bool transition_allowed(TaskStatus from, TaskStatus to);
// Throws ContractViolation on a forbidden transition.
void transition(Task& task, TaskStatus to);

void record_compliance(Task& task, int c);
// Mean over the recorded window; nullopt when nothing has been recorded.
std::optional<double> compliance_rate(const Task& task);

// 0.5 * measurement_score + 0.5 * recent compliance rate. Without history the
// rate falls back to the current compliance of (env, sys).
double utility(const Task& task, const EnvState& env, const SysState& sys, double measurement_score);

struct TaskSetConfig {
    double theta_delete = 0.2;
    double theta_create = 0.4;
    std::size_t max_active = 4;
};

struct TaskSetUpdate {
    std::vector<Task> tasks;
    std::vector<std::string> deleted;
    std::vector<std::string> admitted;
};

// Drops tasks with U < theta_delete, then admits candidates with
// U > theta_create in decreasing utility order while fewer than max_active
// tasks are active.
TaskSetUpdate update_task_set(std::vector<Task> tasks, std::vector<Task> candidates,
                              const std::map<std::string, double>& utilities, const TaskSetConfig& cfg);

struct StepOutcome {
    std::optional<std::string> action;
    bool replanned = false;
    bool completed = false;
    int compliance = 0;
};

// One tick of an active task. Non-compliance triggers exactly one replan
// before the next action is emitted; a planner failure suspends the task and
// rethrows.
StepOutcome step_task(Task& task, const EnvState& env, const SysState& sys, PlannerPort& planner,
                      const ScenarioKey& scenario = {});

// First, last and every non-compliant step of the trace, in trace order.
std::vector<TraceStep> summarize_trace(std::span<const TraceStep> trace);

// Sends the summarized trace to the planner and stores the suggestions as
// experience. A planner failure yields an empty record.
ExperienceRecord reflect(std::span<const TraceStep> trace, const EnvState& env, const SysState& sys,
                         PlannerPort& planner, ScenarioMemory& memory, double theta_eff = 0.0);

struct CandidateTask {
    ScenarioKey scenario;
    std::string goal_id;
    std::int64_t source_step = 0;
    TaskKind kind = TaskKind::SelfImprovement;
};

struct WeightProposal {
    ScenarioKey scenario;
    WeightTarget target;
    double reward = 0.0;
};

struct StepReplacement {
    ScenarioKey scenario;
    std::int64_t step = 0;
    std::string from_action;
    std::string to_action;
};

struct ImprovementProposals {
    std::vector<CandidateTask> tasks;
    std::vector<WeightProposal> weights;
    std::vector<StepReplacement> replacements;
    CoherenceSet coherence;
    ExperienceRecord reflection;
    std::size_t analyzed = 0;

    std::size_t total() const { return tasks.size() + weights.size() + replacements.size(); }
};

struct SpareTimeConfig {
    std::size_t budget = 16;
    std::int64_t window = 1;
    double theta_cooccur = 0.5;
    double theta_eff = 0.0;
};

/// Budgeted pass over unanalyzed history, newest first.
///
/// Every failure entry yields a recovery candidate, a zero-reward weight
/// proposal for its (action, outcome) and, when another method is known, a
/// replacement by the best-estimated alternative.
ImprovementProposals run_spare_time(ScenarioMemory& memory, const EventStream& events,
                                    std::span<const Method> methods, PlannerPort& planner,
                                    const SpareTimeConfig& cfg);
// Same pass, reading coherence from a miner that is kept current by the caller.
ImprovementProposals run_spare_time(ScenarioMemory& memory, const IncrementalMiner& miner,
                                    std::span<const Method> methods, PlannerPort& planner,
                                    const SpareTimeConfig& cfg);

struct StepMetrics {
    std::string action;
    double time = 0.0;
    double energy = 0.0;
    double risk = 0.0;
    double safety = 1.0;
    double reward = 0.0;
};

enum class Tactic { DegreeReduction, Suspension, Reversion, Substitute };

std::string_view to_string(Tactic tactic);

struct Alternative {
    StepMetrics metrics;
    Tactic tactic = Tactic::Substitute;
};

struct StepCostWeights {
    double lambda_time = 1.0;
    double lambda_energy = 0.0;
    double lambda_risk = 0.0;
    double theta_eff = 1.0;
    double s_min = 0.0;
};

// Minimum severity C(a) / theta_eff at which each tactic may be used.
struct SeverityGates {
    double degree_reduction = 0.0;
    double suspension = 0.0;
    double reversion = 0.0;
    double substitute = 0.0;

    double at(Tactic tactic) const;
};

double step_cost(const StepMetrics& m, const StepCostWeights& w);

struct ImprovedPlan {
    std::vector<StepMetrics> steps;
    std::vector<std::size_t> replaced;
    std::vector<Tactic> tactics;  // parallel to `replaced`
    std::vector<std::size_t> flagged;
};

// Replaces each step whose cost exceeds theta_eff by the cheapest feasible
// alternative: strictly cheaper, plan safety >= s_min and total plan reward
// not lowered. Ties follow tactic order. Steps without a feasible
// alternative are kept and flagged.
ImprovedPlan improve_steps(std::span<const StepMetrics> plan, const StepCostWeights& w,
                           const std::map<std::string, std::vector<Alternative>>& alternatives,
                           const SeverityGates& gates = {});

}  // namespace atm
