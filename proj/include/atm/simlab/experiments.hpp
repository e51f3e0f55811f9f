#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "atm/planner.hpp"
#include "atm/simlab/config.hpp"
#include "atm/simlab/report.hpp"
#include "atm/world.hpp"

namespace atm::simlab {

struct RunOptions {
    bool emit_csv = true;
    std::size_t threads = default_threads();
    // Only the full agent consults a planner.
    std::chrono::milliseconds planner_timeout{kDefaultPlannerTimeoutMs};
};

enum class BanditPolicy { EpsilonGreedy, Oracle, Uniform };

BanditPolicy parse_policy(const std::string& name);

struct StationaryParams {
    Vec arm_means{0.9, 0.5, 0.5, 0.5, 0.5};
    std::int64_t horizon = 50'000;
    double epsilon_c = 5.0;
    BanditPolicy policy = BanditPolicy::EpsilonGreedy;
    double tail_fraction = 0.1;
    double max_tail_regret = 0.02;
    double max_half_ratio = 0.7;

    static StationaryParams from(const SimConfig& cfg);
};

struct TrackingParams {
    std::vector<Vec> regimes;  // arm means per regime
    std::int64_t regime_length = 10'000;
    double obs_noise = 0.1;
    ChangeDetectorConfig detector{0.2, 50, Norm::L2};
    double epsilon_c = 5.0;
    double max_regret_ratio = 0.6;
    std::int64_t max_latency = 200;

    static TrackingParams from(const SimConfig& cfg);
};

struct CheckpointParams {
    std::size_t dim = 2;
    double l_f = 0.9;
    double sigma = 0.1;
    double rho = 0.5;
    std::vector<double> rho_grid{0.0, 0.25, 0.5, 0.75};
    std::int64_t steps = 20'000;
    std::size_t tail = 5'000;
    std::int64_t checkpoint_every = 1;
    double theta_ckpt = 0.0;
    double bound_slack = 1.10;
    double max_open_loop_ratio = 0.35;

    static CheckpointParams from(const SimConfig& cfg);
};

struct GoalDirectedParams {
    std::size_t dim = 2;
    double eta = 0.05;
    std::int64_t steps = 100;
    double gain = 1.0;  // identity alignment scaled by gain; lambda_g = gain
    double init_sd = 1.0;
    double max_error_ratio = 0.5;
    double rate_tolerance = 0.2;

    static GoalDirectedParams from(const SimConfig& cfg);
};

struct MethodSpec {
    std::string id;
    double gain = 0.0;
};

struct RegimeSpec {
    Vec env;
    Vec target;
    std::string goal_id;
};

struct FullAgentParams {
    std::vector<RegimeSpec> regimes;
    std::vector<std::int64_t> change_points;  // regime index advances at each
    std::int64_t horizon = 10'000;
    double env_noise = 0.01;
    double disturbance_sd = 0.1;
    double kick_prob = 0.01;
    double kick_size = 1.5;
    double tolerance = 0.3;
    double bucket_width = 1.0;
    double goal_weight = 0.9;
    double other_goal_weight = 0.1;
    std::vector<MethodSpec> methods;
    double epsilon_c = 5.0;
    std::size_t plan_length = 5;
    std::size_t compliance_window = 20;
    std::size_t max_active = 4;
    std::size_t spare_budget = 8;
    std::int64_t history_every = 10;
    std::int64_t pattern_window = 1;
    double memory_eta = 0.05;
    std::int64_t compliance_block = 1'000;
    double max_dip = 0.02;
    // Planner table in the wire format; empty means one servo plan per regime.
    json planner_table;

    static FullAgentParams from(const SimConfig& cfg);
};

struct InstrumentedParams {
    std::size_t episodes = 10'000;
    double channel_noise = 0.1;
    std::size_t feedback_signals = 5;
    double min_spearman = 0.9;

    static InstrumentedParams from(const SimConfig& cfg);
};

ExperimentReport run_stationary(const SimConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_tracking(const SimConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_checkpoint(const SimConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_goal_directed(const SimConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_full_agent(const SimConfig& cfg, const RunOptions& opts = {});
ExperimentReport run_instrumented(const SimConfig& cfg, const RunOptions& opts = {});

const std::vector<std::string>& experiment_names();
// Throws ConfigError for an unknown experiment name.
ExperimentReport run_experiment(std::string_view name, const SimConfig& cfg, const RunOptions& opts = {});

}  // namespace atm::simlab
