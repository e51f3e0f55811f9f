#include <algorithm>
#include <cmath>

#include "atm/executor.hpp"
#include "atm/simlab/experiments.hpp"

namespace atm::simlab {

CheckpointParams CheckpointParams::from(const SimConfig& cfg) {
    CheckpointParams p;
    p.dim = get_or(cfg.executor, "dim", p.dim);
    p.l_f = get_or(cfg.executor, "l_f", p.l_f);
    p.sigma = get_or(cfg.executor, "sigma", p.sigma);
    p.rho = get_or(cfg.executor, "rho", p.rho);
    p.rho_grid = get_or(cfg.executor, "rho_grid", p.rho_grid);
    p.steps = get_or(cfg.executor, "steps", p.steps);
    p.tail = get_or(cfg.executor, "steady_state_tail", p.tail);
    p.checkpoint_every = get_or(cfg.executor, "checkpoint_every", p.checkpoint_every);
    p.theta_ckpt = cfg.thresholds.theta_ckpt;
    p.bound_slack = get_or(cfg.acceptance, "bound_slack", p.bound_slack);
    p.max_open_loop_ratio = get_or(cfg.acceptance, "max_open_loop_ratio", p.max_open_loop_ratio);

    if (p.dim < 1) throw ConfigError("checkpoint: dim must be >= 1");
    if (!(p.l_f >= 0.0)) throw ConfigError("checkpoint: l_f must be >= 0");
    if (!(p.sigma >= 0.0)) throw ConfigError("checkpoint: sigma must be >= 0");
    for (double r : p.rho_grid) {
        if (!(r >= 0.0 && r < 1.0)) throw ConfigError("checkpoint: rho values must lie in [0, 1)");
    }
    if (!(p.rho >= 0.0 && p.rho < 1.0)) throw ConfigError("checkpoint: rho must lie in [0, 1)");
    if (p.steps < 1 || p.tail < 1) throw ConfigError("checkpoint: steps and tail must be >= 1");
    if (p.checkpoint_every < 1) throw ConfigError("checkpoint: checkpoint_every must be >= 1");
    return p;
}

ExperimentReport run_checkpoint(const SimConfig& cfg, const RunOptions& opts) {
    const CheckpointParams p = CheckpointParams::from(cfg);
    std::vector<double> grid = p.rho_grid;
    grid.push_back(p.rho);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const LinearDynamics dyn = LinearDynamics::scaled_identity(p.dim, p.l_f, p.sigma);
    DraftPlan plan;
    plan.stages.push_back({EnvState{Vec(p.dim, 0.0), 0}, "hold"});
    plan.checkpoint_every = p.checkpoint_every;
    plan.theta_ckpt = p.theta_ckpt;

    struct SeedResult {
        std::vector<double> mse;  // per grid entry
        double open_loop = 0.0;
        bool diverged = false;
        CsvBuilder csv;
    };
    auto results = run_seeds<SeedResult>(
        cfg.seeds,
        [&](std::uint64_t seed, std::size_t) {
            SeedResult r;
            const std::uint64_t noise_seed = mix_seed(seed, 5);
            for (double rho : grid) {
                try {
                    const PlanErrorTrace trace = execute_with_checkpoints(plan, dyn, {rho, true}, p.steps, noise_seed);
                    r.mse.push_back(steady_state_mse(trace, p.tail));
                    if (rho == p.rho && opts.emit_csv) {
                        for (std::size_t t = 0; t < trace.err_sq.size(); ++t) {
                            r.csv << seed << t << trace.err_sq[t] << static_cast<bool>(trace.checkpointed[t]);
                            r.csv.end_row();
                        }
                    }
                } catch (const DivergenceError&) {
                    r.mse.push_back(std::numeric_limits<double>::infinity());
                    r.diverged = true;
                }
            }
            try {
                const PlanErrorTrace open = execute_with_checkpoints(plan, dyn, {0.0, false}, p.steps, noise_seed);
                r.open_loop = steady_state_mse(open, p.tail);
            } catch (const DivergenceError&) {
                r.open_loop = std::numeric_limits<double>::infinity();
                r.diverged = true;
            }
            return r;
        },
        opts.threads);

    ExperimentReport report;
    report.experiment = "checkpoint";
    report.config = cfg.echo();
    report.seeds = cfg.seeds;
    CsvBuilder csv({"seed", "step", "err_sq", "checkpointed"});

    std::vector<double> grid_mse(grid.size(), 0.0);
    std::vector<double> open;
    bool diverged = false;
    for (const auto& r : results) {
        for (std::size_t g = 0; g < grid.size(); ++g) grid_mse[g] += r.mse[g] / static_cast<double>(results.size());
        open.push_back(r.open_loop);
        diverged = diverged || r.diverged;
        if (opts.emit_csv) csv.append_body(r.csv);
    }
    if (opts.emit_csv) report.csv.emplace_back("checkpoint", csv.text());

    const double l_f = dyn.lipschitz();
    json rows = json::array();
    std::size_t primary = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (grid[g] == p.rho) primary = g;
        const bool applicable = grid[g] * l_f < 1.0;
        json row = {{"rho", grid[g]}, {"empirical_mse", grid_mse[g]}, {"bound_applicable", applicable}};
        if (applicable) {
            row["bound"] = checkpoint_mse_bound(p.sigma, grid[g], l_f);
        } else {
            row["bound"] = "bound inapplicable";
        }
        rows.push_back(row);
    }
    const double open_mean = mean(open);
    report.aggregates = {{"l_f", l_f},
                         {"rho_grid", rows},
                         {"open_loop_mse", open_mean},
                         {"open_loop_closed_form", open_loop_mse(p.sigma, l_f)},
                         {"diverged", diverged}};

    const double bound = checkpoint_mse_bound(p.sigma, p.rho, l_f);
    const double primary_mse = grid_mse[primary];
    if (p.rho * l_f < 1.0) {
        report.criteria.push_back({"steady_state_mse_vs_bound", primary_mse, p.bound_slack * bound,
                                   primary_mse <= p.bound_slack * bound, "bound = sigma^2 / (1 - rho^2 L_F^2)"});
    }
    const double ratio = open_mean > 0.0 ? primary_mse / open_mean : 0.0;
    report.criteria.push_back({"checkpointed_over_open_loop", ratio, p.max_open_loop_ratio,
                               open_mean > 0.0 && ratio <= p.max_open_loop_ratio,
                               "empirical steady-state MSE ratio, shared noise"});
    bool monotone = true;
    for (std::size_t g = 1; g < grid.size(); ++g) monotone = monotone && grid_mse[g - 1] <= grid_mse[g];
    report.criteria.push_back({"monotone_in_rho", monotone ? 1.0 : 0.0, 1.0, monotone,
                               "steady-state MSE non-decreasing over the rho grid"});
    return report;
}

}  // namespace atm::simlab
