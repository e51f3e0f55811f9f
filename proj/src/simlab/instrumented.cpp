#include <algorithm>
#include <cmath>
#include <numbers>

#include "atm/measurement.hpp"
#include "atm/simlab/experiments.hpp"

namespace atm::simlab {

InstrumentedParams InstrumentedParams::from(const SimConfig& cfg) {
    InstrumentedParams p;
    p.episodes = get_or(cfg.world, "episodes", p.episodes);
    p.channel_noise = get_or(cfg.world, "channel_noise", p.channel_noise);
    p.feedback_signals = get_or(cfg.world, "feedback_signals", p.feedback_signals);
    p.min_spearman = get_or(cfg.acceptance, "min_spearman", p.min_spearman);
    if (p.episodes < 2) throw ConfigError("instrumented: need at least two episodes");
    if (!(p.channel_noise >= 0.0)) throw ConfigError("instrumented: channel_noise must be >= 0");
    if (p.feedback_signals < 1) throw ConfigError("instrumented: feedback_signals must be >= 1");
    return p;
}

namespace {

// Every channel observes the episode's degradation d = 1 - q through its own
// multiplicative noise; a deviation reaches its threshold at d = 0.5.
MeasurementReport observe_episode(double q, const Thresholds& th, const InstrumentedParams& p, Rng& rng) {
    const double d = 1.0 - q;
    auto noisy = [&](double scale) { return scale * 2.0 * d * std::exp(p.channel_noise * rng.normal()); };

    MeasurementReport report;
    const Flag flag{"progress", 10.0, 0.0, 20.0, th.theta_f};
    report.flag_deviations.push_back({flag_deviation(flag, flag.expected + noisy(th.theta_f)).delta, th.theta_f});

    const Vec before{0.0, 0.0};
    const double shift = noisy(th.theta_s_state);
    const Vec after{shift * 0.6, shift * 0.8};
    report.state_diff = Deviation{state_difference(before, after, th.theta_s_state).norm, th.theta_s_state};

    const double angle = std::numbers::pi * std::clamp(d + 0.1 * p.channel_noise * rng.normal(), 0.0, 1.0);
    const Vec intended{1.0, 0.0};
    const Vec moved{std::cos(angle), std::sin(angle)};
    report.contradiction = contradiction_check(intended, moved, th.theta_contra).contradiction;

    const std::vector<IndirectIndicator> indicators{{"load", 1.0, 0.5}, {"latency", 1.0, 0.3}, {"drift", 1.0, 0.2}};
    std::vector<double> observed;
    for (const auto& ind : indicators) observed.push_back(ind.expected + noisy(th.theta_ind));
    const IndirectResult indirect = indirect_score(indicators, observed, th.theta_ind);
    report.indirect = Deviation{indirect.d_ind, th.theta_ind};

    std::vector<double> signals;
    for (std::size_t j = 0; j < p.feedback_signals; ++j) {
        signals.push_back(std::clamp(q + p.channel_noise * rng.normal(), 0.0, 1.0));
    }
    report.s_ext = external_feedback(signals, th.theta_ext).s_ext;

    const double sim_dev = noisy(th.theta_sim);
    const Vec nominal{1.0, 1.0};
    const Vec outcome{1.0 + sim_dev, 1.0};
    const std::vector<std::string> actions{"episode"};
    const SimulatorPort sim = [&](const EnvState&, const SysState&, std::span<const std::string>) { return nominal; };
    report.simulation = Deviation{simulate_compare({}, {}, actions, outcome, sim, th.theta_sim).delta, th.theta_sim};

    report.reward = aggregate_reward(report);
    return report;
}

}  // namespace

ExperimentReport run_instrumented(const SimConfig& cfg, const RunOptions& opts) {
    const InstrumentedParams p = InstrumentedParams::from(cfg);
    struct SeedResult {
        double rho = 0.0;
        CsvBuilder csv;
    };
    auto results = run_seeds<SeedResult>(
        cfg.seeds,
        [&](std::uint64_t seed, std::size_t) {
            Rng rng(mix_seed(seed, 8));
            std::vector<double> quality(p.episodes);
            std::vector<double> reward(p.episodes);
            SeedResult r;
            for (std::size_t e = 0; e < p.episodes; ++e) {
                quality[e] = rng.uniform();
                reward[e] = observe_episode(quality[e], cfg.thresholds, p, rng).reward;
                if (opts.emit_csv) {
                    r.csv << seed << e << quality[e] << reward[e];
                    r.csv.end_row();
                }
            }
            r.rho = spearman(quality, reward);
            return r;
        },
        opts.threads);

    ExperimentReport report;
    report.experiment = "instrumented";
    report.config = cfg.echo();
    report.seeds = cfg.seeds;
    CsvBuilder csv({"seed", "episode", "quality", "reward"});
    std::vector<double> rhos;
    for (const auto& r : results) {
        rhos.push_back(r.rho);
        if (opts.emit_csv) csv.append_body(r.csv);
    }
    if (opts.emit_csv) report.csv.emplace_back("instrumented", csv.text());
    const double worst = *std::min_element(rhos.begin(), rhos.end());
    report.aggregates = {{"spearman", describe(rhos)}, {"episodes_per_seed", p.episodes}};
    report.criteria.push_back({"min_spearman_quality_reward", worst, p.min_spearman, worst >= p.min_spearman,
                               "worst seed, " + std::to_string(p.episodes) + " episodes each"});
    return report;
}

}  // namespace atm::simlab
