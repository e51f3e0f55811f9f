#include <algorithm>
#include <cmath>
#include <limits>

#include "atm/measurement.hpp"
#include "atm/selection.hpp"
#include "atm/simlab/experiments.hpp"

namespace atm::simlab {

BanditPolicy parse_policy(const std::string& name) {
    if (name == "egreedy") return BanditPolicy::EpsilonGreedy;
    if (name == "oracle") return BanditPolicy::Oracle;
    if (name == "uniform") return BanditPolicy::Uniform;
    throw ConfigError("unknown selector policy '" + name + "'");
}

namespace {

std::string_view policy_name(BanditPolicy p) {
    switch (p) {
        case BanditPolicy::EpsilonGreedy: return "egreedy";
        case BanditPolicy::Oracle: return "oracle";
        case BanditPolicy::Uniform: return "uniform";
    }
    return "egreedy";
}

void check_means(const Vec& means) {
    if (means.empty()) throw ConfigError("bandit world: no arms");
    for (double m : means) {
        if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("bandit world: arm means must lie in [0, 1]");
    }
}

std::size_t best_arm(const Vec& means) {
    return static_cast<std::size_t>(std::max_element(means.begin(), means.end()) - means.begin());
}

struct BanditTrace {
    std::vector<std::uint32_t> arms;
    std::vector<double> rewards;
    std::vector<double> regret;  // expected instantaneous regret
    std::vector<std::int64_t> detections;
    double cum_regret = 0.0;
};

struct BanditSetup {
    const std::vector<Vec>* regimes = nullptr;
    std::int64_t regime_length = 0;
    std::int64_t horizon = 0;
    BanditPolicy policy = BanditPolicy::EpsilonGreedy;
    double epsilon_c = 5.0;
    // Detection is optional; stationary runs have none.
    const ChangeDetectorConfig* detector = nullptr;
    double obs_noise = 0.0;
    bool reset_on_change = false;
};

BanditTrace run_bandit(const BanditSetup& setup, std::uint64_t seed) {
    const auto& regimes = *setup.regimes;
    const std::size_t arms = regimes.front().size();

    std::vector<std::string> ids;
    for (std::size_t a = 0; a < arms; ++a) ids.push_back("arm" + std::to_string(a));
    SelectorConfig scfg;
    scfg.epsilon.c = setup.epsilon_c;
    scfg.rng_seed = mix_seed(seed, 1);
    Selector selector(ids, scfg);

    Rng reward_rng(mix_seed(seed, 2));
    Rng obs_rng(mix_seed(seed, 3));
    Rng policy_rng(mix_seed(seed, 4));
    std::optional<ChangeDetector> detector;
    if (setup.detector != nullptr) detector.emplace(*setup.detector);

    BanditTrace trace;
    const auto n = static_cast<std::size_t>(setup.horizon);
    trace.arms.reserve(n);
    trace.rewards.reserve(n);
    trace.regret.reserve(n);

    EnvState env;
    env.features.resize(arms);
    for (std::int64_t t = 0; t < setup.horizon; ++t) {
        const auto regime = static_cast<std::size_t>(
            std::min<std::int64_t>(t / setup.regime_length, static_cast<std::int64_t>(regimes.size()) - 1));
        const Vec& means = regimes[regime];

        if (detector) {
            env.step = t;
            for (std::size_t a = 0; a < arms; ++a) env.features[a] = means[a] + setup.obs_noise * obs_rng.normal();
            if (detector->observe(env).changed) {
                trace.detections.push_back(t);
                if (setup.reset_on_change) selector.reset_exploration();
            }
        }

        std::size_t arm = 0;
        switch (setup.policy) {
            case BanditPolicy::EpsilonGreedy: arm = selector.select(); break;
            case BanditPolicy::Oracle: arm = best_arm(means); break;
            case BanditPolicy::Uniform: arm = policy_rng.uniform_index(arms); break;
        }

        // One uniform per step keeps reward draws paired across policies.
        const double raw = reward_rng.uniform() < means[arm] ? 1.0 : 0.0;
        const double signal[] = {raw};
        MeasurementReport report;
        report.s_ext = external_feedback(signal, 0.5).s_ext;
        const double reward = aggregate_reward(report);
        if (setup.policy == BanditPolicy::EpsilonGreedy) selector.update(arm, reward);

        const double inst = means[best_arm(means)] - means[arm];
        trace.cum_regret += inst;
        trace.arms.push_back(static_cast<std::uint32_t>(arm));
        trace.rewards.push_back(reward);
        trace.regret.push_back(inst);
    }
    return trace;
}

CsvBuilder bandit_csv_header() {
    return CsvBuilder({"seed", "step", "arm", "reward", "instant_regret", "cum_regret", "change_detected"});
}

CsvBuilder bandit_csv(std::uint64_t seed, const BanditTrace& trace) {
    CsvBuilder csv;
    csv.reserve(trace.arms.size() * 40);
    double cum = 0.0;
    std::size_t next_detection = 0;
    for (std::size_t t = 0; t < trace.arms.size(); ++t) {
        cum += trace.regret[t];
        bool detected = false;
        if (next_detection < trace.detections.size() &&
            trace.detections[next_detection] == static_cast<std::int64_t>(t)) {
            detected = true;
            ++next_detection;
        }
        csv << seed << t << static_cast<std::int64_t>(trace.arms[t]) << trace.rewards[t] << trace.regret[t] << cum
            << detected;
        csv.end_row();
    }
    return csv;
}

double range_mean(const std::vector<double>& v, std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i < to; ++i) s += v[i];
    return s / static_cast<double>(to - from);
}

}  // namespace

StationaryParams StationaryParams::from(const SimConfig& cfg) {
    StationaryParams p;
    p.arm_means = get_or(cfg.world, "arm_means", p.arm_means);
    p.horizon = get_or(cfg.world, "horizon", p.horizon);
    p.epsilon_c = get_or(cfg.selector, "epsilon_c", p.epsilon_c);
    p.policy = parse_policy(get_or(cfg.selector, "policy", std::string("egreedy")));
    p.tail_fraction = get_or(cfg.acceptance, "tail_fraction", p.tail_fraction);
    p.max_tail_regret = get_or(cfg.acceptance, "max_tail_regret", p.max_tail_regret);
    p.max_half_ratio = get_or(cfg.acceptance, "max_half_ratio", p.max_half_ratio);
    check_means(p.arm_means);
    if (p.horizon < 10) throw ConfigError("stationary: horizon must be >= 10");
    if (!(p.epsilon_c > 0.0)) throw ConfigError("stationary: epsilon_c must be > 0");
    if (!(p.tail_fraction > 0.0 && p.tail_fraction <= 1.0)) throw ConfigError("stationary: bad tail_fraction");
    return p;
}

ExperimentReport run_stationary(const SimConfig& cfg, const RunOptions& opts) {
    const StationaryParams p = StationaryParams::from(cfg);
    const std::vector<Vec> regimes{p.arm_means};
    BanditSetup setup;
    setup.regimes = &regimes;
    setup.regime_length = p.horizon;
    setup.horizon = p.horizon;
    setup.policy = p.policy;
    setup.epsilon_c = p.epsilon_c;

    struct SeedResult {
        double tail = 0.0;
        double first_half = 0.0;
        double second_half = 0.0;
        double cum = 0.0;
        CsvBuilder csv;
    };
    const auto n = static_cast<std::size_t>(p.horizon);
    const auto tail_start = n - static_cast<std::size_t>(std::ceil(p.tail_fraction * static_cast<double>(n)));
    auto results = run_seeds<SeedResult>(
        cfg.seeds,
        [&](std::uint64_t seed, std::size_t) {
            const BanditTrace trace = run_bandit(setup, seed);
            SeedResult r;
            r.tail = range_mean(trace.regret, tail_start, n);
            r.first_half = range_mean(trace.regret, 0, n / 2);
            r.second_half = range_mean(trace.regret, n / 2, n);
            r.cum = trace.cum_regret;
            if (opts.emit_csv) r.csv = bandit_csv(seed, trace);
            return r;
        },
        opts.threads);

    ExperimentReport report;
    report.experiment = "stationary";
    report.config = cfg.echo();
    report.seeds = cfg.seeds;
    std::vector<double> tail;
    std::vector<double> first;
    std::vector<double> second;
    std::vector<double> cum;
    CsvBuilder csv = bandit_csv_header();
    for (const auto& r : results) {
        tail.push_back(r.tail);
        first.push_back(r.first_half);
        second.push_back(r.second_half);
        cum.push_back(r.cum);
        if (opts.emit_csv) csv.append_body(r.csv);
    }
    if (opts.emit_csv) report.csv.emplace_back("stationary", csv.text());

    const double tail_mean = mean(tail);
    const double first_mean = mean(first);
    const double second_mean = mean(second);
    report.aggregates = {{"policy", policy_name(p.policy)},
                         {"tail_regret_per_step", describe(tail)},
                         {"first_half_regret_per_step", describe(first)},
                         {"second_half_regret_per_step", describe(second)},
                         {"final_cum_regret", describe(cum)}};
    if (p.policy == BanditPolicy::EpsilonGreedy) {
        report.criteria.push_back({"tail_regret_per_step", tail_mean, p.max_tail_regret,
                                   tail_mean <= p.max_tail_regret, "mean over seeds of the last-decile regret"});
        const double ratio = first_mean > 0.0 ? second_mean / first_mean : 0.0;
        report.criteria.push_back({"second_over_first_half", ratio, p.max_half_ratio, ratio <= p.max_half_ratio,
                                   "second-half over first-half mean per-step regret"});
    }
    return report;
}

TrackingParams TrackingParams::from(const SimConfig& cfg) {
    TrackingParams p;
    const auto arms = get_or<std::size_t>(cfg.world, "arms", 5);
    const auto count = get_or<std::size_t>(cfg.world, "regime_count", 4);
    const double best = get_or(cfg.world, "best_mean", 0.9);
    const double base = get_or(cfg.world, "base_mean", 0.5);
    if (cfg.world.contains("regimes")) {
        p.regimes = get_or(cfg.world, "regimes", p.regimes);
    } else {
        // Regime k makes arm k (mod arms) the best one.
        for (std::size_t k = 0; k < count; ++k) {
            Vec means(arms, base);
            means[k % arms] = best;
            p.regimes.push_back(means);
        }
    }
    p.regime_length = get_or(cfg.world, "regime_length", p.regime_length);
    p.obs_noise = get_or(cfg.world, "obs_noise", p.obs_noise);
    p.detector.window = get_or(cfg.world, "detector_window", p.detector.window);
    p.detector.theta_e = cfg.thresholds.theta_e;
    p.detector.norm = parse_norm(get_or(cfg.world, "norm", std::string("l2")));
    p.epsilon_c = get_or(cfg.selector, "epsilon_c", p.epsilon_c);
    p.max_regret_ratio = get_or(cfg.acceptance, "max_regret_ratio", p.max_regret_ratio);
    p.max_latency = get_or(cfg.acceptance, "max_detection_latency", p.max_latency);

    if (p.regimes.empty()) throw ConfigError("tracking: no regimes");
    for (const auto& r : p.regimes) {
        check_means(r);
        if (r.size() != p.regimes.front().size()) throw ConfigError("tracking: regimes differ in arm count");
    }
    if (p.regime_length < 1) throw ConfigError("tracking: regime_length must be >= 1");
    if (p.obs_noise < 0.0) throw ConfigError("tracking: obs_noise must be >= 0");
    if (p.detector.window < 1) throw ConfigError("tracking: detector_window must be >= 1");
    if (!(p.detector.theta_e > 0.0)) throw ConfigError("tracking: theta_e must be > 0");
    return p;
}

ExperimentReport run_tracking(const SimConfig& cfg, const RunOptions& opts) {
    const TrackingParams p = TrackingParams::from(cfg);
    const auto horizon = p.regime_length * static_cast<std::int64_t>(p.regimes.size());
    std::vector<std::int64_t> changes;
    for (std::size_t k = 1; k < p.regimes.size(); ++k) changes.push_back(p.regime_length * static_cast<std::int64_t>(k));

    BanditSetup setup;
    setup.regimes = &p.regimes;
    setup.regime_length = p.regime_length;
    setup.horizon = horizon;
    setup.epsilon_c = p.epsilon_c;
    setup.detector = &p.detector;
    setup.obs_noise = p.obs_noise;

    struct SeedResult {
        double cum_reset = 0.0;
        double cum_noreset = 0.0;
        std::vector<std::int64_t> latencies;  // -1 = missed
        std::int64_t false_alarms = 0;
        CsvBuilder csv_reset;
        CsvBuilder csv_noreset;
    };
    auto results = run_seeds<SeedResult>(
        cfg.seeds,
        [&](std::uint64_t seed, std::size_t) {
            BanditSetup on = setup;
            on.reset_on_change = true;
            BanditSetup off = setup;
            off.reset_on_change = false;
            const BanditTrace a = run_bandit(on, seed);
            const BanditTrace b = run_bandit(off, seed);
            SeedResult r;
            r.cum_reset = a.cum_regret;
            r.cum_noreset = b.cum_regret;
            std::vector<bool> used(a.detections.size(), false);
            for (std::size_t k = 0; k < changes.size(); ++k) {
                const std::int64_t tau = changes[k];
                const std::int64_t next = k + 1 < changes.size() ? changes[k + 1] : horizon;
                std::int64_t latency = -1;
                for (std::size_t d = 0; d < a.detections.size(); ++d) {
                    if (a.detections[d] >= tau && a.detections[d] < next) {
                        latency = a.detections[d] - tau;
                        used[d] = true;
                        break;
                    }
                }
                r.latencies.push_back(latency);
            }
            r.false_alarms = std::count(used.begin(), used.end(), false);
            if (opts.emit_csv) {
                r.csv_reset = bandit_csv(seed, a);
                r.csv_noreset = bandit_csv(seed, b);
            }
            return r;
        },
        opts.threads);

    ExperimentReport report;
    report.experiment = "tracking";
    report.config = cfg.echo();
    report.seeds = cfg.seeds;
    std::vector<double> on;
    std::vector<double> off;
    std::vector<double> latencies;
    std::int64_t missed = 0;
    std::int64_t false_alarms = 0;
    std::int64_t worst_latency = 0;
    CsvBuilder csv_on = bandit_csv_header();
    CsvBuilder csv_off = bandit_csv_header();
    for (const auto& r : results) {
        on.push_back(r.cum_reset);
        off.push_back(r.cum_noreset);
        for (std::int64_t l : r.latencies) {
            if (l < 0) {
                ++missed;
            } else {
                latencies.push_back(static_cast<double>(l));
                worst_latency = std::max(worst_latency, l);
            }
        }
        false_alarms += r.false_alarms;
        if (opts.emit_csv) {
            csv_on.append_body(r.csv_reset);
            csv_off.append_body(r.csv_noreset);
        }
    }
    if (opts.emit_csv) {
        report.csv.emplace_back("tracking", csv_on.text());
        report.csv.emplace_back("tracking_baseline", csv_off.text());
    }

    const double ratio = mean(off) > 0.0 ? mean(on) / mean(off) : 1.0;
    report.aggregates = {{"change_points", changes},
                         {"cum_regret_reset", describe(on)},
                         {"cum_regret_no_reset", describe(off)},
                         {"regret_ratio", ratio},
                         {"missed_changes", missed},
                         {"false_alarms", false_alarms},
                         {"worst_latency", worst_latency}};
    if (!latencies.empty()) report.aggregates["detection_latency"] = describe(latencies);

    if (!changes.empty()) {
        report.criteria.push_back({"reset_over_no_reset_regret", ratio, p.max_regret_ratio,
                                   ratio <= p.max_regret_ratio, "paired seeds, final cumulative tracking regret"});
        const bool all_detected = missed == 0 && worst_latency <= p.max_latency;
        report.criteria.push_back({"worst_detection_latency",
                                   missed == 0 ? static_cast<double>(worst_latency)
                                               : std::numeric_limits<double>::infinity(),
                                   static_cast<double>(p.max_latency), all_detected,
                                   std::to_string(missed) + " changes missed"});
    }
    return report;
}

}  // namespace atm::simlab
