#include "atm/measurement.hpp"

#include <cmath>
#include <numeric>

namespace atm {

FlagResult flag_deviation(const Flag& flag, double observed) {
    require(std::isfinite(observed), "flag_deviation: observed value must be finite");
    const double delta = std::abs(observed - flag.expected);
    return {delta, delta > flag.theta_f};
}

StateDifference state_difference(std::span<const double> before, std::span<const double> after,
                                 double theta_s_state) {
    require(before.size() == after.size(), "state_difference: dimension mismatch");
    StateDifference out;
    out.delta.resize(before.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        out.delta[i] = after[i] - before[i];
        sq += out.delta[i] * out.delta[i];
    }
    out.norm = std::sqrt(sq);
    out.material = out.norm > theta_s_state;
    return out;
}

double shifted_cosine(std::span<const double> a, std::span<const double> b) {
    require(a.size() == b.size(), "shifted_cosine: dimension mismatch");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    require(na > 0.0 && nb > 0.0, "contradiction_check: zero outcome vector");
    const double cosine = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
    return 0.5 * (1.0 + cosine);
}

ContradictionResult contradiction_check(std::span<const double> goal_outcome,
                                        std::span<const double> observed_outcome, double theta_contra,
                                        const std::vector<CheckAspect>& aspects) {
    require(theta_contra > 0.0 && theta_contra <= 1.0, "contradiction_check: theta must lie in (0, 1]");
    require(goal_outcome.size() == observed_outcome.size(), "contradiction_check: dimension mismatch");
    ContradictionResult out;
    if (aspects.empty()) {
        out.similarities.push_back(shifted_cosine(goal_outcome, observed_outcome));
    } else {
        for (const auto& aspect : aspects) {
            require(!aspect.empty(), "contradiction_check: empty check aspect");
            Vec g;
            Vec o;
            for (std::size_t idx : aspect) {
                require(idx < goal_outcome.size(), "contradiction_check: aspect index out of range");
                g.push_back(goal_outcome[idx]);
                o.push_back(observed_outcome[idx]);
            }
            out.similarities.push_back(shifted_cosine(g, o));
        }
    }
    for (double s : out.similarities) {
        if (s < theta_contra) out.contradiction = true;
    }
    return out;
}

IndirectResult indirect_score(std::span<const IndirectIndicator> indicators, std::span<const double> observed,
                              double theta_ind) {
    require(indicators.size() == observed.size(), "indirect_score: indicator/observation length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < indicators.size(); ++i) {
        require(indicators[i].weight >= 0.0, "indirect_score: weights must be >= 0");
        d += indicators[i].weight * std::abs(observed[i] - indicators[i].expected);
    }
    return {d, d > theta_ind};
}

ExternalFeedback external_feedback(std::span<const double> signals, double theta_ext) {
    if (signals.empty()) throw NotFound("external_feedback: no feedback signals");
    for (double s : signals) {
        require(s >= 0.0 && s <= 1.0, "external_feedback: signals must lie in [0, 1]");
    }
    const double mean = std::accumulate(signals.begin(), signals.end(), 0.0) / static_cast<double>(signals.size());
    return {mean, mean < theta_ext};
}

SimulationCheck simulate_compare(const EnvState& env, const SysState& sys, std::span<const std::string> actions,
                                 std::span<const double> observed_outcome, const SimulatorPort& sim,
                                 double theta_sim) {
    Vec predicted;
    try {
        predicted = sim(env, sys, actions);
    } catch (const std::exception& e) {
        return {std::numeric_limits<double>::infinity(), true, std::string("simulator failure: ") + e.what()};
    }
    if (predicted.size() != observed_outcome.size()) {
        return {std::numeric_limits<double>::infinity(), true,
                "simulator outcome has dimension " + std::to_string(predicted.size()) + ", observed " +
                    std::to_string(observed_outcome.size())};
    }
    const double delta = distance(observed_outcome, predicted);
    return {delta, delta > theta_sim, {}};
}

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::Flags: return "flags";
        case Channel::State: return "state";
        case Channel::Contradiction: return "contradiction";
        case Channel::Indirect: return "indirect";
        case Channel::External: return "external";
        case Channel::Simulation: return "simulation";
    }
    return "flags";
}

double deviation_score(const Deviation& d) {
    require(d.value >= 0.0 && !std::isnan(d.value), "deviation_score: deviation must be >= 0");
    require(d.threshold >= 0.0, "deviation_score: threshold must be >= 0");
    if (d.value <= d.threshold) return 1.0;
    if (std::isinf(d.value) || d.threshold == 0.0) return 0.0;
    return std::clamp(2.0 - d.value / d.threshold, 0.0, 1.0);
}

std::array<std::optional<double>, kChannelCount> channel_scores(const MeasurementReport& report) {
    std::array<std::optional<double>, kChannelCount> scores;
    if (!report.flag_deviations.empty()) {
        double sum = 0.0;
        for (const auto& f : report.flag_deviations) sum += deviation_score(f);
        scores[static_cast<std::size_t>(Channel::Flags)] = sum / static_cast<double>(report.flag_deviations.size());
    }
    if (report.state_diff) scores[static_cast<std::size_t>(Channel::State)] = deviation_score(*report.state_diff);
    if (report.contradiction) {
        scores[static_cast<std::size_t>(Channel::Contradiction)] = *report.contradiction ? 0.0 : 1.0;
    }
    if (report.indirect) scores[static_cast<std::size_t>(Channel::Indirect)] = deviation_score(*report.indirect);
    if (report.s_ext) {
        require(*report.s_ext >= 0.0 && *report.s_ext <= 1.0, "aggregate_reward: s_ext must lie in [0, 1]");
        scores[static_cast<std::size_t>(Channel::External)] = *report.s_ext;
    }
    if (report.simulation) {
        scores[static_cast<std::size_t>(Channel::Simulation)] = deviation_score(*report.simulation);
    }
    return scores;
}

double aggregate_reward(const MeasurementReport& report, const std::optional<ChannelWeights>& weights) {
    ChannelWeights w{};
    if (weights) {
        double total = 0.0;
        for (double x : *weights) {
            require(x >= 0.0 && std::isfinite(x), "aggregate_reward: weights must be non-negative");
            total += x;
        }
        require(std::abs(total - 1.0) <= 1e-9, "aggregate_reward: weights must sum to 1");
        w = *weights;
    } else {
        w.fill(1.0);
    }

    const auto scores = channel_scores(report);
    double mass = 0.0;
    double acc = 0.0;
    for (std::size_t c = 0; c < kChannelCount; ++c) {
        if (!scores[c]) continue;
        mass += w[c];
        acc += w[c] * *scores[c];
    }
    require(mass > 0.0, "aggregate_reward: no weighted channel carries data");
    return std::clamp(acc / mass, 0.0, 1.0);
}

}  // namespace atm
