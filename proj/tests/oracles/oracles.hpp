#pragma once

// Brute-force reference implementations, written from the defining formulas
// without reusing any library code path, plus randomized fixture suites that
// compare them against the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "atm/common.hpp"
#include "atm/measurement.hpp"
#include "atm/memory.hpp"
#include "atm/patterns.hpp"

namespace oracle {

struct SuiteResult {
    std::size_t fixtures = 0;
    std::size_t mismatches = 0;
    double max_error = 0.0;
    std::string first_mismatch;

    void check(double expected, double actual, double tol, const std::string& what) {
        const double err = (std::isinf(expected) && expected == actual) ? 0.0 : std::abs(expected - actual);
        if (std::isnan(err) || err > tol) {
            if (mismatches++ == 0) {
                first_mismatch = what + ": expected " + atm::format_double(expected) + ", got " +
                                 atm::format_double(actual);
            }
        }
        if (!std::isnan(err)) max_error = std::max(max_error, err);
    }
    void check(bool expected, bool actual, const std::string& what) {
        check(expected ? 1.0 : 0.0, actual ? 1.0 : 0.0, 0.0, what);
    }
    bool ok() const { return mismatches == 0; }
};

// ---------------------------------------------------------------- memory

// Closed form of n exponential-smoothing steps applied to w0:
// w_n = w0 prod(1 - eta_k) + sum_k eta_k r_k prod_{j > k}(1 - eta_j).
inline double smoothed_weight(double w0, const std::vector<double>& rewards, const std::vector<double>& etas) {
    double total = w0;
    for (double eta : etas) total *= 1.0 - eta;
    for (std::size_t k = 0; k < rewards.size(); ++k) {
        double tail = etas[k] * rewards[k];
        for (std::size_t j = k + 1; j < etas.size(); ++j) tail *= 1.0 - etas[j];
        total += tail;
    }
    return total;
}

inline SuiteResult memory_replay_suite(std::size_t fixtures, std::uint64_t seed) {
    SuiteResult out;
    atm::Rng rng(seed);
    const std::vector<std::string> goals = {"g0", "g1", "g2"};
    const std::vector<std::string> actions = {"a0", "a1"};
    const std::vector<std::string> outcomes = {"ok", "fail"};
    for (std::size_t f = 0; f < fixtures; ++f) {
        atm::ScenarioMemory memory;
        const std::size_t n_scen = 1 + rng.uniform_index(3);
        std::vector<atm::ScenarioKey> keys;
        for (std::size_t s = 0; s < n_scen; ++s) keys.push_back({{static_cast<std::int64_t>(s), -1}});

        // Initial weights per (scenario, goal).
        std::map<std::pair<std::size_t, std::string>, double> initial;
        for (std::size_t s = 0; s < n_scen; ++s) {
            for (const auto& g : goals) {
                if (rng.uniform() < 0.5) {
                    const double w = rng.uniform();
                    memory.add_goal(keys[s], g, w);
                    initial[{s, g}] = w;
                }
            }
        }

        using Key = std::pair<std::size_t, std::string>;
        std::map<Key, std::vector<double>> rewards;
        std::map<Key, std::vector<double>> etas;
        const std::size_t updates = 1 + rng.uniform_index(40);
        for (std::size_t u = 0; u < updates; ++u) {
            const std::size_t s = rng.uniform_index(n_scen);
            const double r = rng.uniform();
            const double eta = 0.01 + 0.99 * rng.uniform();
            if (rng.uniform() < 0.6) {
                const auto& g = goals[rng.uniform_index(goals.size())];
                memory.update_weight(keys[s], atm::GoalTarget{g}, r, eta);
                rewards[{s, "goal:" + g}].push_back(r);
                etas[{s, "goal:" + g}].push_back(eta);
            } else {
                const auto& a = actions[rng.uniform_index(actions.size())];
                const auto& o = outcomes[rng.uniform_index(outcomes.size())];
                memory.update_weight(keys[s], atm::ActionOutcomeTarget{a, o}, r, eta);
                rewards[{s, "ao:" + a + "/" + o}].push_back(r);
                etas[{s, "ao:" + a + "/" + o}].push_back(eta);
            }
        }

        // Closed form against the stored weights.
        for (const auto& [key, rs] : rewards) {
            const auto& [s, name] = key;
            double stored = std::numeric_limits<double>::quiet_NaN();
            double w0 = 0.0;
            if (name.rfind("goal:", 0) == 0) {
                const std::string g = name.substr(5);
                for (const auto& rec : memory.goals(keys[s])) {
                    if (rec.goal_id == g) stored = rec.weight;
                }
                if (auto it = initial.find({s, g}); it != initial.end()) w0 = it->second;
            } else {
                const std::string ao = name.substr(3);
                const auto slash = ao.find('/');
                for (const auto& rec : memory.action_outcomes(keys[s])) {
                    if (rec.action_id == ao.substr(0, slash) && rec.outcome_id == ao.substr(slash + 1)) {
                        stored = rec.weight;
                    }
                }
            }
            out.check(smoothed_weight(w0, rs, etas.at(key)), stored, 1e-12,
                      "fixture " + std::to_string(f) + " " + name);
        }

        // Replaying the log from the initial weights reproduces every record exactly.
        atm::ScenarioMemory replay;
        for (const auto& [key, w] : initial) replay.add_goal(keys[key.first], key.second, w);
        for (const auto& u : memory.update_log()) replay.update_weight(u.scenario, u.target, u.reward, u.eta);
        for (const auto& k : keys) {
            const auto& a = memory.goals(k);
            const auto& b = replay.goals(k);
            out.check(static_cast<double>(a.size()), static_cast<double>(b.size()), 0.0, "replay goal count");
            for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
                out.check(a[i].weight, b[i].weight, 0.0, "replay goal weight");
            }
            const auto& c = memory.action_outcomes(k);
            const auto& d = replay.action_outcomes(k);
            out.check(static_cast<double>(c.size()), static_cast<double>(d.size()), 0.0, "replay ao count");
            for (std::size_t i = 0; i < std::min(c.size(), d.size()); ++i) {
                out.check(c[i].weight, d[i].weight, 0.0, "replay ao weight");
            }
        }
        ++out.fixtures;
    }
    return out;
}

// ---------------------------------------------------------------- patterns

inline std::int64_t count_of(const std::vector<atm::Event>& events, const std::string& i) {
    std::int64_t n = 0;
    for (const auto& e : events) n += e.id == i ? 1 : 0;
    return n;
}

// Number of i-occurrences with at least one j in (step, step + window].
inline std::int64_t followed_count(const std::vector<atm::Event>& events, const std::string& i,
                                   const std::string& j, std::int64_t window) {
    std::int64_t n = 0;
    for (const auto& a : events) {
        if (a.id != i) continue;
        bool hit = false;
        for (const auto& b : events) {
            if (b.id == j && b.step > a.step && b.step <= a.step + window) hit = true;
        }
        n += hit ? 1 : 0;
    }
    return n;
}

inline double temporal_p(const std::vector<atm::Event>& events, const std::string& i, const std::string& j,
                         std::int64_t window) {
    return static_cast<double>(followed_count(events, i, j, window)) / static_cast<double>(count_of(events, i));
}

inline double spatial_p(const std::vector<atm::Event>& events, const std::string& i, const std::string& j) {
    std::int64_t hits = 0;
    std::int64_t total = 0;
    for (std::size_t a = 0; a < events.size(); ++a) {
        if (events[a].id != i) continue;
        ++total;
        bool hit = false;
        for (std::size_t b = 0; b < events.size(); ++b) {
            if (b != a && events[b].id == j && events[b].location == events[a].location) hit = true;
        }
        hits += hit ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

inline std::map<atm::EventPair, double> coherence(const std::vector<atm::Event>& events, std::int64_t window,
                                                  double theta) {
    std::vector<std::string> ids;
    for (const auto& e : events) {
        if (std::find(ids.begin(), ids.end(), e.id) == ids.end()) ids.push_back(e.id);
    }
    std::map<atm::EventPair, double> out;
    for (const auto& i : ids) {
        for (const auto& j : ids) {
            if (i == j) continue;
            const double p = temporal_p(events, i, j, window);
            if (p > theta) out[{i, j}] = p;
        }
    }
    return out;
}

inline std::vector<atm::Event> random_events(atm::Rng& rng, std::size_t max_len) {
    static const std::vector<std::string> ids = {"A", "B", "C", "D"};
    static const std::vector<std::string> locs = {"l0", "l1", "l2"};
    std::vector<atm::Event> events;
    const std::size_t n = rng.uniform_index(max_len + 1);
    std::int64_t step = 0;
    for (std::size_t k = 0; k < n; ++k) {
        step += static_cast<std::int64_t>(rng.uniform_index(3));  // repeats allowed
        events.push_back({ids[rng.uniform_index(ids.size())], step, locs[rng.uniform_index(locs.size())]});
    }
    return events;
}

inline SuiteResult pattern_suite(std::size_t fixtures, std::uint64_t seed) {
    SuiteResult out;
    atm::Rng rng(seed);
    static const std::vector<std::string> ids = {"A", "B", "C", "D"};
    for (std::size_t f = 0; f < fixtures; ++f) {
        const auto events = random_events(rng, 40);
        const atm::EventStream stream(events);
        const auto window = static_cast<std::int64_t>(1 + rng.uniform_index(4));
        const double theta = rng.uniform();
        const std::string tag = "fixture " + std::to_string(f);

        atm::IncrementalMiner miner(window);
        for (const auto& e : events) miner.observe(e);

        for (const auto& i : ids) {
            out.check(static_cast<double>(count_of(events, i)), static_cast<double>(miner.count(i)), 0.0,
                      tag + " count " + i);
            if (count_of(events, i) == 0) continue;
            for (const auto& j : ids) {
                const double p = temporal_p(events, i, j, window);
                const auto t = atm::temporal_assoc(stream, i, j, window, theta);
                out.check(p, t.p, 1e-12, tag + " temporal " + i + j);
                out.check(p > theta, t.significant, tag + " temporal flag " + i + j);
                const double s = spatial_p(events, i, j);
                const auto sp = atm::spatial_assoc(stream, i, j, theta);
                out.check(s, sp.p, 1e-12, tag + " spatial " + i + j);
                out.check(s > theta, sp.significant, tag + " spatial flag " + i + j);
                if (i != j) {
                    out.check(static_cast<double>(followed_count(events, i, j, window)),
                              static_cast<double>(miner.pair_count(i, j)), 0.0, tag + " pair count " + i + j);
                }
            }
        }

        const auto expected = coherence(events, window, theta);
        const auto batch = atm::mine_coherence(stream, window, theta);
        const auto streamed = miner.coherence(theta);
        out.check(static_cast<double>(expected.size()), static_cast<double>(batch.pairs.size()), 0.0,
                  tag + " coherence size");
        out.check(true, batch == streamed, tag + " incremental equals batch");
        for (const auto& [pair, p] : expected) {
            const auto it = batch.pairs.find(pair);
            out.check(p, it == batch.pairs.end() ? -1.0 : it->second, 1e-12,
                      tag + " coherence " + pair.first + pair.second);
        }
        ++out.fixtures;
    }
    return out;
}

// ---------------------------------------------------------------- measurement

inline double score_of(double value, double threshold) {
    if (value <= threshold) return 1.0;
    if (threshold == 0.0 || std::isinf(value)) return 0.0;
    const double s = 2.0 - value / threshold;
    return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
}

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    long double sq = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const long double d = static_cast<long double>(a[k]) - static_cast<long double>(b[k]);
        sq += d * d;
    }
    return static_cast<double>(std::sqrt(sq));
}

inline double cosine_similarity_shifted(const std::vector<double>& a, const std::vector<double>& b) {
    long double dot = 0.0L;
    long double na = 0.0L;
    long double nb = 0.0L;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += static_cast<long double>(a[k]) * b[k];
        na += static_cast<long double>(a[k]) * a[k];
        nb += static_cast<long double>(b[k]) * b[k];
    }
    long double c = dot / std::sqrt(na * nb);
    c = std::max(-1.0L, std::min(1.0L, c));
    return static_cast<double>((1.0L + c) / 2.0L);
}

inline std::vector<double> random_vec(atm::Rng& rng, std::size_t dim, double scale) {
    std::vector<double> v(dim);
    for (double& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
    return v;
}

inline SuiteResult measurement_suite(std::size_t fixtures, std::uint64_t seed) {
    SuiteResult out;
    atm::Rng rng(seed);
    for (std::size_t f = 0; f < fixtures; ++f) {
        const std::string tag = "fixture " + std::to_string(f);
        const std::size_t dim = 1 + rng.uniform_index(6);

        // Flags.
        atm::Flag flag{"f", 10.0 * rng.uniform(), 0.0, 10.0, rng.uniform()};
        const double observed = 10.0 * rng.uniform();
        const auto fr = atm::flag_deviation(flag, observed);
        const double fd = observed > flag.expected ? observed - flag.expected : flag.expected - observed;
        out.check(fd, fr.delta, 1e-12, tag + " flag delta");
        out.check(fd > flag.theta_f, fr.violated, tag + " flag violated");

        // State difference.
        const auto before = random_vec(rng, dim, 3.0);
        const auto after = random_vec(rng, dim, 3.0);
        const double theta_s = 3.0 * rng.uniform();
        const auto sd = atm::state_difference(before, after, theta_s);
        for (std::size_t k = 0; k < dim; ++k) out.check(after[k] - before[k], sd.delta[k], 0.0, tag + " state delta");
        out.check(euclid(after, before), sd.norm, 1e-12, tag + " state norm");
        out.check(euclid(after, before) > theta_s, sd.material, tag + " state material");

        // Contradiction.
        const auto g = random_vec(rng, dim, 1.0);
        const auto o = random_vec(rng, dim, 1.0);
        const double theta_c = 0.05 + 0.95 * rng.uniform();
        const auto cr = atm::contradiction_check(g, o, theta_c);
        const double sim = cosine_similarity_shifted(g, o);
        out.check(sim, cr.similarities.front(), 1e-12, tag + " similarity");
        if (std::abs(sim - theta_c) > 1e-12) out.check(sim < theta_c, cr.contradiction, tag + " contradiction");

        // Indirect indicators.
        std::vector<atm::IndirectIndicator> indicators;
        std::vector<double> values;
        double d_ind = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            indicators.push_back({"i" + std::to_string(k), rng.uniform(), rng.uniform()});
            values.push_back(2.0 * rng.uniform());
            d_ind += indicators[k].weight * std::abs(values[k] - indicators[k].expected);
        }
        const double theta_i = 2.0 * rng.uniform();
        const auto ir = atm::indirect_score(indicators, values, theta_i);
        out.check(d_ind, ir.d_ind, 1e-12, tag + " indirect");
        if (std::abs(d_ind - theta_i) > 1e-12) out.check(d_ind > theta_i, ir.abnormal, tag + " abnormal");

        // External feedback.
        std::vector<double> signals(1 + rng.uniform_index(8));
        long double total = 0.0L;
        for (double& s : signals) {
            s = rng.uniform();
            total += s;
        }
        const double mean = static_cast<double>(total / static_cast<long double>(signals.size()));
        const double theta_e = rng.uniform();
        const auto ef = atm::external_feedback(signals, theta_e);
        out.check(mean, ef.s_ext, 1e-12, tag + " s_ext");
        if (std::abs(mean - theta_e) > 1e-12) out.check(mean < theta_e, ef.unacceptable, tag + " unacceptable");

        // Simulation.
        const auto predicted = random_vec(rng, dim, 1.0);
        const auto outcome = random_vec(rng, dim, 1.0);
        const double theta_sim = rng.uniform();
        const atm::SimulatorPort sim_port = [&](const atm::EnvState&, const atm::SysState&,
                                                std::span<const std::string>) { return predicted; };
        const auto sc = atm::simulate_compare({}, {}, {}, outcome, sim_port, theta_sim);
        out.check(euclid(outcome, predicted), sc.delta, 1e-12, tag + " sim delta");

        // Aggregate reward over a random channel subset and weighting.
        atm::MeasurementReport report;
        std::vector<std::optional<double>> scores(atm::kChannelCount);
        if (rng.uniform() < 0.8) {
            double acc = 0.0;
            const std::size_t nf = 1 + rng.uniform_index(3);
            for (std::size_t k = 0; k < nf; ++k) {
                const atm::Deviation d{3.0 * rng.uniform(), rng.uniform()};
                report.flag_deviations.push_back(d);
                acc += score_of(d.value, d.threshold);
            }
            scores[0] = acc / static_cast<double>(nf);
        }
        if (rng.uniform() < 0.7) {
            report.state_diff = atm::Deviation{sd.norm, theta_s};
            scores[1] = score_of(sd.norm, theta_s);
        }
        if (rng.uniform() < 0.7) {
            report.contradiction = cr.contradiction;
            scores[2] = cr.contradiction ? 0.0 : 1.0;
        }
        if (rng.uniform() < 0.7) {
            report.indirect = atm::Deviation{d_ind, theta_i};
            scores[3] = score_of(d_ind, theta_i);
        }
        if (rng.uniform() < 0.7) {
            report.s_ext = mean;
            scores[4] = mean;
        }
        if (rng.uniform() < 0.7) {
            report.simulation = atm::Deviation{sc.delta, theta_sim};
            scores[5] = score_of(sc.delta, theta_sim);
        }
        bool any = false;
        for (const auto& s : scores) any = any || s.has_value();
        if (!any) {
            report.s_ext = 0.5;
            scores[4] = 0.5;
        }
        atm::ChannelWeights w{};
        double wsum = 0.0;
        for (double& x : w) {
            x = rng.uniform();
            wsum += x;
        }
        for (double& x : w) x /= wsum;
        const bool weighted = rng.uniform() < 0.5;
        double num = 0.0;
        double den = 0.0;
        for (std::size_t c = 0; c < atm::kChannelCount; ++c) {
            if (!scores[c]) continue;
            const double wc = weighted ? w[c] : 1.0;
            num += wc * *scores[c];
            den += wc;
        }
        if (den > 0.0) {
            const double r = atm::aggregate_reward(report, weighted ? std::optional(w) : std::nullopt);
            out.check(num / den, r, 1e-12, tag + " reward");
        }
        ++out.fixtures;
    }
    return out;
}

}  // namespace oracle
