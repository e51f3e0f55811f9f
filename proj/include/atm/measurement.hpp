#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atm/common.hpp"
#include "atm/world.hpp"

namespace atm {

struct Flag {
    std::string id;
    double expected = 0.0;
    double min = 0.0;
    double max = 0.0;
    double theta_f = 1.0;
};

struct FlagResult {
    double delta = 0.0;
    bool violated = false;
};

// delta = |observed - expected|, violated iff delta > theta_f.
FlagResult flag_deviation(const Flag& flag, double observed);

struct StateDifference {
    Vec delta;  // after - before
    double norm = 0.0;
    bool material = false;  // norm > theta_s_state
};

StateDifference state_difference(std::span<const double> before, std::span<const double> after,
                                 double theta_s_state);

// (1 + cos(a, b)) / 2, in [0, 1]. Zero vectors are rejected.
double shifted_cosine(std::span<const double> a, std::span<const double> b);

using CheckAspect = std::vector<std::size_t>;

struct ContradictionResult {
    bool contradiction = false;
    std::vector<double> similarities;  // one per aspect
};

// Each aspect (a feature subset) is compared independently; any aspect with
// similarity below theta_contra is a contradiction. No aspects = whole vector.
ContradictionResult contradiction_check(std::span<const double> goal_outcome,
                                        std::span<const double> observed_outcome, double theta_contra,
                                        const std::vector<CheckAspect>& aspects = {});

struct IndirectIndicator {
    std::string id;
    double expected = 0.0;
    double weight = 1.0;
};

struct IndirectResult {
    double d_ind = 0.0;
    bool abnormal = false;
};

// d_ind = sum w_i |I_i - I_i^exp|, abnormal iff d_ind > theta_ind.
IndirectResult indirect_score(std::span<const IndirectIndicator> indicators, std::span<const double> observed,
                              double theta_ind);

struct ExternalFeedback {
    double s_ext = 0.0;
    bool unacceptable = false;
};

// Mean approval; unacceptable iff mean < theta_ext. Throws NotFound on no signals.
ExternalFeedback external_feedback(std::span<const double> signals, double theta_ext);

// Replays actions from (env, sys) and returns the predicted outcome vector.
using SimulatorPort =
    std::function<Vec(const EnvState&, const SysState&, std::span<const std::string> actions)>;

struct SimulationCheck {
    double delta = 0.0;
    bool inconsistent = false;
    std::string diagnostic;
};

// A simulator failure is reported as inconsistent, never swallowed.
SimulationCheck simulate_compare(const EnvState& env, const SysState& sys, std::span<const std::string> actions,
                                 std::span<const double> observed_outcome, const SimulatorPort& sim,
                                 double theta_sim);

// A measured deviation together with the threshold it is judged against.
struct Deviation {
    double value = 0.0;
    double threshold = 1.0;
};

enum class Channel : std::size_t { Flags, State, Contradiction, Indirect, External, Simulation };
inline constexpr std::size_t kChannelCount = 6;
using ChannelWeights = std::array<double, kChannelCount>;

std::string_view to_string(Channel channel);

// Channels without data are left empty and drop out of the reward.
struct MeasurementReport {
    std::vector<Deviation> flag_deviations;
    std::optional<Deviation> state_diff;
    std::optional<bool> contradiction;
    std::optional<Deviation> indirect;
    std::optional<double> s_ext;
    std::optional<Deviation> simulation;
    double reward = 0.0;
};

// 1 while value <= threshold, then falls linearly to 0 at twice the threshold.
double deviation_score(const Deviation& d);

std::array<std::optional<double>, kChannelCount> channel_scores(const MeasurementReport& report);

/// Internal reward r in [0, 1].
///
/// `weights` must lie on the simplex; without weights every available
/// channel counts equally. Weight on channels that carry no data is dropped
/// and the rest renormalized.
double aggregate_reward(const MeasurementReport& report, const std::optional<ChannelWeights>& weights = std::nullopt);

}  // namespace atm
