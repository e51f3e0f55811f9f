#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "atm/common.hpp"
#include "atm/planner.hpp"
#include "atm/world.hpp"

namespace atm {

enum class MethodOrigin { Learned, Reused, Intuition };

struct Method {
    std::string id;
    double estimate = 1.0;  // P_t(m)
    std::int64_t pulls = 0;
    MethodOrigin origin = MethodOrigin::Learned;
};

struct EpsilonSchedule {
    enum class Kind { Inverse, Constant };
    Kind kind = Kind::Inverse;
    double c = 5.0;      // Inverse: eps_t = min(1, c / t)
    double value = 0.0;  // Constant

    double at(std::int64_t t) const;
};

struct LearningRateSchedule {
    enum class Kind { InversePulls, InverseStep, Power, Constant };
    Kind kind = Kind::InversePulls;
    double value = 0.1;     // Constant
    double exponent = 1.0;  // Power: pulls^-exponent

    // `pulls` counts the update being applied (>= 1); `t` is the global step.
    double at(std::int64_t pulls, std::int64_t t) const;
};

struct SelectorConfig {
    EpsilonSchedule epsilon;
    LearningRateSchedule eta;
    std::uint64_t rng_seed = 0;
    double initial_estimate = 1.0;
};

// With probability eps_t a uniform pick, otherwise the first maximal estimate.
std::size_t select_method_index(std::span<const Method> methods, std::int64_t t, const SelectorConfig& cfg,
                                Rng& rng);
std::string select_method(std::span<const Method> methods, std::int64_t t, const SelectorConfig& cfg, Rng& rng);

// Squared-loss step P <- P + eta_t (r - P); increments pulls.
Method update_estimate(Method m, double reward, std::int64_t t, const SelectorConfig& cfg);

struct Question {
    std::string id;
    Vec features;
};

using SimilarityPort = std::function<double(const Question&, const Question&)>;

// sum(min(a_i, b_i)) / sum(max(a_i, b_i)) over non-negative features; 1 for identical vectors.
double overlap_similarity(const Question& a, const Question& b);

struct KnownSolution {
    Question question;
    std::string method_id;
};

Method reuse_similar(const Question& unknown, std::span<const KnownSolution> known, const SimilarityPort& sim);

// One planner call, no deliberation. Requires the caller's urgency flag.
std::string intuition_fallback(const ScenarioKey& scenario, PlannerPort& planner, bool urgent,
                               const EnvState& env = {}, const SysState& sys = {});

struct Evaluator {
    Vec weights;
};

Evaluator blend_evaluator(const Evaluator& current, const Evaluator& candidate, double beta);

/// Epsilon-greedy method repertoire owned by a single agent loop.
///
/// The schedule clock restarts on reset_exploration(), which also restores
/// every estimate to its optimistic initial value.
class Selector {
public:
    Selector(const std::vector<std::string>& method_ids, SelectorConfig cfg);

    std::size_t select();
    void update(std::size_t index, double reward);
    void reset_exploration();

    std::span<const Method> methods() const { return methods_; }
    std::int64_t clock() const { return t_; }
    const SelectorConfig& config() const { return cfg_; }

private:
    SelectorConfig cfg_;
    std::vector<Method> methods_;
    Rng rng_;
    std::int64_t t_ = 0;
};

}  // namespace atm
