#include "atm/selection.hpp"

#include <algorithm>
#include <cmath>

namespace atm {

double EpsilonSchedule::at(std::int64_t t) const {
    require(t >= 1, "epsilon schedule: t must be >= 1");
    switch (kind) {
        case Kind::Inverse: return std::min(1.0, c / static_cast<double>(t));
        case Kind::Constant: return value;
    }
    return 0.0;
}

double LearningRateSchedule::at(std::int64_t pulls, std::int64_t t) const {
    switch (kind) {
        case Kind::InversePulls: return 1.0 / static_cast<double>(std::max<std::int64_t>(pulls, 1));
        case Kind::InverseStep: return 1.0 / static_cast<double>(std::max<std::int64_t>(t, 1));
        case Kind::Power: return std::pow(static_cast<double>(std::max<std::int64_t>(pulls, 1)), -exponent);
        case Kind::Constant: return value;
    }
    return value;
}

std::size_t select_method_index(std::span<const Method> methods, std::int64_t t, const SelectorConfig& cfg,
                                Rng& rng) {
    if (methods.empty()) throw NotFound("select_method: no methods available");
    const double eps = cfg.epsilon.at(t);
    if (rng.uniform() < eps) return rng.uniform_index(methods.size());
    std::size_t best = 0;
    for (std::size_t i = 1; i < methods.size(); ++i) {
        if (methods[i].estimate > methods[best].estimate) best = i;
    }
    return best;
}

std::string select_method(std::span<const Method> methods, std::int64_t t, const SelectorConfig& cfg, Rng& rng) {
    return methods[select_method_index(methods, t, cfg, rng)].id;
}

Method update_estimate(Method m, double reward, std::int64_t t, const SelectorConfig& cfg) {
    require(std::isfinite(reward) && reward >= 0.0 && reward <= 1.0, "update_estimate: reward must lie in [0, 1]");
    m.pulls += 1;
    const double eta = cfg.eta.at(m.pulls, t);
    m.estimate += eta * (reward - m.estimate);
    return m;
}

double overlap_similarity(const Question& a, const Question& b) {
    require(a.features.size() == b.features.size(), "overlap_similarity: dimension mismatch");
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < a.features.size(); ++i) {
        require(a.features[i] >= 0.0 && b.features[i] >= 0.0, "overlap_similarity: features must be >= 0");
        lo += std::min(a.features[i], b.features[i]);
        hi += std::max(a.features[i], b.features[i]);
    }
    return hi > 0.0 ? lo / hi : 1.0;
}

Method reuse_similar(const Question& unknown, std::span<const KnownSolution> known, const SimilarityPort& sim) {
    if (known.empty()) throw NotFound("reuse_similar: no known questions");
    std::size_t best = 0;
    double best_sim = sim(unknown, known[0].question);
    for (std::size_t i = 1; i < known.size(); ++i) {
        const double s = sim(unknown, known[i].question);
        if (s > best_sim) {
            best = i;
            best_sim = s;
        }
    }
    Method m;
    m.id = known[best].method_id;
    m.origin = MethodOrigin::Reused;
    return m;
}

std::string intuition_fallback(const ScenarioKey& scenario, PlannerPort& planner, bool urgent, const EnvState& env,
                               const SysState& sys) {
    require(urgent, "intuition_fallback: only allowed under urgency");
    PlanRequest request;
    request.kind = PlanKind::Intuition;
    request.env = env;
    request.sys = sys;
    request.scenario = scenario;
    const PlanResponse response = planner.handle(request);
    if (response.actions.empty()) throw NotFound("planner returned no intuitive action");
    return response.actions.front();
}

Evaluator blend_evaluator(const Evaluator& current, const Evaluator& candidate, double beta) {
    require(beta > 0.0 && beta < 1.0, "blend_evaluator: beta must lie in (0, 1)");
    require(current.weights.size() == candidate.weights.size(), "blend_evaluator: dimension mismatch");
    Evaluator out;
    out.weights.resize(current.weights.size());
    for (std::size_t i = 0; i < out.weights.size(); ++i) {
        out.weights[i] = (1.0 - beta) * current.weights[i] + beta * candidate.weights[i];
    }
    return out;
}

Selector::Selector(const std::vector<std::string>& method_ids, SelectorConfig cfg)
    : cfg_(cfg), rng_(cfg.rng_seed) {
    require(!method_ids.empty(), "selector: at least one method is required");
    for (const auto& id : method_ids) methods_.push_back(Method{id, cfg_.initial_estimate, 0, MethodOrigin::Learned});
}

std::size_t Selector::select() {
    ++t_;
    return select_method_index(methods_, t_, cfg_, rng_);
}

void Selector::update(std::size_t index, double reward) {
    require(index < methods_.size(), "selector: method index out of range");
    methods_[index] = update_estimate(methods_[index], reward, t_, cfg_);
}

void Selector::reset_exploration() {
    for (auto& m : methods_) {
        m.estimate = cfg_.initial_estimate;
        m.pulls = 0;
    }
    t_ = 0;
}

}  // namespace atm
