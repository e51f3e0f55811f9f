#include "atm/world.hpp"

#include <cmath>

namespace atm {

std::string to_string(const ScenarioKey& key) {
    std::string out = "[";
    for (std::size_t i = 0; i < key.buckets.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(key.buckets[i]);
    }
    out += ']';
    return out;
}

std::size_t ScenarioKeyHash::operator()(const ScenarioKey& key) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t b : key.buckets) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
}

double env_difference(const EnvState& a, const EnvState& b, Norm norm) {
    return distance(a.features, b.features, norm);
}

ScenarioKey quantize(std::span<const double> features, double bucket_width) {
    require(bucket_width > 0.0 && std::isfinite(bucket_width), "scenario_key: bucket_width must be > 0");
    require(all_finite(features), "scenario_key: non-finite feature");
    ScenarioKey key;
    key.buckets.reserve(features.size());
    for (double f : features) {
        key.buckets.push_back(static_cast<std::int64_t>(std::floor(f / bucket_width)));
    }
    return key;
}

ScenarioKey scenario_key(const EnvState& env, const SysState& sys, double bucket_width) {
    Vec joint = env.features;
    joint.insert(joint.end(), sys.features.begin(), sys.features.end());
    return quantize(joint, bucket_width);
}

Vec bucket_center(const ScenarioKey& key, double bucket_width) {
    Vec out;
    out.reserve(key.buckets.size());
    for (std::int64_t b : key.buckets) {
        out.push_back((static_cast<double>(b) + 0.5) * bucket_width);
    }
    return out;
}

ChangeResult detect_change(ChangeDetectorState& det, const EnvState& e, Norm norm) {
    const double delta = env_difference(det.last_env, e, norm);
    const bool changed = delta > det.theta_e;
    if (changed) det.last_trigger_step = e.step;
    det.last_env = e;
    return {changed, delta};
}

ChangeDetector::ChangeDetector(ChangeDetectorConfig cfg) : cfg_(cfg) {
    require(cfg_.theta_e > 0.0, "change detector: theta_e must be > 0");
    require(cfg_.window >= 1, "change detector: window must be >= 1");
}

void ChangeDetector::reset() {
    single_.reset();
    recent_.clear();
}

ChangeResult ChangeDetector::observe(const EnvState& e) {
    if (cfg_.window == 1) {
        if (!single_) {
            single_ = ChangeDetectorState{e, cfg_.theta_e, last_trigger_step_};
            return {};
        }
        const ChangeResult result = detect_change(*single_, e, cfg_.norm);
        last_trigger_step_ = single_->last_trigger_step;
        return result;
    }

    if (!recent_.empty()) {
        require(recent_.front().size() == e.features.size(), "change detector: dimension mismatch");
    }
    recent_.push_back(e.features);
    const std::size_t w = cfg_.window;
    if (recent_.size() > 2 * w) recent_.pop_front();
    if (recent_.size() < 2 * w) return {};

    const std::size_t dim = e.features.size();
    Vec older(dim, 0.0);
    Vec newer(dim, 0.0);
    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t k = 0; k < dim; ++k) {
            older[k] += recent_[i][k];
            newer[k] += recent_[w + i][k];
        }
    }
    for (std::size_t k = 0; k < dim; ++k) {
        older[k] /= static_cast<double>(w);
        newer[k] /= static_cast<double>(w);
    }
    const double delta = distance(older, newer, cfg_.norm);
    const bool changed = delta > cfg_.theta_e;
    if (changed) {
        last_trigger_step_ = e.step;
        recent_.clear();
    }
    return {changed, delta};
}

}  // namespace atm
