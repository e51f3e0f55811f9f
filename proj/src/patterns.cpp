#include "atm/patterns.hpp"

namespace atm {

EventStream::EventStream(std::vector<Event> events) {
    events_.reserve(events.size());
    for (auto& e : events) push(std::move(e));
}

void EventStream::push(Event event) {
    if (!events_.empty()) {
        require(event.step >= events_.back().step, "event stream: steps must be non-decreasing");
    }
    events_.push_back(std::move(event));
}

namespace {

// Number of i-occurrences with at least one j in (step, step + window].
std::int64_t followed_count(const std::vector<Event>& ev, const std::string& i, const std::string& j,
                            std::int64_t window, std::int64_t& occurrences) {
    std::int64_t hits = 0;
    occurrences = 0;
    for (std::size_t a = 0; a < ev.size(); ++a) {
        if (ev[a].id != i) continue;
        ++occurrences;
        for (std::size_t b = a + 1; b < ev.size() && ev[b].step <= ev[a].step + window; ++b) {
            if (ev[b].step > ev[a].step && ev[b].id == j) {
                ++hits;
                break;
            }
        }
    }
    return hits;
}

}  // namespace

AssocResult temporal_assoc(const EventStream& stream, const std::string& i, const std::string& j,
                           std::int64_t window, double theta_t) {
    require(window >= 1, "temporal_assoc: window must be >= 1");
    std::int64_t occurrences = 0;
    const std::int64_t hits = followed_count(stream.events(), i, j, window, occurrences);
    if (occurrences == 0) throw NotFound("temporal_assoc: event '" + i + "' does not occur");
    const double p = static_cast<double>(hits) / static_cast<double>(occurrences);
    return {p, p > theta_t};
}

AssocResult spatial_assoc(const EventStream& stream, const std::string& i, const std::string& j,
                          double theta_s_spatial) {
    const auto& ev = stream.events();
    std::int64_t occurrences = 0;
    std::int64_t hits = 0;
    for (std::size_t a = 0; a < ev.size(); ++a) {
        if (ev[a].id != i) continue;
        ++occurrences;
        for (std::size_t b = 0; b < ev.size(); ++b) {
            if (b != a && ev[b].id == j && ev[b].location == ev[a].location) {
                ++hits;
                break;
            }
        }
    }
    if (occurrences == 0) throw NotFound("spatial_assoc: event '" + i + "' does not occur");
    const double p = static_cast<double>(hits) / static_cast<double>(occurrences);
    return {p, p > theta_s_spatial};
}

CoherenceSet mine_coherence(const EventStream& stream, std::int64_t window, double theta_cooccur) {
    require(window >= 1, "mine_coherence: window must be >= 1");
    const auto& ev = stream.events();
    std::map<std::string, std::int64_t> counts;
    std::map<EventPair, std::int64_t> pair_counts;
    for (std::size_t a = 0; a < ev.size(); ++a) {
        ++counts[ev[a].id];
        std::set<std::string> seen;
        for (std::size_t b = a + 1; b < ev.size() && ev[b].step <= ev[a].step + window; ++b) {
            if (ev[b].step > ev[a].step && seen.insert(ev[b].id).second) ++pair_counts[{ev[a].id, ev[b].id}];
        }
    }
    CoherenceSet out;
    for (const auto& [pair, n] : pair_counts) {
        if (pair.first == pair.second) continue;
        const double p = static_cast<double>(n) / static_cast<double>(counts[pair.first]);
        if (p > theta_cooccur) out.pairs.emplace(pair, p);
    }
    return out;
}

IncrementalMiner::IncrementalMiner(std::int64_t window) : window_(window) {
    require(window >= 1, "incremental miner: window must be >= 1");
}

void IncrementalMiner::observe(const Event& event) {
    if (seen_any_) require(event.step >= last_step_, "incremental miner: steps must be non-decreasing");
    seen_any_ = true;
    last_step_ = event.step;

    while (!open_.empty() && open_.front().step + window_ < event.step) open_.pop_front();
    for (auto& o : open_) {
        if (o.step < event.step && o.credited.insert(event.id).second) ++pair_counts_[{o.id, event.id}];
    }
    open_.push_back({event.id, event.step, {}});
    ++counts_[event.id];
}

CoherenceSet IncrementalMiner::coherence(double theta_cooccur) const {
    CoherenceSet out;
    for (const auto& [pair, n] : pair_counts_) {
        if (pair.first == pair.second) continue;
        const double p = static_cast<double>(n) / static_cast<double>(counts_.at(pair.first));
        if (p > theta_cooccur) out.pairs.emplace(pair, p);
    }
    return out;
}

std::int64_t IncrementalMiner::count(const std::string& id) const {
    auto it = counts_.find(id);
    return it == counts_.end() ? 0 : it->second;
}

std::int64_t IncrementalMiner::pair_count(const std::string& i, const std::string& j) const {
    auto it = pair_counts_.find({i, j});
    return it == pair_counts_.end() ? 0 : it->second;
}

}  // namespace atm
