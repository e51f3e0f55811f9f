#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atm/common.hpp"

namespace atm {

struct Event {
    std::string id;
    std::int64_t step = 0;
    std::string location;
};

// Append-only event log with non-decreasing steps.
class EventStream {
public:
    EventStream() = default;
    explicit EventStream(std::vector<Event> events);

    void push(Event event);
    const std::vector<Event>& events() const { return events_; }
    bool empty() const { return events_.empty(); }
    std::size_t size() const { return events_.size(); }

private:
    std::vector<Event> events_;
};

struct AssocResult {
    double p = 0.0;
    bool significant = false;
};

// Fraction of i-occurrences followed by a j within (step, step + window].
AssocResult temporal_assoc(const EventStream& stream, const std::string& i, const std::string& j,
                           std::int64_t window, double theta_t);

// Fraction of i-occurrences sharing a location with some other j-occurrence.
AssocResult spatial_assoc(const EventStream& stream, const std::string& i, const std::string& j,
                          double theta_s_spatial);

using EventPair = std::pair<std::string, std::string>;

struct CoherenceSet {
    std::map<EventPair, double> pairs;

    bool contains(const std::string& i, const std::string& j) const { return pairs.count({i, j}) != 0; }
    bool operator==(const CoherenceSet&) const = default;
};

// All ordered pairs of distinct event types whose succession probability
// exceeds theta_cooccur.
CoherenceSet mine_coherence(const EventStream& stream, std::int64_t window, double theta_cooccur);

/// Streaming counterpart of mine_coherence.
///
/// Keeps count(i) and count(i -> j) up to date as events arrive; coherence()
/// always equals the batch result over every event observed so far.
class IncrementalMiner {
public:
    explicit IncrementalMiner(std::int64_t window);

    void observe(const Event& event);
    CoherenceSet coherence(double theta_cooccur) const;

    std::int64_t count(const std::string& id) const;
    std::int64_t pair_count(const std::string& i, const std::string& j) const;

private:
    struct Open {
        std::string id;
        std::int64_t step;
        std::set<std::string> credited;
    };

    std::int64_t window_;
    std::int64_t last_step_ = 0;
    bool seen_any_ = false;
    std::deque<Open> open_;
    std::map<std::string, std::int64_t> counts_;
    std::map<EventPair, std::int64_t> pair_counts_;
};

}  // namespace atm
