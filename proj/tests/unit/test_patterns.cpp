#include <doctest.h>

#include "atm/patterns.hpp"
#include "oracles.hpp"

using namespace atm;

namespace {
EventStream sequence(const std::string& ids) {
    EventStream s;
    std::int64_t step = 0;
    for (char c : ids) s.push({std::string(1, c), step++, ""});
    return s;
}
}  // namespace

TEST_CASE("temporal_assoc") {
    const auto s = sequence("ABABA");
    auto r = temporal_assoc(s, "A", "B", 1, 0.5);
    CHECK(r.p == doctest::Approx(2.0 / 3.0));
    CHECK(r.significant);
    CHECK(temporal_assoc(s, "B", "C", 1, 0.5).p == 0.0);
    CHECK(temporal_assoc(sequence("ABAB"), "A", "B", 1, 0.5).p == 1.0);
    CHECK_THROWS_AS(temporal_assoc(s, "Z", "B", 1, 0.5), NotFound);
    CHECK_THROWS_AS(temporal_assoc(s, "A", "B", 0, 0.5), ContractViolation);
}

TEST_CASE("temporal window bounds") {
    EventStream s;
    s.push({"A", 0, ""});
    s.push({"B", 0, ""});  // same step does not count
    s.push({"B", 3, ""});
    CHECK(temporal_assoc(s, "A", "B", 2, 0.5).p == 0.0);
    CHECK(temporal_assoc(s, "A", "B", 3, 0.5).p == 1.0);
    CHECK_THROWS_AS(s.push({"C", 1, ""}), ContractViolation);
}

TEST_CASE("spatial_assoc") {
    EventStream together;
    together.push({"i", 0, "x"});
    together.push({"j", 1, "x"});
    CHECK(spatial_assoc(together, "i", "j", 0.5).p == 1.0);

    EventStream apart;
    apart.push({"i", 0, "x"});
    apart.push({"j", 1, "y"});
    CHECK(spatial_assoc(apart, "i", "j", 0.5).p == 0.0);

    EventStream mixed;
    mixed.push({"i", 0, "loc1"});
    mixed.push({"i", 1, "loc1"});
    mixed.push({"i", 2, "loc2"});
    mixed.push({"j", 3, "loc1"});
    CHECK(spatial_assoc(mixed, "i", "j", 0.5).p == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("mine_coherence") {
    CHECK(mine_coherence(EventStream{}, 1, 0.5).pairs.empty());
    const auto set = mine_coherence(sequence("ABAB"), 1, 0.9);
    CHECK(set.contains("A", "B"));
    CHECK(set.pairs.at({"A", "B"}) == 1.0);
    CHECK_FALSE(set.contains("B", "A"));  // B->A is 1/2
    CHECK(mine_coherence(sequence("ABAB"), 1, 1.0).pairs.empty());
}

TEST_CASE("incremental miner equals batch at every prefix") {
    Rng rng(21);
    for (int k = 0; k < 50; ++k) {
        const auto events = oracle::random_events(rng, 60);
        const std::int64_t window = 1 + static_cast<std::int64_t>(rng.uniform_index(3));
        IncrementalMiner miner(window);
        EventStream stream;
        for (const auto& e : events) {
            miner.observe(e);
            stream.push(e);
            CHECK(miner.coherence(0.3) == mine_coherence(stream, window, 0.3));
        }
    }
}

TEST_CASE("pattern oracle") {
    const auto r = oracle::pattern_suite(500, 77);
    INFO(r.first_mismatch);
    CHECK(r.ok());
}
