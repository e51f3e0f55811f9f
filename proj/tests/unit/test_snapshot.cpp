#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "atm/snapshot.hpp"

using namespace atm;

namespace {

ScenarioMemory populated() {
    ScenarioMemory m;
    const ScenarioKey a{{0, 1}};
    const ScenarioKey b{{-3, 2}};
    m.add_goal(a, "g1", 0.7);
    m.add_goal(a, "g2", 0.3);
    m.add_action_outcome(b, "act", "ok", 0.5);
    m.update_weight(a, GoalTarget{"g2"}, 0.9, 0.1);
    m.update_weight(b, ActionOutcomeTarget{"act", "fail"}, 0.1, 0.3);
    m.store_solution({"q", a, "m", 0.8});
    for (std::int64_t s = 0; s < 5; ++s) {
        HistoryEntry e;
        e.step = s;
        e.scenario = s % 2 ? a : b;
        e.env_delta = {0.1 * static_cast<double>(s), -1.0 / 3.0};
        e.action_id = "act";
        e.failure = s == 3;
        m.record_history(e);
    }
    m.mark_analyzed(1);
    m.store_experience({4, a, {{3, "replan_before:act", "compliance_violation"}}});
    return m;
}

}  // namespace

TEST_CASE("snapshot round trip is lossless") {
    const ScenarioMemory m = populated();
    const auto doc = snapshot::to_json(m);
    const ScenarioMemory back = snapshot::from_json(nlohmann::json::parse(doc.dump()));
    CHECK(snapshot::to_json(back) == doc);
    CHECK(back.history().size() == 5);
    CHECK(back.analyzed(1));
    CHECK_FALSE(back.analyzed(2));
    CHECK(back.backlog() == 4);
    CHECK(back.history().front().env_delta[1] == -1.0 / 3.0);
    CHECK(back.update_log().size() == 2);
    Rng rng(0);
    CHECK(back.retrieve_goal({{0, 1}}, RetrievalMode::Max, rng) == "g1");
}

TEST_CASE("snapshot files") {
    const auto path = std::filesystem::temp_directory_path() / "atm_snapshot_test.json";
    snapshot::save(populated(), path);
    CHECK(snapshot::to_json(snapshot::load(path)) == snapshot::to_json(populated()));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(snapshot::load(path), ConfigError);
}

TEST_CASE("snapshot rejects bad documents") {
    auto doc = snapshot::to_json(populated());
    doc["version"] = 99;
    CHECK_THROWS_AS(snapshot::from_json(doc), ConfigError);
    CHECK_THROWS_AS(snapshot::from_json(nlohmann::json::array()), ConfigError);
    auto broken = snapshot::to_json(populated());
    broken["goals"] = "nope";
    CHECK_THROWS_AS(snapshot::from_json(broken), ConfigError);
}
