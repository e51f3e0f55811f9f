#include <doctest.h>

#include "atm/memory.hpp"
#include "atm/planner.hpp"
#include "oracles.hpp"

using namespace atm;

namespace {
const ScenarioKey kS{{0, 0}};
const ScenarioKey kT{{1, 0}};
}  // namespace

TEST_CASE("retrieve_goal") {
    ScenarioMemory m;
    Rng rng(1);
    m.add_goal(kS, "g1", 0.7);
    m.add_goal(kS, "g2", 0.3);
    CHECK(m.retrieve_goal(kS, RetrievalMode::Max, rng) == "g1");

    ScenarioMemory tie;
    tie.add_goal(kS, "g1", 0.5);
    tie.add_goal(kS, "g2", 0.5);
    CHECK(tie.retrieve_goal(kS, RetrievalMode::Max, rng) == "g1");

    ScenarioMemory single;
    single.add_goal(kS, "g1", 1.0);
    for (int k = 0; k < 100; ++k) CHECK(single.retrieve_goal(kS, RetrievalMode::Sample, rng) == "g1");

    CHECK_THROWS_AS(m.retrieve_goal(kT, RetrievalMode::Max, rng), NotFound);
}

TEST_CASE("sampled goals follow normalized weights") {
    ScenarioMemory m;
    m.add_goal(kS, "g1", 3.0);
    m.add_goal(kS, "g2", 1.0);
    Rng rng(4);
    int g1 = 0;
    const int n = 20000;
    for (int k = 0; k < n; ++k) g1 += m.retrieve_goal(kS, RetrievalMode::Sample, rng) == "g1" ? 1 : 0;
    CHECK(static_cast<double>(g1) / n == doctest::Approx(0.75).epsilon(0.02));
    CHECK(m.normalized_goal_weight(kS, "g1") == doctest::Approx(0.75));
    CHECK(m.normalized_goal_weight(kS, "zz") == 0.0);
}

TEST_CASE("retrieve_action_outcome") {
    ScenarioMemory m;
    m.add_action_outcome(kS, "a1", "o1", 0.9);
    m.add_action_outcome(kS, "a2", "o2", 0.1);
    CHECK(m.retrieve_action_outcome(kS) == std::pair<std::string, std::string>{"a1", "o1"});

    ScenarioMemory single;
    single.add_action_outcome(kS, "a2", "o2", 0.1);
    CHECK(single.retrieve_action_outcome(kS).first == "a2");

    ScenarioMemory tie;
    tie.add_action_outcome(kS, "a1", "o1", 0.4);
    tie.add_action_outcome(kS, "a2", "o2", 0.4);
    CHECK(tie.retrieve_action_outcome(kS).first == "a1");
    CHECK_THROWS_AS(tie.retrieve_action_outcome(kT), NotFound);
}

TEST_CASE("update_weight") {
    ScenarioMemory m;
    m.add_goal(kS, "g", 0.5);
    CHECK(m.update_weight(kS, GoalTarget{"g"}, 1.0, 0.1) == doctest::Approx(0.55));

    ScenarioMemory full;
    full.add_goal(kS, "g", 0.5);
    CHECK(full.update_weight(kS, GoalTarget{"g"}, 0.2, 1.0) == doctest::Approx(0.2));

    ScenarioMemory fixed;
    fixed.add_goal(kS, "g", 0.3);
    CHECK(fixed.update_weight(kS, GoalTarget{"g"}, 0.3, 0.1) == doctest::Approx(0.3));

    CHECK_THROWS_AS(m.update_weight(kS, GoalTarget{"g"}, 0.5, 0.0), ContractViolation);
    CHECK_THROWS_AS(m.update_weight(kS, GoalTarget{"g"}, 0.5, 1.5), ContractViolation);

    // Absent targets start at zero.
    CHECK(m.update_weight(kS, ActionOutcomeTarget{"a", "o"}, 1.0, 0.25) == doctest::Approx(0.25));
    CHECK(m.update_log().size() == 2);
}

TEST_CASE("weights stay in [0, 1] under random updates") {
    ScenarioMemory m;
    Rng rng(8);
    for (int k = 0; k < 2000; ++k) {
        const double w = m.update_weight(kS, GoalTarget{"g" + std::to_string(k % 3)}, rng.uniform(),
                                         0.01 + 0.99 * rng.uniform());
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
    }
}

TEST_CASE("memory replay oracle") {
    const auto r = oracle::memory_replay_suite(300, 99);
    INFO(r.first_mismatch);
    CHECK(r.ok());
    CHECK(r.fixtures == 300);
}

TEST_CASE("lookup_solution") {
    ScenarioMemory m;
    m.store_solution({"q1", kS, "m1", 0.4});
    m.store_solution({"q2", kT, "m2", 0.9});
    m.store_solution({"q2", {{5, 5}}, "m3", 0.5});

    auto hit = m.lookup_solution("q1", kS);
    REQUIRE(hit);
    CHECK(hit->method_id == "m1");
    CHECK_FALSE(hit->cross_scenario);

    hit = m.lookup_solution("q2", kS);
    REQUIRE(hit);
    CHECK(hit->method_id == "m2");
    CHECK(hit->cross_scenario);

    CHECK_FALSE(m.lookup_solution("nope", kS));
    CHECK_THROWS_AS(m.store_solution({"q", kS, "m", 1.5}), ContractViolation);
}

TEST_CASE("history is newest first") {
    ScenarioMemory m;
    for (std::int64_t s : {1, 2, 3}) m.record_history({s, kS});
    const auto all = m.recall_window(1, 3);
    REQUIRE(all.size() == 3);
    CHECK(all[0].step == 3);
    CHECK(all[1].step == 2);
    CHECK(all[2].step == 1);
    CHECK(m.recall_window(10, 20).empty());
    CHECK(m.recall_window(2, 2).size() == 1);
    CHECK_THROWS_AS(m.record_history({3, kS}), ContractViolation);
}

TEST_CASE("analysis bookkeeping") {
    ScenarioMemory m;
    for (std::int64_t s = 0; s < 10; ++s) m.record_history({s, kS});
    CHECK(m.backlog() == 10);
    const auto batch = m.unanalyzed(4);
    REQUIRE(batch.size() == 4);
    CHECK(batch.front().step == 9);
    for (const auto& e : batch) m.mark_analyzed(e.step);
    m.mark_analyzed(9);
    m.mark_analyzed(42);
    CHECK(m.backlog() == 6);
    CHECK(m.analyzed(9));
    CHECK_FALSE(m.analyzed(5));
    CHECK(m.unanalyzed(100).front().step == 5);
}

TEST_CASE("reconstruct_state") {
    const EnvState norm{{1, 1}};
    HistoryEntry zero;
    zero.env_delta = {0, 0};
    CHECK(reconstruct_state(zero, norm).features == Vec{1, 1});
    HistoryEntry e;
    e.env_delta = {0.5, -1};
    CHECK(reconstruct_state(e, norm).features == Vec{1.5, 0});

    Rng rng(6);
    for (int k = 0; k < 1000; ++k) {
        // Integer-scaled values keep the subtraction and addition exact.
        const EnvState base{{std::ldexp(std::floor(rng.uniform(-1e6, 1e6)), -10), 3.0}};
        const EnvState env{{std::ldexp(std::floor(rng.uniform(-1e6, 1e6)), -10), -2.5}};
        const auto entry = make_history_entry(k, kS, env, base, "s", false);
        CHECK(reconstruct_state(entry, base).features == env.features);
    }
    CHECK_THROWS_AS(reconstruct_state(e, EnvState{{1.0}}), ContractViolation);
}

TEST_CASE("fill_intermediate") {
    ScriptedPlanner planner;
    HistoryEntry a{0, {{0}}};
    HistoryEntry b{10, {{10}}};
    CHECK(fill_intermediate(a, b, 5, planner, 1.0).buckets == std::vector<std::int64_t>{5});

    HistoryEntry c{0, {{3, -2}}};
    HistoryEntry d{8, {{3, -2}}};
    CHECK(fill_intermediate(c, d, 4, planner, 0.5) == c.scenario);

    CHECK_THROWS_AS(fill_intermediate(a, b, 0, planner, 1.0), ContractViolation);
    CHECK_THROWS_AS(fill_intermediate(a, b, 10, planner, 1.0), ContractViolation);
}

TEST_CASE("scenarios lists every keyed scenario once") {
    ScenarioMemory m;
    m.add_goal(kT, "g", 1.0);
    m.add_action_outcome(kS, "a", "o", 1.0);
    m.add_action_outcome(kT, "a", "o", 1.0);
    CHECK(m.scenarios() == std::vector<ScenarioKey>{kS, kT});
}

TEST_CASE("custom reward map") {
    ScenarioMemory m([](double r) { return r * r; });
    CHECK(m.update_weight(kS, GoalTarget{"g"}, 0.5, 1.0) == doctest::Approx(0.25));
}
