#include <doctest.h>

#include "atm/world.hpp"

using namespace atm;

TEST_CASE("env_difference") {
    CHECK(env_difference({{1, 2}}, {{1, 2}}) == 0.0);
    CHECK(env_difference({{0, 3}}, {{4, 0}}) == 5.0);
    CHECK(env_difference({{1, 1}}, {{1, 2}}) == 1.0);
    CHECK(env_difference({{0, 3}}, {{4, 0}}, Norm::L1) == 7.0);
    CHECK(env_difference({{0, 3}}, {{4, 0}}, Norm::LInf) == 4.0);
    CHECK_THROWS_AS(env_difference({{1}}, {{1, 2}}), ContractViolation);
}

TEST_CASE("env_difference is a metric on random vectors") {
    Rng rng(7);
    for (int k = 0; k < 500; ++k) {
        EnvState a{{rng.normal(), rng.normal(), rng.normal()}};
        EnvState b{{rng.normal(), rng.normal(), rng.normal()}};
        EnvState c{{rng.normal(), rng.normal(), rng.normal()}};
        for (Norm n : {Norm::L2, Norm::L1, Norm::LInf}) {
            CHECK(env_difference(a, b, n) >= 0.0);
            CHECK(env_difference(a, b, n) == env_difference(b, a, n));
            CHECK(env_difference(a, c, n) <= env_difference(a, b, n) + env_difference(b, c, n) + 1e-12);
        }
    }
}

TEST_CASE("detect_change uses a strict threshold") {
    ChangeDetectorState det;
    det.theta_e = 0.4;
    det.last_env = {{0.0}, 0};
    auto r = detect_change(det, {{0.5}, 1});
    CHECK(r.changed);
    CHECK(r.delta == doctest::Approx(0.5));
    CHECK(det.last_trigger_step == 1);

    r = detect_change(det, {{0.9}, 2});
    CHECK(r.delta == doctest::Approx(0.4));
    CHECK_FALSE(r.changed);

    r = detect_change(det, {{0.9}, 3});
    CHECK(r.delta == 0.0);
    CHECK_FALSE(r.changed);
}

TEST_CASE("ChangeDetector with window 1 matches detect_change") {
    Rng rng(3);
    ChangeDetector detector({0.5, 1, Norm::L2});
    ChangeDetectorState state;
    state.theta_e = 0.5;
    bool first = true;
    for (std::int64_t t = 0; t < 300; ++t) {
        EnvState e{{rng.uniform(0, 1), rng.uniform(0, 1)}, t};
        const auto a = detector.observe(e);
        if (first) {
            state.last_env = e;
            CHECK_FALSE(a.changed);
            first = false;
            continue;
        }
        const auto b = detect_change(state, e);
        CHECK(a.changed == b.changed);
        CHECK(a.delta == b.delta);
    }
}

TEST_CASE("windowed ChangeDetector fires once after a level shift") {
    ChangeDetector detector({0.3, 10, Norm::L2});
    Rng rng(5);
    int fired = 0;
    std::int64_t when = -1;
    for (std::int64_t t = 0; t < 400; ++t) {
        const double level = t < 200 ? 0.0 : 1.0;
        const auto r = detector.observe({{level + 0.02 * rng.normal()}, t});
        if (r.changed) {
            ++fired;
            when = t;
        }
    }
    CHECK(fired == 1);
    CHECK(when >= 200);
    CHECK(when < 220);
}

TEST_CASE("scenario_key floors each coordinate") {
    CHECK(scenario_key({{0.0}}, {{0.0}}, 1.0).buckets == std::vector<std::int64_t>{0, 0});
    CHECK(scenario_key({{2.3}}, {{0.9}}, 1.0).buckets == std::vector<std::int64_t>{2, 0});
    CHECK(scenario_key({{-0.1}}, {{0.0}}, 1.0).buckets == std::vector<std::int64_t>{-1, 0});
    CHECK(scenario_key({{2.3}}, {{0.9}}, 0.5).buckets == std::vector<std::int64_t>{4, 1});
    CHECK_THROWS_AS(scenario_key({{1.0}}, {}, 0.0), ContractViolation);
}

TEST_CASE("bucket centers quantize back to their key") {
    Rng rng(9);
    for (int k = 0; k < 500; ++k) {
        const double w = 0.1 + rng.uniform() * 3.0;
        const Vec v{rng.normal(0, 10), rng.normal(0, 10)};
        const ScenarioKey key = quantize(v, w);
        CHECK(quantize(bucket_center(key, w), w) == key);
    }
}
