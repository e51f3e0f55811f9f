#include <doctest.h>

#include <cmath>
#include <limits>

#include "atm/measurement.hpp"
#include "oracles.hpp"

using namespace atm;

TEST_CASE("flag_deviation") {
    const Flag f{"temp", 10.0, 0.0, 20.0, 1.0};
    auto r = flag_deviation(f, 10.0);
    CHECK(r.delta == 0.0);
    CHECK_FALSE(r.violated);
    r = flag_deviation(f, 12.0);
    CHECK(r.delta == 2.0);
    CHECK(r.violated);
    r = flag_deviation(f, 11.0);
    CHECK(r.delta == 1.0);
    CHECK_FALSE(r.violated);
}

TEST_CASE("state_difference") {
    auto r = state_difference(Vec{1, 1}, Vec{1, 1}, 0.5);
    CHECK(r.norm == 0.0);
    CHECK_FALSE(r.material);
    r = state_difference(Vec{1, 1}, Vec{2, 1}, 0.5);
    CHECK(r.norm == 1.0);
    CHECK(r.material);

    Rng rng(2);
    for (int k = 0; k < 200; ++k) {
        const Vec a{rng.normal(), rng.normal(), rng.normal()};
        const Vec b{rng.normal(), rng.normal(), rng.normal()};
        const auto ab = state_difference(a, b, 0.1);
        const auto ba = state_difference(b, a, 0.1);
        for (std::size_t i = 0; i < 3; ++i) CHECK(ab.delta[i] == -ba.delta[i]);
        CHECK(ab.norm == ba.norm);
    }
    CHECK_THROWS_AS(state_difference(Vec{1}, Vec{1, 2}, 0.5), ContractViolation);
}

TEST_CASE("contradiction_check") {
    const Vec east{1, 0};
    const Vec west{-1, 0};
    const Vec north{0, 1};
    for (double theta : {0.1, 0.5, 1.0}) {
        const auto r = contradiction_check(east, east, theta);
        CHECK(r.similarities.front() == 1.0);
        CHECK_FALSE(r.contradiction);
    }
    auto r = contradiction_check(east, west, 0.5);
    CHECK(r.similarities.front() == 0.0);
    CHECK(r.contradiction);
    r = contradiction_check(east, north, 0.6);
    CHECK(r.similarities.front() == doctest::Approx(0.5));
    CHECK(r.contradiction);

    // Per-aspect checks: agreement on the first axis does not hide the second.
    r = contradiction_check(Vec{1, 1}, Vec{1, -1}, 0.5, {{0}, {1}});
    CHECK(r.similarities == Vec{1.0, 0.0});
    CHECK(r.contradiction);

    CHECK_THROWS_AS(contradiction_check(east, west, 0.0), ContractViolation);
    CHECK_THROWS_AS(contradiction_check(east, Vec{0, 0}, 0.5), ContractViolation);
}

TEST_CASE("indirect_score") {
    const std::vector<IndirectIndicator> two{{"a", 1.0, 0.5}, {"b", 1.0, 0.5}};
    auto r = indirect_score(two, Vec{1.0, 1.0}, 0.1);
    CHECK(r.d_ind == 0.0);
    CHECK_FALSE(r.abnormal);
    r = indirect_score(two, Vec{1.2, 0.8}, 0.1);
    CHECK(r.d_ind == doctest::Approx(0.2));
    CHECK(r.abnormal);
    const std::vector<IndirectIndicator> one{{"a", 0.0, 1.0}};
    CHECK_FALSE(indirect_score(one, Vec{0.25}, 0.25).abnormal);
}

TEST_CASE("external_feedback") {
    auto r = external_feedback(Vec{0.2, 0.4, 0.6}, 0.5);
    CHECK(r.s_ext == doctest::Approx(0.4));
    CHECK(r.unacceptable);
    r = external_feedback(Vec{1, 1, 1}, 1.0);
    CHECK(r.s_ext == 1.0);
    CHECK_FALSE(r.unacceptable);
    CHECK_FALSE(external_feedback(Vec{0.5, 0.5}, 0.5).unacceptable);
    CHECK_THROWS_AS(external_feedback(Vec{}, 0.5), NotFound);
    CHECK_THROWS_AS(external_feedback(Vec{1.5}, 0.5), ContractViolation);
}

TEST_CASE("simulate_compare") {
    const SimulatorPort echo = [](const EnvState&, const SysState& s, std::span<const std::string>) {
        return s.features;
    };
    auto r = simulate_compare({}, {{1, 2}}, {}, Vec{1, 2}, echo, 0.1);
    CHECK(r.delta == 0.0);
    CHECK_FALSE(r.inconsistent);

    // Phone call: the model expects a dial tone after lifting the receiver.
    const SimulatorPort phone = [](const EnvState&, const SysState&, std::span<const std::string> actions) {
        Vec outcome{0.0};  // [dial tone present]
        for (const auto& a : actions) {
            if (a == "lift_receiver") outcome[0] = 1.0;
        }
        return outcome;
    };
    const std::vector<std::string> lift{"lift_receiver"};
    r = simulate_compare({}, {}, lift, Vec{0.0}, phone, 0.5);
    CHECK(r.inconsistent);

    r = simulate_compare({}, {{1, 2}}, {}, Vec{100, -100}, echo, std::numeric_limits<double>::infinity());
    CHECK_FALSE(r.inconsistent);

    const SimulatorPort broken = [](const EnvState&, const SysState&, std::span<const std::string>) -> Vec {
        throw std::runtime_error("model offline");
    };
    r = simulate_compare({}, {}, {}, Vec{0.0}, broken, 0.5);
    CHECK(r.inconsistent);
    CHECK(std::isinf(r.delta));
    CHECK(r.diagnostic.find("model offline") != std::string::npos);

    r = simulate_compare({}, {{1, 2, 3}}, {}, Vec{1, 2}, echo, 0.5);
    CHECK(r.inconsistent);
}

TEST_CASE("aggregate_reward") {
    MeasurementReport perfect;
    perfect.flag_deviations = {{0.0, 1.0}};
    perfect.state_diff = Deviation{0.0, 1.0};
    perfect.contradiction = false;
    perfect.indirect = Deviation{0.0, 1.0};
    perfect.s_ext = 1.0;
    perfect.simulation = Deviation{0.0, 1.0};
    CHECK(aggregate_reward(perfect) == 1.0);

    MeasurementReport worst;
    worst.flag_deviations = {{5.0, 1.0}};
    worst.state_diff = Deviation{5.0, 1.0};
    worst.contradiction = true;
    worst.indirect = Deviation{5.0, 1.0};
    worst.s_ext = 0.0;
    worst.simulation = Deviation{std::numeric_limits<double>::infinity(), 1.0};
    CHECK(aggregate_reward(worst) == 0.0);

    MeasurementReport half = perfect;
    half.contradiction = true;
    ChannelWeights w{0.1, 0.1, 0.5, 0.1, 0.1, 0.1};
    CHECK(aggregate_reward(half, w) == doctest::Approx(0.5));

    // Missing channels drop out and the rest renormalize.
    MeasurementReport partial;
    partial.s_ext = 0.4;
    CHECK(aggregate_reward(partial, w) == doctest::Approx(0.4));

    CHECK_THROWS_AS(aggregate_reward(MeasurementReport{}), ContractViolation);
    CHECK_THROWS_AS(aggregate_reward(perfect, ChannelWeights{0.5, 0.5, 0.5, 0, 0, 0}), ContractViolation);
    CHECK_THROWS_AS(aggregate_reward(perfect, ChannelWeights{1.5, -0.5, 0, 0, 0, 0}), ContractViolation);
}

TEST_CASE("deviation_score shape") {
    CHECK(deviation_score({0.5, 1.0}) == 1.0);
    CHECK(deviation_score({1.0, 1.0}) == 1.0);
    CHECK(deviation_score({1.5, 1.0}) == doctest::Approx(0.5));
    CHECK(deviation_score({2.5, 1.0}) == 0.0);
    CHECK(deviation_score({0.0, 0.0}) == 1.0);
    CHECK(deviation_score({0.1, 0.0}) == 0.0);
}

TEST_CASE("reward is monotone in each deviation") {
    Rng rng(12);
    for (int k = 0; k < 500; ++k) {
        MeasurementReport a;
        a.flag_deviations = {{rng.uniform(0, 3), 1.0}};
        a.simulation = Deviation{rng.uniform(0, 3), 1.0};
        a.s_ext = rng.uniform();
        MeasurementReport b = a;
        b.flag_deviations[0].value += rng.uniform(0, 1);
        const double ra = aggregate_reward(a);
        const double rb = aggregate_reward(b);
        CHECK(rb <= ra);
        CHECK(ra >= 0.0);
        CHECK(ra <= 1.0);
    }
}

TEST_CASE("measurement oracle") {
    const auto r = oracle::measurement_suite(1000, 5);
    INFO(r.first_mismatch);
    CHECK(r.ok());
}
