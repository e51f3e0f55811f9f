#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "atm/simlab/config.hpp"
#include "atm/simlab/experiments.hpp"

using namespace atm;
using namespace atm::simlab;

namespace {

SimConfig config(const std::string& text) { return parse_config(json::parse(text)); }

double agg_mean(const ExperimentReport& r, const char* key) { return r.aggregates.at(key).at("mean").get<double>(); }

const Criterion& criterion(const ExperimentReport& r, const std::string& name) {
    for (const auto& c : r.criteria) {
        if (c.name == name) return c;
    }
    throw std::runtime_error("no criterion " + name);
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = config(R"({"thresholds": {"theta_e": 0.3}, "seeds": [4, 7]})");
    CHECK(cfg.thresholds.theta_e == 0.3);
    CHECK(cfg.thresholds.theta_create == 0.4);
    CHECK(cfg.seeds == std::vector<std::uint64_t>{4, 7});
    CHECK(config("{}").seeds.size() == 20);
    CHECK(config(R"({"seeds": 3})").seeds == std::vector<std::uint64_t>{0, 1, 2});

    CHECK_THROWS_AS(config(R"({"wrld": {}})"), ConfigError);
    CHECK_THROWS_AS(config(R"({"thresholds": {"theta_x": 1}})"), ConfigError);
    CHECK_THROWS_AS(config(R"({"thresholds": {"theta_delete": 0.5, "theta_create": 0.4}})"), ConfigError);
    CHECK_THROWS_AS(config(R"({"seeds": 0})"), ConfigError);
    CHECK_THROWS_AS(config(R"({"thresholds": {"theta_e": "high"}})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);

    CHECK(parse_seeds("3") == std::vector<std::uint64_t>{0, 1, 2});
    CHECK(parse_seeds("3,5,8") == std::vector<std::uint64_t>{3, 5, 8});
    CHECK_THROWS_AS(parse_seeds("3,x"), ConfigError);
    CHECK_THROWS_AS(parse_seeds(""), ConfigError);
}

TEST_CASE("config errors from runners") {
    CHECK_THROWS_AS(run_experiment("nope", config("{}"), {}), ConfigError);
    CHECK_THROWS_AS(run_stationary(config(R"({"world": {"arm_means": [1.5]}})"), {}), ConfigError);
    CHECK_THROWS_AS(run_stationary(config(R"({"selector": {"policy": "clever"}})"), {}), ConfigError);
    CHECK_THROWS_AS(run_checkpoint(config(R"({"executor": {"steps": 0}})"), {}), ConfigError);
    CHECK_THROWS_AS(run_full_agent(config(R"({"world": {"change_points": [5, 3]}})"), {}), ConfigError);
}

TEST_CASE("csv builder") {
    CsvBuilder csv({"a", "b", "c"});
    csv << 1 << 0.5 << "x";
    csv.end_row();
    csv << std::int64_t{-2} << 1e-20 << true;
    csv.end_row();
    CHECK(csv.text() == "a,b,c\n1,0.5,x\n-2,1e-20,1\n");
    CsvBuilder body;
    body << 7 << 8 << 9;
    body.end_row();
    csv.append_body(body);
    CHECK(csv.text() == "a,b,c\n1,0.5,x\n-2,1e-20,1\n7,8,9\n");
}

TEST_CASE("statistics helpers") {
    CHECK(mean({1, 2, 3}) == 2.0);
    CHECK(stddev({2, 4, 4, 4, 5, 5, 7, 9}) == doctest::Approx(2.138).epsilon(1e-3));
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(average_ranks({10, 20, 20, 30}) == std::vector<double>{1, 2.5, 2.5, 4});
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
    CHECK(ols_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
}

TEST_CASE("run_seeds keeps seed order and rethrows") {
    const std::vector<std::uint64_t> seeds{5, 3, 9, 1, 7};
    const auto out = run_seeds<std::uint64_t>(seeds, [](std::uint64_t s, std::size_t) { return s * 2; }, 3);
    CHECK(out == std::vector<std::uint64_t>{10, 6, 18, 2, 14});
    CHECK_THROWS_AS(run_seeds<int>(seeds,
                                   [](std::uint64_t s, std::size_t) -> int {
                                       if (s == 9) throw ConfigError("boom");
                                       return 0;
                                   },
                                   2),
                    ConfigError);
}

TEST_CASE("stationary baselines") {
    RunOptions quiet;
    quiet.emit_csv = false;
    const auto oracle = run_stationary(config(R"({"selector": {"policy": "oracle"}, "world": {"horizon": 20000}})"), quiet);
    CHECK(agg_mean(oracle, "final_cum_regret") == 0.0);
    CHECK(oracle.criteria.empty());

    const auto uniform =
        run_stationary(config(R"({"selector": {"policy": "uniform"}, "world": {"horizon": 20000}})"), quiet);
    CHECK(agg_mean(uniform, "final_cum_regret") / 20000.0 == doctest::Approx(0.32).epsilon(0.02 / 0.32));
}

TEST_CASE("regret curves are non-decreasing in expectation") {
    const auto r = run_stationary(config(R"({"world": {"horizon": 3000}, "seeds": 2})"), {});
    const std::string& text = r.csv.front().second;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    double prev = -1.0;
    std::string prev_seed;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
        REQUIRE(cols.size() == 7);
        if (cols[0] != prev_seed) prev = -1.0;
        const double cum = std::stod(cols[5]);
        CHECK(cum >= prev);
        CHECK(std::stod(cols[4]) >= 0.0);
        prev = cum;
        prev_seed = cols[0];
    }
}

TEST_CASE("tracking without changes") {
    RunOptions quiet;
    quiet.emit_csv = false;
    const auto r = run_tracking(config(R"({"world": {"regime_count": 1, "regime_length": 5000},
                                          "thresholds": {"theta_e": 0.3}, "seeds": 5})"),
                                quiet);
    CHECK(r.aggregates.at("false_alarms") == 0);
    CHECK(agg_mean(r, "cum_regret_reset") == doctest::Approx(agg_mean(r, "cum_regret_no_reset")));
}

TEST_CASE("checkpoint without noise") {
    RunOptions quiet;
    quiet.emit_csv = false;
    const auto r = run_checkpoint(config(R"({"executor": {"sigma": 0.0, "steps": 2000, "steady_state_tail": 500},
                                            "seeds": 2})"),
                                  quiet);
    for (const auto& row : r.aggregates.at("rho_grid")) CHECK(row.at("empirical_mse") == 0.0);
    CHECK(r.aggregates.at("open_loop_mse") == 0.0);
}

TEST_CASE("checkpoint reports inapplicable bounds") {
    RunOptions quiet;
    quiet.emit_csv = false;
    const auto r = run_checkpoint(config(R"({"executor": {"l_f": 1.5, "rho": 0.5, "rho_grid": [0.9],
                                            "steps": 200, "steady_state_tail": 50}, "seeds": 1})"),
                                  quiet);
    bool saw_inapplicable = false;
    for (const auto& row : r.aggregates.at("rho_grid")) saw_inapplicable |= !row.at("bound_applicable").get<bool>();
    CHECK(saw_inapplicable);
}

TEST_CASE("goal-directed identity alignment has unit rate") {
    const auto r = run_goal_directed(config(R"({"seeds": 20})"), {});
    CHECK(r.aggregates.at("lambda_g") == 1.0);
    CHECK(r.aggregates.at("fitted_rate").get<double>() == doctest::Approx(1.0).epsilon(0.2));
    CHECK(r.passed());
}

TEST_CASE("static benign full agent reaches and keeps compliance") {
    const auto r = run_full_agent(config(R"({"world": {"horizon": 3000, "disturbance_sd": 0.0, "kick_prob": 0.0,
                                                       "env_noise": 0.0},
                                            "thresholds": {"theta_s_state": 0.3}, "seeds": 4})"),
                                  {});
    const std::string& text = r.csv.front().second;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    std::map<std::string, std::int64_t> first_compliant;
    std::map<std::string, bool> lost;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
        const std::string& seed = cols[0];
        const bool ok = cols[4] == "1";
        if (ok && !first_compliant.contains(seed)) first_compliant[seed] = std::stoll(cols[1]);
        if (!ok && first_compliant.contains(seed)) lost[seed] = true;
    }
    CHECK(first_compliant.size() == 4);
    CHECK(lost.empty());
}

TEST_CASE("regime change deletes, creates and remaps") {
    const auto r = run_full_agent(config(R"({
        "world": {"regimes": [{"env": [0.5, 0.5], "target": [2.0, 1.0], "goal": "a"},
                              {"env": [2.5, 0.5], "target": [-1.0, 2.0], "goal": "b"}],
                  "change_points": [1500], "horizon": 3000},
        "thresholds": {"theta_s_state": 0.3}, "seeds": 3})"),
                                  {});
    CHECK(criterion(r, "task_churn_after_change").passed);
    CHECK(criterion(r, "goal_remapped_after_change").passed);
    CHECK(r.aggregates.at("worst_goal_remap_latency").get<std::int64_t>() <= 500);
}

TEST_CASE("reports are identical across thread counts") {
    for (const char* name : {"stationary", "checkpoint", "full-agent", "instrumented"}) {
        const auto cfg = config(R"({"seeds": 3, "world": {"horizon": 2000, "episodes": 500},
                                    "executor": {"steps": 1000, "steady_state_tail": 200}})");
        RunOptions one;
        one.threads = 1;
        RunOptions many;
        many.threads = 3;
        const auto a = run_experiment(name, cfg, one);
        const auto b = run_experiment(name, cfg, many);
        CHECK(a.csv == b.csv);
        CHECK(a.summary().dump() == b.summary().dump());
    }
}

TEST_CASE("summary records seeds and verdicts") {
    RunOptions quiet;
    quiet.emit_csv = false;
    const auto r = run_goal_directed(config(R"({"seeds": [2, 4]})"), quiet);
    const auto s = r.summary();
    CHECK(s.at("seeds") == json::array({2, 4}));
    CHECK(s.at("experiment") == "goal-directed");
    CHECK(s.contains("config"));
    CHECK(s.at("criteria").size() == r.criteria.size());
}

TEST_CASE("full agent follows the configured planner table") {
    RunOptions quiet;
    quiet.emit_csv = false;
    const std::string base = R"({"world": {"horizon": 1500, "kick_prob": 0.0}, "seeds": 2, "tasking": {"planner": )";
    const auto servo = run_full_agent(config(base + R"({"default_plan": {"actions": ["servo"]},
                                                      "default_intuition": "servo"}}})"),
                                      quiet);
    const auto hold = run_full_agent(config(base + R"({"default_plan": {"actions": ["hold"]},
                                                     "default_intuition": "hold"}}})"),
                                     quiet);
    CHECK(agg_mean(servo, "mean_reward") > agg_mean(hold, "mean_reward") + 0.1);
    CHECK_THROWS_AS(run_full_agent(config(base + R"({"plans": [{"goal": "g"}]}}})"), quiet), ConfigError);
}
