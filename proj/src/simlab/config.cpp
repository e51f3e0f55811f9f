#include "atm/simlab/config.hpp"

#include <charconv>
#include <fstream>
#include <set>

namespace atm::simlab {

namespace {

void read_threshold(const json& t, const char* key, double& slot) { slot = get_or(t, key, slot); }

Thresholds parse_thresholds(const json& t) {
    if (!t.is_object()) throw ConfigError("config: 'thresholds' must be an object");
    static const std::set<std::string> known = {
        "theta_e",   "theta_create", "theta_delete", "theta_ckpt", "theta_f",         "theta_s_state", "theta_contra",
        "theta_ind", "theta_ext",    "theta_sim",    "theta_t",    "theta_s_spatial", "theta_cooccur", "theta_eff"};
    for (const auto& [key, value] : t.items()) {
        if (!known.contains(key)) throw ConfigError("config: unknown threshold '" + key + "'");
    }
    Thresholds out;
    read_threshold(t, "theta_e", out.theta_e);
    read_threshold(t, "theta_create", out.theta_create);
    read_threshold(t, "theta_delete", out.theta_delete);
    read_threshold(t, "theta_ckpt", out.theta_ckpt);
    read_threshold(t, "theta_f", out.theta_f);
    read_threshold(t, "theta_s_state", out.theta_s_state);
    read_threshold(t, "theta_contra", out.theta_contra);
    read_threshold(t, "theta_ind", out.theta_ind);
    read_threshold(t, "theta_ext", out.theta_ext);
    read_threshold(t, "theta_sim", out.theta_sim);
    read_threshold(t, "theta_t", out.theta_t);
    read_threshold(t, "theta_s_spatial", out.theta_s_spatial);
    read_threshold(t, "theta_cooccur", out.theta_cooccur);
    read_threshold(t, "theta_eff", out.theta_eff);
    if (!(out.theta_delete < out.theta_create)) throw ConfigError("config: theta_delete must be < theta_create");
    return out;
}

std::vector<std::uint64_t> parse_seed_json(const json& s) {
    if (s.is_number_unsigned() || s.is_number_integer()) {
        const auto n = s.get<std::int64_t>();
        if (n <= 0) throw ConfigError("config: seed count must be positive");
        return seed_range(static_cast<std::size_t>(n));
    }
    if (s.is_array()) {
        std::vector<std::uint64_t> out;
        for (const auto& v : s) {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
                throw ConfigError("config: seeds must be non-negative integers");
            }
            out.push_back(v.get<std::uint64_t>());
        }
        if (out.empty()) throw ConfigError("config: empty seed list");
        return out;
    }
    throw ConfigError("config: 'seeds' must be a count or a list");
}

}  // namespace

json SimConfig::echo() const {
    json out;
    out["world"] = world;
    out["selector"] = selector;
    out["tasking"] = tasking;
    out["executor"] = executor;
    out["measurement"] = measurement;
    out["patterns"] = patterns;
    out["acceptance"] = acceptance;
    const Thresholds& t = thresholds;
    out["thresholds"] = {{"theta_e", t.theta_e},           {"theta_create", t.theta_create},
                         {"theta_delete", t.theta_delete}, {"theta_ckpt", t.theta_ckpt},
                         {"theta_f", t.theta_f},           {"theta_s_state", t.theta_s_state},
                         {"theta_contra", t.theta_contra}, {"theta_ind", t.theta_ind},
                         {"theta_ext", t.theta_ext},       {"theta_sim", t.theta_sim},
                         {"theta_t", t.theta_t},           {"theta_s_spatial", t.theta_s_spatial},
                         {"theta_cooccur", t.theta_cooccur}, {"theta_eff", t.theta_eff}};
    out["seeds"] = seeds;
    return out;
}

SimConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    static const std::set<std::string> known = {"world",    "selector",   "tasking", "executor", "measurement",
                                                "patterns", "thresholds", "seeds",   "acceptance"};
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) throw ConfigError("config: unknown top-level key '" + key + "'");
    }
    SimConfig cfg;
    auto section = [&](const char* key, json& slot) {
        if (!doc.contains(key)) return;
        if (!doc.at(key).is_object()) throw ConfigError(std::string("config: '") + key + "' must be an object");
        slot = doc.at(key);
    };
    section("world", cfg.world);
    section("selector", cfg.selector);
    section("tasking", cfg.tasking);
    section("executor", cfg.executor);
    section("measurement", cfg.measurement);
    section("patterns", cfg.patterns);
    section("acceptance", cfg.acceptance);
    cfg.thresholds = parse_thresholds(doc.value("thresholds", json::object()));
    cfg.seeds = doc.contains("seeds") ? parse_seed_json(doc.at("seeds")) : seed_range(20);
    return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

std::vector<std::uint64_t> seed_range(std::size_t n) {
    std::vector<std::uint64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = i;
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
    auto parse_one = [](std::string_view s) {
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
            throw ConfigError("invalid seed '" + std::string(s) + "'");
        }
        return v;
    };
    if (spec.find(',') == std::string::npos) {
        const std::uint64_t n = parse_one(spec);
        if (n == 0) throw ConfigError("seed count must be positive");
        return seed_range(static_cast<std::size_t>(n));
    }
    std::vector<std::uint64_t> out;
    std::size_t start = 0;
    while (start <= spec.size()) {
        const auto comma = spec.find(',', start);
        const auto end = comma == std::string::npos ? spec.size() : comma;
        out.push_back(parse_one(std::string_view(spec).substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace atm::simlab
