#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "atm/common.hpp"

namespace atm::simlab {

using nlohmann::json;

// Row-oriented CSV text with canonical number formatting.
class CsvBuilder {
public:
    CsvBuilder() = default;
    explicit CsvBuilder(std::initializer_list<std::string_view> header);

    CsvBuilder& operator<<(double v);
    CsvBuilder& operator<<(std::int64_t v);
    CsvBuilder& operator<<(std::uint64_t v);
    CsvBuilder& operator<<(int v) { return *this << static_cast<std::int64_t>(v); }
    CsvBuilder& operator<<(const char* v) { return *this << std::string_view(v); }
    CsvBuilder& operator<<(bool v) { return *this << static_cast<std::int64_t>(v ? 1 : 0); }
    CsvBuilder& operator<<(std::string_view v);
    void end_row();

    // Appends the body rows of `other` (its header, if any, is skipped).
    void append_body(const CsvBuilder& other);

    const std::string& text() const { return text_; }
    void reserve(std::size_t bytes) { text_.reserve(bytes); }

private:
    void separator();

    std::string text_;
    std::size_t header_bytes_ = 0;
    bool row_open_ = false;
};

struct Criterion {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    json config;
    std::vector<std::uint64_t> seeds;
    std::vector<std::pair<std::string, std::string>> csv;  // file stem -> CSV text
    json aggregates = json::object();
    std::vector<Criterion> criteria;

    bool passed() const;
    json summary() const;
};

// Writes every CSV as <stem>.csv and the summary as <experiment>_summary.json.
void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);
// Linear-interpolated quantile, q in [0, 1].
double quantile(std::vector<double> v, double q);
json describe(const std::vector<double>& v);

// Ranks with ties sharing their average rank (1-based).
std::vector<double> average_ranks(const std::vector<double>& v);
double pearson(const std::vector<double>& x, const std::vector<double>& y);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Least-squares slope of y against x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

std::size_t default_threads();

/// Runs fn(seed, index) for every seed on a small worker pool and returns the
/// results in seed order. The first exception (by seed order) is rethrown.
template <typename R, typename Fn>
std::vector<R> run_seeds(const std::vector<std::uint64_t>& seeds, Fn&& fn, std::size_t threads = default_threads()) {
    std::vector<R> results(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            try {
                results[i] = fn(seeds[i], i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t n = std::max<std::size_t>(1, std::min(threads, seeds.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

}  // namespace atm::simlab
