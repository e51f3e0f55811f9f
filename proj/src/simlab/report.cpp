#include "atm/simlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace atm::simlab {

CsvBuilder::CsvBuilder(std::initializer_list<std::string_view> header) {
    for (std::string_view h : header) *this << h;
    end_row();
    header_bytes_ = text_.size();
}

void CsvBuilder::separator() {
    if (row_open_) text_.push_back(',');
    row_open_ = true;
}

CsvBuilder& CsvBuilder::operator<<(double v) {
    separator();
    text_ += format_double(v);
    return *this;
}

CsvBuilder& CsvBuilder::operator<<(std::int64_t v) {
    separator();
    text_ += std::to_string(v);
    return *this;
}

CsvBuilder& CsvBuilder::operator<<(std::uint64_t v) {
    separator();
    text_ += std::to_string(v);
    return *this;
}

CsvBuilder& CsvBuilder::operator<<(std::string_view v) {
    separator();
    text_ += v;
    return *this;
}

void CsvBuilder::end_row() {
    text_.push_back('\n');
    row_open_ = false;
}

void CsvBuilder::append_body(const CsvBuilder& other) {
    text_.append(other.text_, other.header_bytes_, std::string::npos);
}

bool ExperimentReport::passed() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.passed; });
}

json ExperimentReport::summary() const {
    json out;
    out["experiment"] = experiment;
    out["config"] = config;
    out["seeds"] = seeds;
    out["aggregates"] = aggregates;
    out["criteria"] = json::array();
    for (const auto& c : criteria) {
        out["criteria"].push_back({{"name", c.name},
                                   {"value", c.value},
                                   {"threshold", c.threshold},
                                   {"passed", c.passed},
                                   {"detail", c.detail}});
    }
    out["passed"] = passed();
    return out;
}

void write_report(const ExperimentReport& report, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const auto& [stem, text] : report.csv) {
        std::ofstream out(out_dir / (stem + ".csv"), std::ios::binary);
        if (!out) throw ConfigError("cannot write " + (out_dir / (stem + ".csv")).string());
        out << text;
    }
    std::ofstream summary(out_dir / (report.experiment + "_summary.json"));
    if (!summary) throw ConfigError("cannot write summary to " + out_dir.string());
    summary << report.summary().dump(2) << '\n';
}

double mean(const std::vector<double>& v) {
    require(!v.empty(), "mean: empty sample");
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> v, double q) {
    require(!v.empty(), "quantile: empty sample");
    require(q >= 0.0 && q <= 1.0, "quantile: q must lie in [0, 1]");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

json describe(const std::vector<double>& v) {
    return {{"mean", mean(v)},
            {"std", stddev(v)},
            {"q05", quantile(v, 0.05)},
            {"q50", quantile(v, 0.5)},
            {"q95", quantile(v, 0.95)},
            {"n", v.size()}};
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() > 1, "pearson: need two aligned samples");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0.0 && syy > 0.0, "pearson: constant sample");
    return sxy / std::sqrt(sxx * syy);
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(average_ranks(x), average_ranks(y));
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() > 1, "ols_slope: need two aligned samples");
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0.0, "ols_slope: constant regressor");
    return sxy / sxx;
}

std::size_t default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace atm::simlab
