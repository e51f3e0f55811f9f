#include "atm/common.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace atm {

Norm parse_norm(std::string_view name) {
    if (name == "l2" || name == "L2") return Norm::L2;
    if (name == "l1" || name == "L1") return Norm::L1;
    if (name == "linf" || name == "Linf" || name == "LInf") return Norm::LInf;
    throw ConfigError("unknown norm '" + std::string(name) + "'");
}

std::string_view to_string(Norm norm) {
    switch (norm) {
        case Norm::L2: return "l2";
        case Norm::L1: return "l1";
        case Norm::LInf: return "linf";
    }
    return "l2";
}

double distance(std::span<const double> a, std::span<const double> b, Norm norm) {
    if (a.size() != b.size()) {
        throw ContractViolation("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i] - b[i]);
        switch (norm) {
            case Norm::L2: acc += d * d; break;
            case Norm::L1: acc += d; break;
            case Norm::LInf: acc = std::max(acc, d); break;
        }
    }
    return norm == Norm::L2 ? std::sqrt(acc) : acc;
}

double norm_of(std::span<const double> v, Norm norm) {
    const Vec zero(v.size(), 0.0);
    return distance(v, zero, norm);
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::size_t Rng::uniform_index(std::size_t n) {
    require(n > 0, "uniform_index: n must be positive");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

}  // namespace atm
