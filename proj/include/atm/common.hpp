#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace atm {

using Vec = std::vector<double>;

// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Raised when a lookup has nothing to return (empty scenario, unknown event, ...).
class NotFound : public std::runtime_error {
public:
    explicit NotFound(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, std::string_view message) {
    if (!condition) {
        throw ContractViolation(std::string(message));
    }
}

enum class Norm { L2, L1, LInf };

Norm parse_norm(std::string_view name);
std::string_view to_string(Norm norm);

// Norm of (a - b). Throws ContractViolation on dimension mismatch.
double distance(std::span<const double> a, std::span<const double> b, Norm norm = Norm::L2);
double norm_of(std::span<const double> v, Norm norm = Norm::L2);
bool all_finite(std::span<const double> v);

// splitmix64 finalizer; used to derive independent stream seeds from one run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Seeded generator with platform-independent derived distributions.
///
/// The engine (mt19937_64) is fully specified by the standard, but the
/// standard distributions are not, so uniform/normal draws are derived here
/// to keep reports byte-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n).
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller; the second variate is cached.
    double normal();

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

// Shortest round-trip decimal representation; used for every CSV/JSON number.
std::string format_double(double value);

}  // namespace atm
