#pragma once

// Shared plumbing: deterministic RNG, error taxonomy, content hashing.
// Every random draw in the library flows through Rng so that runs are
// reproducible bit-for-bit from a single 64-bit seed.

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redtrace {

inline constexpr std::string_view kToolVersion = "0.1.0";

// ----- errors ---------------------------------------------------------

struct InvalidArgument : std::runtime_error {
    explicit InvalidArgument(const std::string& msg) : std::runtime_error(msg) {}
};

struct IllegalAction : std::runtime_error {
    explicit IllegalAction(const std::string& msg) : std::runtime_error(msg) {}
};

struct EmptyBufferError : std::runtime_error {
    explicit EmptyBufferError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Trace/replay disagreement: the recorded run does not reproduce.
struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// ----- hashing --------------------------------------------------------

// FNV-1a, 64 bit. Used for log content hashes and seed derivation.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from (seed, label). Labels keep the
// environment, parameter-init, action and replay streams decoupled.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    return splitmix64(seed ^ fnv1a64(label));
}

// ----- rng ------------------------------------------------------------

// mt19937_64 is fully specified by the standard; the std distributions are
// not, so bounded draws are derived here by hand to keep traces identical
// across standard libraries.
class Rng {
public:
    Rng() : gen_(0) {}
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double real01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). Multiply-high mapping; bias is < n / 2^64.
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(u64()) * static_cast<unsigned __int128>(n)) >> 64);
    }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * real01(); }

    bool bernoulli(double p) { return real01() < p; }

private:
    std::mt19937_64 gen_;
};

// ----- misc -----------------------------------------------------------

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace redtrace
