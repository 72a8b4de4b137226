#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fcritic {

/// Identifier of the random stream below; echoed into every report.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/u53-rejection/v1";

/// Seeded generator with portable distributions.
///
/// Uniform draws are derived directly from the raw std::mt19937_64 words.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer on the closed range [lo, hi]; unbiased (rejection).
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);
    /// Fair coin.
    bool coin();

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for a named sub-stream (e.g. ("vertical_shift/candidate", 17)).
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index = 0);

}  // namespace fcritic
