#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace lewis {

// SplitMix64 step; used for seeding and for deriving independent substreams.
std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256** stream. Every sampling helper below consumes exactly one
// 64-bit draw per decision (uniform_index may reject, see below), so the
// mapping from seed to outcomes does not depend on the standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed = 0);

    // Stream keyed on (master_seed, index); distinct indices give
    // statistically independent streams.
    static RandomStream derive(std::uint64_t master_seed, std::uint64_t index);

    std::uint64_t next();

    // Uniform double in [0, 1) with 53 bits of resolution.
    double uniform01();

    // Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    std::size_t uniform_index(std::size_t n);

    // Sample an index from a probability vector (inverse CDF, one draw).
    std::size_t categorical(std::span<const double> probs);

    bool operator==(const RandomStream&) const = default;

private:
    std::array<std::uint64_t, 4> s_{};
};

} // namespace lewis
