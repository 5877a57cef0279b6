#pragma once

#include <cstdint>
#include <limits>

namespace mpplab {

/// xoshiro256** generator keyed by (master seed, stream index).
///
/// Replication r of an experiment always draws from StreamRng(master, r), so
/// results do not depend on which thread runs which replication. The key is
/// expanded through SplitMix64, which decorrelates neighbouring indices.
class StreamRng {
public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t master_seed, std::uint64_t stream);

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform double in the open interval (0, 1), 53 bits of resolution.
    double uniform() noexcept;
    /// Exponential variate with the given positive rate.
    double exponential(double rate) noexcept;

private:
    std::uint64_t s_[4];
};

/// SplitMix64 output function.
std::uint64_t mix64(std::uint64_t x) noexcept;

} // namespace mpplab
