#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpplab {

/// Trajectories are finite on [0, horizon]; this many events is treated as explosion.
inline constexpr std::size_t kExplosionGuard = 1'000'000;

/// Raised when a simulator or trajectory exceeds kExplosionGuard events.
class ExplosionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an operation needs numeric marks but the mark labels do not parse as numbers.
class UnsupportedPayload : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace mpplab
