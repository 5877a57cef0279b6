#pragma once

#include "mpplab/compensator.hpp"
#include "mpplab/trajectory.hpp"

#include <cstddef>
#include <functional>
#include <span>

namespace mpplab {

struct MonteCarloEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t replications = 0;

    /// |mean - value| <= sigmas * standard_error
    bool covers(double value, double sigmas = 4.0) const noexcept;
};

/// Mean and standard error accumulated in index order.
MonteCarloEstimate summarize(std::span<const double> samples);

/// 0 means one thread per hardware core.
unsigned resolve_threads(unsigned requested) noexcept;

/// Runs body(i) for i in [0, n) on `threads` workers with contiguous blocks.
/// The first exception by index is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// M^h_t = N^h_t - nu((0, t] x {h}) evaluated directly from a realization.
double martingale_at(const Trajectory& traj, const Compensator& comp, MarkId h, double t);

/// Row-major out[h * times.size() + j] = M^h at times[j]; times must be sorted.
void martingale_values(const Trajectory& traj, const Compensator& comp, std::span<const double> times,
                       std::span<double> out);

} // namespace mpplab
