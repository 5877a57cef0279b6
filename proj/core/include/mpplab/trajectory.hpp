#pragma once

#include "mpplab/mark_space.hpp"
#include "mpplab/piecewise_path.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace mpplab {

/// One point (T_n, X_n) of a marked point process. (+inf, Delta) points are
/// never stored; a trajectory simply ends.
struct Event {
    double time = 0.0;
    MarkId mark;
};

/// Finite realisation of a marked point process on [0, horizon].
///
/// Event times are strictly increasing, positive, and no later than the
/// horizon; two events are simultaneous only if their times are bit-identical,
/// which the strict ordering rules out within one trajectory.
class Trajectory {
public:
    Trajectory(MarkSpacePtr space, std::vector<Event> events, double horizon);

    const MarkSpace& mark_space() const noexcept { return *space_; }
    const MarkSpacePtr& mark_space_ptr() const noexcept { return space_; }
    std::span<const Event> events() const noexcept { return events_; }
    std::size_t size() const noexcept { return events_.size(); }
    bool empty() const noexcept { return events_.empty(); }
    double horizon() const noexcept { return horizon_; }

    /// Mark spaces compare by value, events and horizon bitwise.
    friend bool operator==(const Trajectory& a, const Trajectory& b);

private:
    MarkSpacePtr space_;
    std::vector<Event> events_;
    double horizon_;
};

/// mu((0, s] x B): number of events with time <= s and mark in B.
/// Throws std::out_of_range for s outside [0, horizon] and std::domain_error
/// for marks outside the trajectory's space. Duplicates in B count once.
std::size_t measure_eval(const Trajectory& traj, double s, std::span<const MarkId> marks);
std::size_t measure_eval(const Trajectory& traj, double s, MarkId mark);

/// N^h: unit jumps at the times of events carrying mark h.
PiecewisePath counting_path(const Trajectory& traj, MarkId h);

} // namespace mpplab
