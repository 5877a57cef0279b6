#include "mpplab/trajectory.hpp"

#include "mpplab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mpplab {

Trajectory::Trajectory(MarkSpacePtr space, std::vector<Event> events, double horizon)
    : space_(std::move(space)), events_(std::move(events)), horizon_(horizon)
{
    if (!space_) {
        throw std::invalid_argument("trajectory requires a mark space");
    }
    if (!std::isfinite(horizon_) || horizon_ <= 0.0) {
        throw std::invalid_argument("trajectory horizon must be positive and finite");
    }
    if (events_.size() >= kExplosionGuard) {
        throw ExplosionError("trajectory has " + std::to_string(events_.size()) + " events on [0, horizon]");
    }
    for (std::size_t n = 0; n < events_.size(); ++n) {
        const auto& e = events_[n];
        if (!(e.time > 0.0) || !std::isfinite(e.time)) {
            throw std::invalid_argument("event times must be positive and finite");
        }
        if (e.time > horizon_) {
            throw std::invalid_argument("event at t=" + std::to_string(e.time) + " lies beyond the horizon");
        }
        if (n > 0 && !(events_[n - 1].time < e.time)) {
            throw std::invalid_argument("event times must be strictly increasing (index " + std::to_string(n) + ")");
        }
        if (!space_->contains(e.mark)) {
            throw std::domain_error("event mark outside the trajectory's mark space");
        }
    }
}

bool operator==(const Trajectory& a, const Trajectory& b)
{
    if (a.horizon_ != b.horizon_ || a.events_.size() != b.events_.size()) {
        return false;
    }
    if (a.space_ != b.space_ && !(*a.space_ == *b.space_)) {
        return false;
    }
    return std::equal(a.events_.begin(), a.events_.end(), b.events_.begin(),
                      [](const Event& x, const Event& y) { return x.time == y.time && x.mark == y.mark; });
}

namespace {

void check_time(const Trajectory& traj, double s)
{
    if (!(s >= 0.0 && s <= traj.horizon())) {
        throw std::out_of_range("time " + std::to_string(s) + " outside [0, horizon]");
    }
}

} // namespace

std::size_t measure_eval(const Trajectory& traj, double s, std::span<const MarkId> marks)
{
    require_marks(traj.mark_space(), marks);
    check_time(traj, s);
    std::vector<char> in_set(traj.mark_space().size(), 0);
    for (auto id : marks) {
        in_set[id.index] = 1;
    }
    std::size_t count = 0;
    for (const auto& e : traj.events()) {
        if (e.time > s) {
            break;
        }
        count += static_cast<std::size_t>(in_set[e.mark.index]);
    }
    return count;
}

std::size_t measure_eval(const Trajectory& traj, double s, MarkId mark)
{
    return measure_eval(traj, s, std::span<const MarkId>(&mark, 1));
}

PiecewisePath counting_path(const Trajectory& traj, MarkId h)
{
    if (!traj.mark_space().contains(h)) {
        throw std::domain_error("counting_path: mark outside the trajectory's mark space");
    }
    std::vector<Jump> jumps;
    for (const auto& e : traj.events()) {
        if (e.mark == h) {
            jumps.push_back({e.time, 1.0});
        }
    }
    return PiecewisePath(0.0, {}, std::move(jumps), traj.horizon());
}

} // namespace mpplab
