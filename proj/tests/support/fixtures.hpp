#pragma once

#include <mpplab/compensator.hpp>
#include <mpplab/mark_space.hpp>
#include <mpplab/models.hpp>
#include <mpplab/rng.hpp>
#include <mpplab/trajectory.hpp>

#include <algorithm>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace fixtures {

using namespace mpplab;

inline MarkSpacePtr flat(std::initializer_list<std::string> names)
{
    return make_flat_space(std::vector<std::string>(names));
}

inline Trajectory traj(const MarkSpacePtr& space, std::vector<std::pair<double, std::string>> events, double horizon)
{
    std::vector<Event> ev;
    for (const auto& [t, m] : events) ev.push_back({t, space->id(m)});
    return Trajectory(space, std::move(ev), horizon);
}

// Q_12 = 1, Q_21 = 0, start in "1".
inline CtmcSpec two_state(double horizon = 1.0)
{
    CtmcSpec s;
    s.states = {"1", "2"};
    s.generator = {{-1.0, 1.0}, {0.0, 0.0}};
    s.initial = 0;
    s.horizon = horizon;
    return s;
}

inline CtmcSpec three_state_cycle(double horizon = 2.0)
{
    CtmcSpec s;
    s.states = {"1", "2", "3"};
    s.generator = {{-1.5, 1.5, 0.0}, {0.0, -0.7, 0.7}, {2.0, 0.0, -2.0}};
    s.initial = 0;
    s.horizon = horizon;
    return s;
}

// Marks "h" and "k" share the atom at t = 1.0.
inline GridBernoulliSpec shared_atom_grid(double ph = 0.3, double pk = 0.2, double horizon = 2.0)
{
    GridBernoulliSpec s;
    s.grid = {1.0};
    s.probs = {{"h", {ph}}, {"k", {pk}}};
    s.horizon = horizon;
    return s;
}

inline GridBernoulliSpec disjoint_grid(double horizon = 3.0)
{
    GridBernoulliSpec s;
    s.grid = {1.0, 1.5, 2.0};
    s.probs = {{"a", {0.4, 0.0, 0.5}}, {"b", {0.0, 0.6, 0.0}}};
    s.horizon = horizon;
    return s;
}

inline CommonShockSpec numeric_shock(double shock_rate = 0.5, double horizon = 10.0)
{
    CommonShockSpec s;
    s.components = {{{"1", 0.8}, {"2", 0.3}}, {{"1", 0.6}}};
    s.shock_rate = shock_rate;
    s.shock_components = {0, 1};
    s.shock_marks = {"2", "1"};
    s.horizon = horizon;
    return s;
}

/// Up to max_events distinct times in (0, horizon] with random marks.
inline Trajectory random_trajectory(StreamRng& rng, const MarkSpacePtr& space, std::size_t max_events, double horizon)
{
    const auto n = static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_events + 1));
    std::vector<double> times;
    while (times.size() < n) {
        const double t = rng.uniform() * horizon;
        if (std::find(times.begin(), times.end(), t) == times.end()) times.push_back(t);
    }
    std::sort(times.begin(), times.end());
    std::vector<Event> ev;
    for (double t : times) {
        ev.push_back({t, MarkId{static_cast<std::size_t>(rng.uniform() * static_cast<double>(space->size()))}});
    }
    return Trajectory(space, std::move(ev), horizon);
}

} // namespace fixtures
