#pragma once

#include "mpplab/compensator.hpp"
#include "mpplab/mark_space.hpp"
#include "mpplab/trajectory.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mpplab {

/// Merging process {(T_n, V_n)} of d component trajectories. Marks live in the
/// product-with-zero space E^1_0 x ... x E^d_0 minus the all-zero tuple.
struct MergedTrajectory {
    Trajectory trajectory;
    std::vector<MarkSpacePtr> components;

    std::size_t component_count() const noexcept { return components.size(); }
};

/// Full product space E^1_0 x ... x E^d_0 \ {(0, ..., 0)}, ordered
/// lexicographically with the zero symbol first in every slot.
MarkSpacePtr merged_mark_space(std::span<const MarkSpacePtr> components);

/// Index of the merged mark with the given per-slot digits (0 = zero symbol,
/// k + 1 = k-th mark of that component) inside merged_mark_space(components).
MarkId merged_mark_id(std::span<const MarkSpacePtr> components, std::span<const std::size_t> digits);

/// Merges d >= 1 trajectories sharing one horizon. Times that coincide
/// bit-for-bit across components become one merged event. Pass a prebuilt
/// merged space to avoid rebuilding it per path.
MergedTrajectory merge(std::span<const Trajectory> trajs, MarkSpacePtr merged_space = nullptr);

/// Component i (0-based): merged events whose i-th coordinate is nonzero.
Trajectory project(const MergedTrajectory& merged, std::size_t i);

/// Merged marks whose i-th coordinate lies in `marks` (a cylinder set).
std::vector<MarkId> cylinder(const MergedTrajectory& merged, std::size_t i, std::span<const MarkId> marks);
/// Label form; throws std::domain_error if a label is the zero symbol or unknown.
std::vector<MarkId> cylinder(const MergedTrajectory& merged, std::size_t i, std::span<const std::string> labels);

struct IndistinguishabilityReport {
    bool pass = true;
    std::size_t comparisons = 0;
    std::size_t mismatches = 0;
    double max_abs_difference = 0.0;
};

/// Compares V^i_t = sum_n V^i_n 1{T_n <= t} with X^i_t = sum_k X^i_k 1{T^i_k <= t}
/// for every component and grid time. Requires numeric mark labels; throws
/// UnsupportedPayload otherwise. The zero symbol contributes 0.
IndistinguishabilityReport merged_semimartingale_check(const MergedTrajectory& merged,
                                                       std::span<const Trajectory> trajs,
                                                       std::span<const double> grid);

/// Compensator of the merged process.
///
/// With `independent` set, component compensators are embedded slot-wise and
/// every mark with two or more nonzero coordinates gets the zero compensator;
/// atoms shared (bit-identical times) across components are rejected because
/// they indicate dependence. Otherwise `model_supplied` must be given and is
/// returned unchanged.
Compensator merged_compensator(std::span<const Compensator> comps, bool independent,
                               const Compensator* model_supplied = nullptr, MarkSpacePtr merged_space = nullptr);

} // namespace mpplab
