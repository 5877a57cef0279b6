#pragma once

#include "mpplab/compensator.hpp"
#include "mpplab/merge.hpp"
#include "mpplab/piecewise_path.hpp"
#include "mpplab/trajectory.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mpplab {

inline constexpr const char* kFormatVersion = "v1";

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// Trajectory file, JSON Lines:
///   line 1: {"schema":"mpplab.trajectory","version":"v1","horizon":H,"marks":[...],
///            "components":[[...],...]}      ("components" only for merged files)
///   then one {"t":T,"mark":M} per event, M a string or, for merged marks, an
///   array of strings with "0" as the zero symbol.
void write_trajectory(std::ostream& out, const Trajectory& traj);
void write_trajectory(std::ostream& out, const MergedTrajectory& merged);

struct TrajectoryFile {
    Trajectory trajectory;
    /// Present when the file holds a merged trajectory.
    std::optional<MergedTrajectory> merged;
};

/// Throws std::invalid_argument with a line number on malformed input.
TrajectoryFile read_trajectory(std::istream& in);

/// Compensator file, one JSON document:
///   {"schema":"mpplab.compensator","version":"v1","horizon":H,"marks":[...],
///    "parts":[{"breakpoints":[[t,c],...],"slopes":[...],"atoms":[[t,m],...]},...]}
/// Slopes are stored alongside breakpoints so reading is lossless.
void write_compensator(std::ostream& out, const Compensator& comp);
Compensator read_compensator(std::istream& in);

/// CSV with header "time,value,jump", one row per drift breakpoint and jump
/// plus t = 0 and the horizon; value is the right-continuous value.
void write_path_csv(std::ostream& out, const PiecewisePath& path);

/// {"schema":"mpplab.path","version":"v1","horizon":H,"initial":x,
///  "drift":[[start,c0,c1,c2,c3],...],"jumps":[[t,size],...]}
void write_path_json(std::ostream& out, const PiecewisePath& path);
PiecewisePath read_path_json(std::istream& in);

} // namespace mpplab
