#pragma once

#include "mpplab/calculus.hpp"
#include "mpplab/models.hpp"
#include "mpplab/piecewise_path.hpp"
#include "mpplab/trajectory.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace mpplab {

/// u(t, s) = E[f(state_T) | state_t = s] on a uniform time grid over [0, T],
/// linearly interpolated in t. Node values at T equal the payoff exactly.
class ValueFunction {
public:
    static constexpr std::size_t kMinIntervals = 1000;
    static constexpr double kTruncationTolerance = 1e-10;

    /// Backward solve u(t_k) = exp((t_{k+1} - t_k) Q) u(t_{k+1}) by uniformization.
    /// The accumulated truncation error is at most kTruncationTolerance * max|f|.
    static ValueFunction solve(const CtmcSpec& spec, std::span<const double> payoff, double terminal_time,
                               std::size_t intervals = kMinIntervals);

    /// Tabulates a known closed form at the grid nodes (the payoff is taken
    /// from the closed form at T).
    static ValueFunction tabulate(std::size_t states, double terminal_time, std::size_t intervals,
                                  const std::function<double(double, std::size_t)>& closed_form);

    double operator()(double t, std::size_t state) const;

    double terminal_time() const noexcept { return terminal_time_; }
    std::size_t intervals() const noexcept { return intervals_; }
    std::size_t state_count() const noexcept { return states_; }
    double node(std::size_t k) const noexcept;
    double at_node(std::size_t k, std::size_t state) const { return values_[k * states_ + state]; }
    double payoff(std::size_t state) const { return at_node(intervals_, state); }
    /// Grid cell k with node(k) <= t < node(k + 1) (the last cell includes T).
    std::size_t cell(double t) const;

private:
    ValueFunction(std::size_t states, double terminal_time, std::size_t intervals);

    std::size_t states_;
    double terminal_time_;
    std::size_t intervals_;
    std::vector<double> values_;  // node-major
};

/// Payoff vector from a short description:
///   "const:<c>", "indicator:<state>", "linear" (numeric state names), "values:v0,v1,...".
std::vector<double> parse_payoff(const std::string& description, const CtmcSpec& spec);

/// Per-path integrand W(t, h) = u(t, to) - u(t, from) while the pre-jump state
/// is `from`, zero otherwise; cells break at the path's jump times and at the
/// value-function grid nodes. Zero after T.
Integrand integrand_from_value(const ValueFunction& u, const CtmcModel& model, const Trajectory& traj);

/// Z_t = u(t, state_t) on [0, T]. Throws std::out_of_range when T exceeds the horizon.
PiecewisePath target_martingale(const ValueFunction& u, const CtmcModel& model, const Trajectory& traj);

/// max over checkpoints of |Z_t - Z_0 - sum_h integral_0^t W(., x_h) dM^h|.
/// Throws std::domain_error when W and M cover different numbers of marks.
double representation_residual(const PiecewisePath& z, const Integrand& w, std::span<const PiecewisePath> m,
                               std::span<const double> checkpoints);

/// Uniform checkpoints on [0, T] plus every event time s <= T and s -/+ step.
std::vector<double> representation_checkpoints(const Trajectory& traj, double terminal_time, double step,
                                               std::size_t uniform_count);

struct RepresentationPathReport {
    double residual = 0.0;
    /// max over event times of |dZ_s - sum_h d(integral W dM^h)_s|
    double jump_mismatch = 0.0;
    /// max |jump| of Z - sum_h integral W dM^h away from event times
    double off_event_jump = 0.0;
    std::size_t checkpoints = 0;
};

/// Builds Z, W and M^h for one CTMC path and evaluates every check above.
RepresentationPathReport verify_representation_path(const ValueFunction& u, const CtmcModel& model,
                                                    const Realization& path, std::size_t uniform_checkpoints);

} // namespace mpplab
