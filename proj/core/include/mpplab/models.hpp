#pragma once

#include "mpplab/compensator.hpp"
#include "mpplab/mark_space.hpp"
#include "mpplab/rng.hpp"
#include "mpplab/trajectory.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mpplab {

/// Independent homogeneous Poisson streams, one per mark.
struct PoissonSpec {
    std::map<std::string, double> rates;
    double horizon = 1.0;

    void validate() const;
};

/// Continuous-time Markov chain whose transitions are the marks.
struct CtmcSpec {
    std::vector<std::string> states;
    std::vector<std::vector<double>> generator;
    std::size_t initial = 0;
    /// (from, to) -> mark label. Left empty, labels default to "<from>-><to>".
    std::map<std::pair<std::size_t, std::size_t>, std::string> mark_map;
    double horizon = 1.0;

    void validate() const;

    /// Pure-birth chain on {0, ..., levels} with rate `rate`; level `levels` is absorbing.
    static CtmcSpec birth_chain(double rate, std::size_t levels, double horizon);
};

/// Deterministic grid; at each grid time at most one mark fires, mark h with
/// probability probs[h][k].
struct GridBernoulliSpec {
    std::vector<double> grid;
    std::map<std::string, std::vector<double>> probs;
    double horizon = 1.0;

    void validate() const;
};

/// d >= 2 Poisson components plus a shock stream that makes two designated
/// components jump at the same instant.
struct CommonShockSpec {
    std::vector<std::map<std::string, double>> components;
    double shock_rate = 0.0;
    std::array<std::size_t, 2> shock_components{0, 1};
    std::array<std::string, 2> shock_marks;
    double horizon = 1.0;

    void validate() const;
};

using LeafSpec = std::variant<PoissonSpec, CtmcSpec, GridBernoulliSpec>;

/// Independent leaf models observed jointly through their merging process.
struct ProductSpec {
    std::vector<LeafSpec> components;

    void validate() const;
};

using ModelSpec = std::variant<PoissonSpec, CtmcSpec, GridBernoulliSpec, CommonShockSpec, ProductSpec>;

double horizon_of(const ModelSpec& spec);
std::string kind_of(const ModelSpec& spec);

/// A simulated path together with its exact compensator. Merged models also
/// carry their component trajectories.
struct Realization {
    Trajectory trajectory;
    Compensator compensator;
    std::vector<Trajectory> components;
};

class PoissonModel {
public:
    explicit PoissonModel(PoissonSpec spec);

    const PoissonSpec& spec() const noexcept { return spec_; }
    const MarkSpacePtr& mark_space() const noexcept { return space_; }
    double rate(MarkId h) const { return rates_.at(h.index); }

    Trajectory simulate_trajectory(StreamRng& rng) const;
    Realization simulate(StreamRng& rng) const;

private:
    PoissonSpec spec_;
    MarkSpacePtr space_;
    std::vector<double> rates_;
};

/// Piece of a CTMC state path: the chain sits in `state` from `start` on.
struct StateVisit {
    double start;
    std::size_t state;
};

class CtmcModel {
public:
    struct Transition {
        std::size_t from;
        std::size_t to;
        double rate;
        MarkId mark;
    };

    explicit CtmcModel(CtmcSpec spec);

    const CtmcSpec& spec() const noexcept { return spec_; }
    const MarkSpacePtr& mark_space() const noexcept { return space_; }
    std::span<const Transition> transitions() const noexcept { return transitions_; }
    const Transition& transition(MarkId h) const { return transitions_.at(h.index); }
    std::size_t state_count() const noexcept { return spec_.states.size(); }

    Realization simulate(StreamRng& rng) const;

    /// Piecewise-constant state path rebuilt from the marks of a trajectory.
    /// Throws std::domain_error when a mark does not leave the current state.
    std::vector<StateVisit> state_path(const Trajectory& traj) const;

private:
    CtmcSpec spec_;
    MarkSpacePtr space_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<std::size_t>> outgoing_;  // state -> transition indices
    std::vector<double> exit_rate_;
};

class GridBernoulliModel {
public:
    explicit GridBernoulliModel(GridBernoulliSpec spec);

    const GridBernoulliSpec& spec() const noexcept { return spec_; }
    const MarkSpacePtr& mark_space() const noexcept { return space_; }
    /// The path-independent compensator (atoms only).
    const Compensator& compensator() const noexcept { return compensator_; }

    Realization simulate(StreamRng& rng) const;

private:
    GridBernoulliSpec spec_;
    MarkSpacePtr space_;
    std::vector<std::vector<double>> probs_;  // mark -> per grid time
    Compensator compensator_;
};

class CommonShockModel {
public:
    explicit CommonShockModel(CommonShockSpec spec);

    const CommonShockSpec& spec() const noexcept { return spec_; }
    std::span<const MarkSpacePtr> component_spaces() const noexcept { return component_spaces_; }
    const MarkSpacePtr& mark_space() const noexcept { return merged_space_; }
    /// Merged compensator: idiosyncratic rates on single-component marks, the
    /// shock rate on the simultaneous mark, zero elsewhere.
    const Compensator& merged_compensator() const noexcept { return merged_compensator_; }
    MarkId shock_mark() const noexcept { return shock_mark_; }

    std::vector<Trajectory> simulate_components(StreamRng& rng) const;
    Realization simulate(StreamRng& rng) const;

private:
    CommonShockSpec spec_;
    std::vector<MarkSpacePtr> component_spaces_;
    std::vector<std::vector<double>> rates_;
    MarkSpacePtr merged_space_;
    Compensator merged_compensator_;
    MarkId shock_mark_;
};

/// Any built-in model behind one interface.
class Model {
public:
    explicit Model(ModelSpec spec);

    const ModelSpec& spec() const noexcept { return spec_; }
    const MarkSpacePtr& mark_space() const noexcept { return space_; }
    double horizon() const noexcept { return horizon_; }
    bool is_merged() const noexcept { return !component_spaces_.empty(); }
    std::span<const MarkSpacePtr> component_spaces() const noexcept { return component_spaces_; }

    Realization simulate(StreamRng& rng) const;

    /// Per mark: deterministic times at which the mark fires with positive
    /// probability. Empty for marks driven only by continuous intensities.
    const std::vector<std::vector<double>>& deterministic_firing_times() const noexcept { return firing_times_; }

    /// Non-null only for CTMC models.
    const CtmcModel* ctmc() const noexcept;

private:
    using Leaf = std::variant<PoissonModel, CtmcModel, GridBernoulliModel>;

    ModelSpec spec_;
    std::vector<Leaf> leaves_;
    std::unique_ptr<CommonShockModel> shock_;
    std::vector<MarkSpacePtr> component_spaces_;
    MarkSpacePtr space_;
    double horizon_ = 0.0;
    std::vector<std::vector<double>> firing_times_;
};

// Seeded one-shot simulators (stream 0 of the given seed).
std::pair<Trajectory, Compensator> simulate_poisson(const PoissonSpec& spec, std::uint64_t seed);
std::pair<Trajectory, Compensator> simulate_ctmc(const CtmcSpec& spec, std::uint64_t seed);
std::pair<Trajectory, Compensator> simulate_grid_bernoulli(const GridBernoulliSpec& spec, std::uint64_t seed);
std::vector<Trajectory> simulate_common_shock(const CommonShockSpec& spec, std::uint64_t seed);

/// JSON model description (see README for the schema).
ModelSpec parse_model_spec(const std::string& json_text);
std::string model_spec_to_json(const ModelSpec& spec);

} // namespace mpplab
