#include "mpplab/models.hpp"

#include "mpplab/errors.hpp"
#include "mpplab/merge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mpplab {

namespace {

void check_horizon(double horizon)
{
    if (!std::isfinite(horizon) || horizon <= 0.0) {
        throw std::invalid_argument("horizon must be positive and finite");
    }
}

void check_rate(double rate, bool allow_zero)
{
    if (!std::isfinite(rate) || rate < 0.0 || (!allow_zero && rate == 0.0)) {
        throw std::invalid_argument(allow_zero ? "rates must be finite and nonnegative"
                                               : "rates must be finite and positive");
    }
}

std::vector<std::string> keys(const std::map<std::string, double>& m)
{
    std::vector<std::string> out;
    for (const auto& [k, v] : m) out.push_back(k);
    return out;
}

void guard(std::size_t n)
{
    if (n >= kExplosionGuard) {
        throw ExplosionError("more than " + std::to_string(kExplosionGuard) + " events before the horizon");
    }
}

// Arrival times of a homogeneous Poisson stream on (0, horizon].
void poisson_arrivals(StreamRng& rng, double rate, double horizon, MarkId mark, std::vector<Event>& out)
{
    if (rate == 0.0) return;
    double t = 0.0;
    for (;;) {
        t += rng.exponential(rate);
        if (t > horizon) break;
        out.push_back({t, mark});
        guard(out.size());
    }
}

void sort_by_time(std::vector<Event>& events)
{
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
}

} // namespace

// ---------------------------------------------------------------- specs

void PoissonSpec::validate() const
{
    check_horizon(horizon);
    if (rates.empty()) {
        throw std::invalid_argument("poisson model needs at least one mark");
    }
    for (const auto& [mark, rate] : rates) check_rate(rate, false);
}

void CtmcSpec::validate() const
{
    check_horizon(horizon);
    const std::size_t n = states.size();
    if (n == 0) {
        throw std::invalid_argument("ctmc needs at least one state");
    }
    if (generator.size() != n) {
        throw std::invalid_argument("generator must be square with one row per state");
    }
    if (initial >= n) {
        throw std::invalid_argument("initial state out of range");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (generator[i].size() != n) {
            throw std::invalid_argument("generator must be square with one row per state");
        }
        double row = 0.0;
        double scale = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double q = generator[i][j];
            if (!std::isfinite(q) || (i != j && q < 0.0)) {
                throw std::invalid_argument("generator off-diagonal entries must be finite and nonnegative");
            }
            row += q;
            scale = std::max(scale, std::abs(q));
        }
        if (std::abs(row) > 1e-12 * scale) {
            throw std::invalid_argument("generator row " + std::to_string(i) + " does not sum to 0");
        }
    }
    if (!mark_map.empty()) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const bool positive = i != j && generator[i][j] > 0.0;
                const bool mapped = mark_map.count({i, j}) > 0;
                if (positive != mapped) {
                    throw std::invalid_argument("mark_map must cover exactly the positive-rate transitions");
                }
            }
        }
    }
}

CtmcSpec CtmcSpec::birth_chain(double rate, std::size_t levels, double horizon)
{
    check_rate(rate, false);
    CtmcSpec spec;
    spec.horizon = horizon;
    spec.initial = 0;
    const std::size_t n = levels + 1;
    spec.generator.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        spec.states.push_back(std::to_string(i));
        if (i + 1 < n) {
            spec.generator[i][i] = -rate;
            spec.generator[i][i + 1] = rate;
        }
    }
    return spec;
}

void GridBernoulliSpec::validate() const
{
    check_horizon(horizon);
    if (grid.empty()) {
        throw std::invalid_argument("grid model needs at least one grid time");
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] > 0.0 && grid[k] <= horizon)) {
            throw std::invalid_argument("grid times must lie in (0, horizon]");
        }
        if (k > 0 && !(grid[k - 1] < grid[k])) {
            throw std::invalid_argument("grid times must be strictly increasing");
        }
    }
    if (probs.empty()) {
        throw std::invalid_argument("grid model needs at least one mark");
    }
    std::vector<double> total(grid.size(), 0.0);
    for (const auto& [mark, p] : probs) {
        if (p.size() != grid.size()) {
            throw std::invalid_argument("mark '" + mark + "' needs one probability per grid time");
        }
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (!(p[k] >= 0.0 && p[k] <= 1.0)) {
                throw std::invalid_argument("probabilities must lie in [0, 1]");
            }
            total[k] += p[k];
        }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (total[k] > 1.0 + kAtomMassSlack) {
            throw std::invalid_argument("firing probabilities at grid time " + std::to_string(grid[k]) + " exceed 1");
        }
    }
}

void CommonShockSpec::validate() const
{
    check_horizon(horizon);
    if (components.size() < 2) {
        throw std::invalid_argument("common-shock model needs at least two components");
    }
    for (const auto& c : components) {
        if (c.empty()) {
            throw std::invalid_argument("every component needs at least one mark");
        }
        for (const auto& [mark, rate] : c) check_rate(rate, true);
    }
    check_rate(shock_rate, true);
    const auto [a, b] = shock_components;
    if (a == b || a >= components.size() || b >= components.size()) {
        throw std::invalid_argument("shock must hit two distinct existing components");
    }
    if (!components[a].count(shock_marks[0]) || !components[b].count(shock_marks[1])) {
        throw std::invalid_argument("shock marks must belong to the designated components");
    }
}

void ProductSpec::validate() const
{
    if (components.empty()) {
        throw std::invalid_argument("product model needs at least one component");
    }
    double horizon = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const double h = std::visit([](const auto& s) { s.validate(); return s.horizon; }, components[i]);
        if (i > 0 && h != horizon) {
            throw std::invalid_argument("product components must share one horizon");
        }
        horizon = h;
    }
}

double horizon_of(const ModelSpec& spec)
{
    return std::visit(
        [](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, ProductSpec>) {
                if (s.components.empty()) throw std::invalid_argument("empty product model");
                return std::visit([](const auto& leaf) { return leaf.horizon; }, s.components.front());
            } else {
                return s.horizon;
            }
        },
        spec);
}

std::string kind_of(const ModelSpec& spec)
{
    static constexpr const char* names[] = {"poisson", "ctmc", "grid_bernoulli", "common_shock", "product"};
    return names[spec.index()];
}

// ---------------------------------------------------------------- poisson

PoissonModel::PoissonModel(PoissonSpec spec) : spec_(std::move(spec))
{
    spec_.validate();
    space_ = make_flat_space(keys(spec_.rates));
    for (const auto& [mark, rate] : spec_.rates) rates_.push_back(rate);
}

Trajectory PoissonModel::simulate_trajectory(StreamRng& rng) const
{
    std::vector<Event> events;
    for (std::size_t m = 0; m < rates_.size(); ++m) {
        poisson_arrivals(rng, rates_[m], spec_.horizon, MarkId{m}, events);
    }
    sort_by_time(events);
    return Trajectory(space_, std::move(events), spec_.horizon);
}

Realization PoissonModel::simulate(StreamRng& rng) const
{
    return Realization{simulate_trajectory(rng), Compensator::poisson(space_, rates_, spec_.horizon), {}};
}

// ---------------------------------------------------------------- ctmc

CtmcModel::CtmcModel(CtmcSpec spec) : spec_(std::move(spec))
{
    spec_.validate();
    const std::size_t n = spec_.states.size();
    std::vector<std::string> labels;
    outgoing_.resize(n);
    exit_rate_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double q = spec_.generator[i][j];
            if (i == j || q <= 0.0) continue;
            const MarkId mark{transitions_.size()};
            transitions_.push_back({i, j, q, mark});
            outgoing_[i].push_back(mark.index);
            exit_rate_[i] += q;
            labels.push_back(spec_.mark_map.empty() ? spec_.states[i] + "->" + spec_.states[j]
                                                    : spec_.mark_map.at({i, j}));
        }
    }
    if (transitions_.empty()) {
        throw std::invalid_argument("ctmc has no transitions, so its mark space would be empty");
    }
    space_ = make_flat_space(labels);
}

Realization CtmcModel::simulate(StreamRng& rng) const
{
    const double horizon = spec_.horizon;
    std::vector<Event> events;
    // per-mark slope switches
    std::vector<std::vector<CumulativeCurve::Piece>> pieces(transitions_.size(), {{0.0, 0.0}});
    std::size_t state = spec_.initial;
    for (auto idx : outgoing_[state]) pieces[idx].front().slope = transitions_[idx].rate;

    double t = 0.0;
    for (;;) {
        const double exit = exit_rate_[state];
        if (exit == 0.0) break;
        t += rng.exponential(exit);
        if (t > horizon) break;
        double pick = rng.uniform() * exit;
        std::size_t chosen = outgoing_[state].back();
        for (auto idx : outgoing_[state]) {
            if (pick < transitions_[idx].rate) {
                chosen = idx;
                break;
            }
            pick -= transitions_[idx].rate;
        }
        events.push_back({t, transitions_[chosen].mark});
        guard(events.size());
        for (auto idx : outgoing_[state]) pieces[idx].push_back({t, 0.0});
        state = transitions_[chosen].to;
        for (auto idx : outgoing_[state]) pieces[idx].push_back({t, transitions_[idx].rate});
    }

    std::vector<Compensator::MarkPart> parts;
    parts.reserve(pieces.size());
    for (auto& p : pieces) parts.push_back({CumulativeCurve::from_slopes(std::move(p)), {}});
    return Realization{Trajectory(space_, std::move(events), horizon),
                       Compensator(space_, std::move(parts), horizon), {}};
}

std::vector<StateVisit> CtmcModel::state_path(const Trajectory& traj) const
{
    if (!(traj.mark_space() == *space_)) {
        throw std::domain_error("trajectory marks do not belong to this chain");
    }
    std::vector<StateVisit> path{{0.0, spec_.initial}};
    for (const auto& e : traj.events()) {
        const auto& tr = transitions_[e.mark.index];
        if (tr.from != path.back().state) {
            throw std::domain_error("transition " + space_->display(e.mark) + " does not leave the current state");
        }
        path.push_back({e.time, tr.to});
    }
    return path;
}

// ---------------------------------------------------------------- grid

namespace {

Compensator grid_compensator(const GridBernoulliSpec& spec, const MarkSpacePtr& space,
                             const std::vector<std::vector<double>>& probs)
{
    std::vector<Compensator::MarkPart> parts(probs.size());
    for (std::size_t m = 0; m < probs.size(); ++m) {
        for (std::size_t k = 0; k < spec.grid.size(); ++k) {
            // marks that cannot fire at a grid time carry no atom there
            if (probs[m][k] > 0.0) parts[m].atoms.push_back({spec.grid[k], probs[m][k]});
        }
    }
    return Compensator(space, std::move(parts), spec.horizon);
}

std::vector<std::vector<double>> grid_probs(const GridBernoulliSpec& spec)
{
    std::vector<std::vector<double>> out;
    for (const auto& [mark, p] : spec.probs) out.push_back(p);
    return out;
}

std::vector<std::string> grid_marks(const GridBernoulliSpec& spec)
{
    std::vector<std::string> out;
    for (const auto& [mark, p] : spec.probs) out.push_back(mark);
    return out;
}

} // namespace

GridBernoulliModel::GridBernoulliModel(GridBernoulliSpec spec)
    : spec_((spec.validate(), std::move(spec))),
      space_(make_flat_space(grid_marks(spec_))),
      probs_(grid_probs(spec_)),
      compensator_(grid_compensator(spec_, space_, probs_))
{
}

Realization GridBernoulliModel::simulate(StreamRng& rng) const
{
    std::vector<Event> events;
    for (std::size_t k = 0; k < spec_.grid.size(); ++k) {
        const double u = rng.uniform();
        double cumulative = 0.0;
        for (std::size_t m = 0; m < probs_.size(); ++m) {
            cumulative += probs_[m][k];
            if (u < cumulative) {
                events.push_back({spec_.grid[k], MarkId{m}});
                break;
            }
        }
    }
    return Realization{Trajectory(space_, std::move(events), spec_.horizon), compensator_, {}};
}

// ---------------------------------------------------------------- common shock

CommonShockModel::CommonShockModel(CommonShockSpec spec)
    : spec_((spec.validate(), std::move(spec))), merged_compensator_(Compensator::zero(make_flat_space({"x"}), 1.0))
{
    for (const auto& c : spec_.components) {
        component_spaces_.push_back(make_flat_space(keys(c)));
        std::vector<double> r;
        for (const auto& [mark, rate] : c) r.push_back(rate);
        rates_.push_back(std::move(r));
    }
    merged_space_ = merged_mark_space(component_spaces_);

    std::vector<Compensator::MarkPart> parts(merged_space_->size());
    const std::size_t d = component_spaces_.size();
    std::vector<std::size_t> digits(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t m = 0; m < rates_[i].size(); ++m) {
            std::fill(digits.begin(), digits.end(), 0);
            digits[i] = m + 1;
            parts[merged_mark_id(component_spaces_, digits).index].continuous =
                CumulativeCurve::from_slopes({{0.0, rates_[i][m]}});
        }
    }
    std::fill(digits.begin(), digits.end(), 0);
    const auto [a, b] = spec_.shock_components;
    digits[a] = component_spaces_[a]->id(spec_.shock_marks[0]).index + 1;
    digits[b] = component_spaces_[b]->id(spec_.shock_marks[1]).index + 1;
    shock_mark_ = merged_mark_id(component_spaces_, digits);
    parts[shock_mark_.index].continuous = CumulativeCurve::from_slopes({{0.0, spec_.shock_rate}});
    merged_compensator_ = Compensator(merged_space_, std::move(parts), spec_.horizon);
}

std::vector<Trajectory> CommonShockModel::simulate_components(StreamRng& rng) const
{
    const std::size_t d = component_spaces_.size();
    std::vector<std::vector<Event>> events(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t m = 0; m < rates_[i].size(); ++m) {
            poisson_arrivals(rng, rates_[i][m], spec_.horizon, MarkId{m}, events[i]);
        }
    }
    std::vector<Event> shocks;
    poisson_arrivals(rng, spec_.shock_rate, spec_.horizon, MarkId{0}, shocks);
    const auto [a, b] = spec_.shock_components;
    const MarkId mark_a = component_spaces_[a]->id(spec_.shock_marks[0]);
    const MarkId mark_b = component_spaces_[b]->id(spec_.shock_marks[1]);
    for (const auto& s : shocks) {
        // identical doubles in both components
        events[a].push_back({s.time, mark_a});
        events[b].push_back({s.time, mark_b});
    }
    std::vector<Trajectory> out;
    out.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
        sort_by_time(events[i]);
        out.emplace_back(component_spaces_[i], std::move(events[i]), spec_.horizon);
    }
    return out;
}

Realization CommonShockModel::simulate(StreamRng& rng) const
{
    auto components = simulate_components(rng);
    auto merged = merge(components, merged_space_);
    return Realization{std::move(merged.trajectory), merged_compensator_, std::move(components)};
}

// ---------------------------------------------------------------- type-erased model

Model::Model(ModelSpec spec) : spec_(std::move(spec))
{
    horizon_ = horizon_of(spec_);
    auto make_leaf = [](const LeafSpec& leaf) -> Leaf {
        return std::visit([](const auto& s) -> Leaf {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PoissonSpec>) return PoissonModel(s);
            else if constexpr (std::is_same_v<T, CtmcSpec>) return CtmcModel(s);
            else return GridBernoulliModel(s);
        }, leaf);
    };
    auto leaf_space = [](const Leaf& leaf) { return std::visit([](const auto& m) { return m.mark_space(); }, leaf); };
    auto leaf_firing = [](const Leaf& leaf) {
        std::vector<std::vector<double>> times;
        if (const auto* grid = std::get_if<GridBernoulliModel>(&leaf)) {
            // support from the firing law itself, not from the compensator
            const auto& spec = grid->spec();
            for (const auto& [mark, p] : spec.probs) {
                std::vector<double> t;
                for (std::size_t k = 0; k < spec.grid.size(); ++k) {
                    if (p[k] > 0.0) t.push_back(spec.grid[k]);
                }
                times.push_back(std::move(t));
            }
        } else {
            times.resize(std::visit([](const auto& m) { return m.mark_space()->size(); }, leaf));
        }
        return times;
    };

    if (const auto* product = std::get_if<ProductSpec>(&spec_)) {
        product->validate();
        for (const auto& c : product->components) {
            leaves_.push_back(make_leaf(c));
            component_spaces_.push_back(leaf_space(leaves_.back()));
        }
        space_ = merged_mark_space(component_spaces_);
        firing_times_.resize(space_->size());
        std::map<double, std::size_t> owner;
        std::vector<std::size_t> digits(leaves_.size(), 0);
        for (std::size_t i = 0; i < leaves_.size(); ++i) {
            const auto times = leaf_firing(leaves_[i]);
            for (std::size_t m = 0; m < times.size(); ++m) {
                for (double t : times[m]) {
                    auto [it, inserted] = owner.emplace(t, i);
                    if (!inserted && it->second != i) {
                        throw std::invalid_argument("product components share a deterministic firing time; "
                                                    "they cannot be declared independent");
                    }
                }
                std::fill(digits.begin(), digits.end(), 0);
                digits[i] = m + 1;
                firing_times_[merged_mark_id(component_spaces_, digits).index] = times[m];
            }
        }
    } else if (const auto* shock = std::get_if<CommonShockSpec>(&spec_)) {
        shock_ = std::make_unique<CommonShockModel>(*shock);
        component_spaces_.assign(shock_->component_spaces().begin(), shock_->component_spaces().end());
        space_ = shock_->mark_space();
        firing_times_.resize(space_->size());
    } else {
        leaves_.push_back(std::visit(
            [&](const auto& s) -> Leaf {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PoissonSpec> || std::is_same_v<T, CtmcSpec> ||
                              std::is_same_v<T, GridBernoulliSpec>) {
                    return make_leaf(LeafSpec(s));
                } else {
                    throw std::logic_error("unreachable");
                }
            },
            spec_));
        space_ = leaf_space(leaves_.front());
        firing_times_ = leaf_firing(leaves_.front());
    }
}

Realization Model::simulate(StreamRng& rng) const
{
    if (shock_) {
        return shock_->simulate(rng);
    }
    if (!is_merged()) {
        return std::visit([&](const auto& m) { return m.simulate(rng); }, leaves_.front());
    }
    std::vector<Trajectory> trajs;
    std::vector<Compensator> comps;
    trajs.reserve(leaves_.size());
    comps.reserve(leaves_.size());
    for (const auto& leaf : leaves_) {
        auto r = std::visit([&](const auto& m) { return m.simulate(rng); }, leaf);
        trajs.push_back(std::move(r.trajectory));
        comps.push_back(std::move(r.compensator));
    }
    auto merged = merge(trajs, space_);
    auto comp = merged_compensator(comps, true, nullptr, space_);
    return Realization{std::move(merged.trajectory), std::move(comp), std::move(trajs)};
}

const CtmcModel* Model::ctmc() const noexcept
{
    if (is_merged() || leaves_.empty()) return nullptr;
    return std::get_if<CtmcModel>(&leaves_.front());
}

// ---------------------------------------------------------------- one-shot simulators

std::pair<Trajectory, Compensator> simulate_poisson(const PoissonSpec& spec, std::uint64_t seed)
{
    StreamRng rng(seed, 0);
    auto r = PoissonModel(spec).simulate(rng);
    return {std::move(r.trajectory), std::move(r.compensator)};
}

std::pair<Trajectory, Compensator> simulate_ctmc(const CtmcSpec& spec, std::uint64_t seed)
{
    StreamRng rng(seed, 0);
    auto r = CtmcModel(spec).simulate(rng);
    return {std::move(r.trajectory), std::move(r.compensator)};
}

std::pair<Trajectory, Compensator> simulate_grid_bernoulli(const GridBernoulliSpec& spec, std::uint64_t seed)
{
    StreamRng rng(seed, 0);
    auto r = GridBernoulliModel(spec).simulate(rng);
    return {std::move(r.trajectory), std::move(r.compensator)};
}

std::vector<Trajectory> simulate_common_shock(const CommonShockSpec& spec, std::uint64_t seed)
{
    StreamRng rng(seed, 0);
    return CommonShockModel(spec).simulate_components(rng);
}

} // namespace mpplab
