#include "mpplab/representation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mpplab {

ValueFunction::ValueFunction(std::size_t states, double terminal_time, std::size_t intervals)
    : states_(states), terminal_time_(terminal_time), intervals_(intervals), values_((intervals + 1) * states, 0.0)
{
    if (!(terminal_time_ > 0.0) || !std::isfinite(terminal_time_)) {
        throw std::invalid_argument("terminal time must be positive and finite");
    }
    if (intervals_ < kMinIntervals) {
        throw std::invalid_argument("value-function grid needs at least " + std::to_string(kMinIntervals) + " intervals");
    }
    if (states_ == 0) {
        throw std::invalid_argument("value function needs at least one state");
    }
}

double ValueFunction::node(std::size_t k) const noexcept
{
    return k == intervals_ ? terminal_time_ : terminal_time_ * static_cast<double>(k) / static_cast<double>(intervals_);
}

std::size_t ValueFunction::cell(double t) const
{
    if (!(t >= 0.0 && t <= terminal_time_)) {
        throw std::out_of_range("time " + std::to_string(t) + " outside [0, T]");
    }
    auto k = static_cast<std::size_t>(std::floor(t / terminal_time_ * static_cast<double>(intervals_)));
    k = std::min(k, intervals_ - 1);
    while (k > 0 && t < node(k)) --k;
    while (k + 1 < intervals_ && t >= node(k + 1)) ++k;
    return k;
}

double ValueFunction::operator()(double t, std::size_t state) const
{
    if (state >= states_) {
        throw std::domain_error("state index out of range");
    }
    const std::size_t k = cell(t);
    const double t0 = node(k);
    const double t1 = node(k + 1);
    if (t == t1) return at_node(k + 1, state);
    const double v0 = at_node(k, state);
    const double v1 = at_node(k + 1, state);
    return v0 + (v1 - v0) * ((t - t0) / (t1 - t0));
}

ValueFunction ValueFunction::solve(const CtmcSpec& spec, std::span<const double> payoff, double terminal_time,
                                   std::size_t intervals)
{
    spec.validate();
    const std::size_t n = spec.states.size();
    if (payoff.size() != n) {
        throw std::invalid_argument("payoff needs one value per state");
    }
    if (terminal_time > spec.horizon) {
        throw std::invalid_argument("terminal time exceeds the model horizon");
    }
    for (double f : payoff) {
        if (!std::isfinite(f)) throw std::invalid_argument("payoff values must be finite");
    }
    ValueFunction u(n, terminal_time, intervals);
    for (std::size_t s = 0; s < n; ++s) u.values_[intervals * n + s] = payoff[s];

    double uniform_rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) uniform_rate = std::max(uniform_rate, -spec.generator[i][i]);
    if (uniform_rate == 0.0) {
        for (std::size_t k = 0; k < intervals; ++k) {
            std::copy(payoff.begin(), payoff.end(), u.values_.begin() + static_cast<std::ptrdiff_t>(k * n));
        }
        return u;
    }

    // Sparse rows of P = I + Q / uniform_rate.
    std::vector<std::vector<std::pair<std::size_t, double>>> p_rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double p = (i == j ? 1.0 : 0.0) + spec.generator[i][j] / uniform_rate;
            if (p != 0.0) p_rows[i].emplace_back(j, p);
        }
    }
    const double step_tolerance = kTruncationTolerance / static_cast<double>(intervals);

    std::vector<double> term(n), next(n), acc(n);
    for (std::size_t k = intervals; k-- > 0;) {
        const double x = uniform_rate * (u.node(k + 1) - u.node(k));
        const double* v = &u.values_[(k + 1) * n];
        std::copy(v, v + n, term.begin());
        double weight = std::exp(-x);
        for (std::size_t s = 0; s < n; ++s) acc[s] = weight * term[s];
        for (std::size_t m = 1;; ++m) {
            for (std::size_t i = 0; i < n; ++i) {
                double sum = 0.0;
                for (const auto& [j, p] : p_rows[i]) sum += p * term[j];
                next[i] = sum;
            }
            term.swap(next);
            weight *= x / static_cast<double>(m);
            for (std::size_t s = 0; s < n; ++s) acc[s] += weight * term[s];
            // tail <= w_{m+1} / (1 - x / (m + 2)) <= 2 w_{m+1} once m + 2 >= 2x
            const double next_weight = weight * x / static_cast<double>(m + 1);
            if (static_cast<double>(m + 2) >= 2.0 * x && 2.0 * next_weight <= step_tolerance) break;
        }
        std::copy(acc.begin(), acc.end(), u.values_.begin() + static_cast<std::ptrdiff_t>(k * n));
    }
    return u;
}

ValueFunction ValueFunction::tabulate(std::size_t states, double terminal_time, std::size_t intervals,
                                      const std::function<double(double, std::size_t)>& closed_form)
{
    ValueFunction u(states, terminal_time, intervals);
    for (std::size_t k = 0; k <= intervals; ++k) {
        for (std::size_t s = 0; s < states; ++s) u.values_[k * states + s] = closed_form(u.node(k), s);
    }
    return u;
}

std::vector<double> parse_payoff(const std::string& description, const CtmcSpec& spec)
{
    const std::size_t n = spec.states.size();
    auto to_number = [](const std::string& s) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size()) {
            throw std::invalid_argument("payoff: '" + s + "' is not a number");
        }
        return v;
    };
    const auto colon = description.find(':');
    const std::string kind = description.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : description.substr(colon + 1);
    if (kind == "const") {
        return std::vector<double>(n, to_number(arg));
    }
    if (kind == "indicator") {
        auto it = std::find(spec.states.begin(), spec.states.end(), arg);
        if (it == spec.states.end()) throw std::invalid_argument("payoff: unknown state '" + arg + "'");
        std::vector<double> f(n, 0.0);
        f[static_cast<std::size_t>(it - spec.states.begin())] = 1.0;
        return f;
    }
    if (kind == "linear") {
        std::vector<double> f;
        for (const auto& s : spec.states) f.push_back(to_number(s));
        return f;
    }
    if (kind == "values") {
        std::vector<double> f;
        std::size_t pos = 0;
        while (pos <= arg.size()) {
            const auto comma = arg.find(',', pos);
            f.push_back(to_number(arg.substr(pos, comma - pos)));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (f.size() != n) throw std::invalid_argument("payoff: need one value per state");
        return f;
    }
    throw std::invalid_argument("payoff: unknown description '" + description + "'");
}

namespace {

void check_terminal(const ValueFunction& u, const Trajectory& traj)
{
    if (u.terminal_time() > traj.horizon()) {
        throw std::out_of_range("terminal time beyond the trajectory horizon");
    }
}

} // namespace

Integrand integrand_from_value(const ValueFunction& u, const CtmcModel& model, const Trajectory& traj)
{
    check_terminal(u, traj);
    if (u.state_count() != model.state_count()) {
        throw std::invalid_argument("value function and chain have different state counts");
    }
    const auto path = model.state_path(traj);
    const double T = u.terminal_time();
    const auto transitions = model.transitions();
    std::vector<std::vector<IntegrandCell>> cells(transitions.size());

    auto diff_at = [&](const CtmcModel::Transition& tr, double t) { return u(t, tr.to) - u(t, tr.from); };
    auto cell_slope = [&](const CtmcModel::Transition& tr, std::size_t k) {
        const double d0 = u.at_node(k, tr.to) - u.at_node(k, tr.from);
        const double d1 = u.at_node(k + 1, tr.to) - u.at_node(k + 1, tr.from);
        return (d1 - d0) / (u.node(k + 1) - u.node(k));
    };

    for (std::size_t v = 0; v < path.size(); ++v) {
        const double a = path[v].start;
        if (a >= T) break;
        const double b = v + 1 < path.size() ? std::min(path[v + 1].start, T) : T;
        const std::size_t state = path[v].state;
        for (const auto& tr : transitions) {
            if (tr.from != state) continue;
            auto& c = cells[tr.mark.index];
            // on (a, b] the pre-jump state is `state`
            std::size_t k = u.cell(a);
            c.push_back({a, diff_at(tr, a), cell_slope(tr, k)});
            for (++k; k < u.intervals() && u.node(k) < b; ++k) {
                const double t = u.node(k);
                c.push_back({t, u.at_node(k, tr.to) - u.at_node(k, tr.from), cell_slope(tr, k)});
            }
            c.push_back({b, 0.0, 0.0});
        }
    }

    Integrand w;
    w.reserve(cells.size());
    for (auto& c : cells) {
        if (c.empty() || c.front().start != 0.0) c.insert(c.begin(), IntegrandCell{0.0, 0.0, 0.0});
        // a zero cell ending exactly where the next sojourn starts is superseded
        std::vector<IntegrandCell> merged;
        for (const auto& cell : c) {
            if (!merged.empty() && merged.back().start == cell.start) merged.back() = cell;
            else merged.push_back(cell);
        }
        w.emplace_back(std::move(merged));
    }
    return w;
}

PiecewisePath target_martingale(const ValueFunction& u, const CtmcModel& model, const Trajectory& traj)
{
    check_terminal(u, traj);
    const auto path = model.state_path(traj);
    const double T = u.terminal_time();
    std::vector<DriftPiece> drift;
    std::vector<Jump> jumps;
    for (std::size_t v = 0; v < path.size(); ++v) {
        const double a = path[v].start;
        if (a > T) break;
        const std::size_t s = path[v].state;
        if (v > 0) {
            const std::size_t prev = path[v - 1].state;
            jumps.push_back({a, u(a, s) - u(a, prev)});
        }
        if (a == T) break;
        const double b = v + 1 < path.size() ? std::min(path[v + 1].start, T) : T;
        auto slope = [&](std::size_t k) {
            return (u.at_node(k + 1, s) - u.at_node(k, s)) / (u.node(k + 1) - u.node(k));
        };
        std::size_t k = u.cell(a);
        if (!drift.empty() && drift.back().start == a) drift.pop_back();
        drift.push_back(DriftPiece{a, {slope(k), 0.0, 0.0, 0.0}});
        for (++k; k < u.intervals() && u.node(k) < b; ++k) {
            drift.push_back(DriftPiece{u.node(k), {slope(k), 0.0, 0.0, 0.0}});
        }
    }
    return PiecewisePath(u(0.0, model.spec().initial), std::move(drift), std::move(jumps), T);
}

double representation_residual(const PiecewisePath& z, const Integrand& w, std::span<const PiecewisePath> m,
                               std::span<const double> checkpoints)
{
    if (w.size() != m.size()) {
        throw std::domain_error("integrand and martingale families cover different marks");
    }
    std::vector<PiecewisePath> integrals;
    for (std::size_t h = 0; h < w.size(); ++h) {
        if (w[h].is_zero() || m[h].is_identically_zero()) continue;
        integrals.push_back(stochastic_integral(w[h], m[h]));
    }
    const double z0 = z.initial();
    double worst = 0.0;
    for (double t : checkpoints) {
        double represented = 0.0;
        for (const auto& integral : integrals) represented += integral.value(t);
        worst = std::max(worst, std::abs(z.value(t) - z0 - represented));
    }
    return worst;
}

std::vector<double> representation_checkpoints(const Trajectory& traj, double terminal_time, double step,
                                               std::size_t uniform_count)
{
    std::vector<double> points;
    for (std::size_t k = 0; k < uniform_count; ++k) {
        points.push_back(uniform_count == 1 ? terminal_time
                                            : terminal_time * static_cast<double>(k) / static_cast<double>(uniform_count - 1));
    }
    for (const auto& e : traj.events()) {
        if (e.time > terminal_time) break;
        points.push_back(e.time);
        points.push_back(std::max(0.0, e.time - step));
        points.push_back(std::min(terminal_time, e.time + step));
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

RepresentationPathReport verify_representation_path(const ValueFunction& u, const CtmcModel& model,
                                                    const Realization& path, std::size_t uniform_checkpoints)
{
    const auto& traj = path.trajectory;
    const auto z = target_martingale(u, model, traj);
    const auto w = integrand_from_value(u, model, traj);
    std::vector<PiecewisePath> m;
    m.reserve(w.size());
    for (std::size_t h = 0; h < w.size(); ++h) {
        m.push_back(compensated_martingale(traj, path.compensator, MarkId{h}));
    }
    const double T = u.terminal_time();
    const auto checkpoints = representation_checkpoints(traj, T, T / static_cast<double>(u.intervals()), uniform_checkpoints);

    RepresentationPathReport report;
    report.checkpoints = checkpoints.size();
    report.residual = representation_residual(z, w, m, checkpoints);

    std::map<double, double> integral_jumps;
    for (std::size_t h = 0; h < w.size(); ++h) {
        if (w[h].is_zero()) continue;
        const auto integral = stochastic_integral(w[h], m[h]);
        for (const auto& j : integral.jumps()) {
            if (j.time <= T) integral_jumps[j.time] += j.size;
        }
    }
    for (const auto& j : z.jumps()) integral_jumps.try_emplace(j.time, 0.0);
    for (const auto& [t, represented] : integral_jumps) {
        const double gap = std::abs(z.jump_at(t) - represented);
        const bool at_event = std::any_of(traj.events().begin(), traj.events().end(),
                                          [t](const Event& e) { return e.time == t; });
        if (at_event) report.jump_mismatch = std::max(report.jump_mismatch, gap);
        else report.off_event_jump = std::max(report.off_event_jump, gap);
    }
    return report;
}

} // namespace mpplab
