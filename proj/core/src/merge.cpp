#include "mpplab/merge.hpp"

#include "mpplab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>
#include <stdexcept>

namespace mpplab {

namespace {

std::vector<std::size_t> radices(std::span<const MarkSpacePtr> components)
{
    std::vector<std::size_t> r;
    r.reserve(components.size());
    for (const auto& c : components) {
        if (!c || c->arity() != 1) {
            throw std::invalid_argument("merge components must have flat mark spaces");
        }
        r.push_back(c->size() + 1);
    }
    return r;
}

std::vector<MarkSpacePtr> spaces_of(std::span<const Trajectory> trajs)
{
    std::vector<MarkSpacePtr> out;
    out.reserve(trajs.size());
    for (const auto& t : trajs) out.push_back(t.mark_space_ptr());
    return out;
}

double parse_number(const std::string& s)
{
    if (s == kZeroSymbol) {
        return 0.0;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw UnsupportedPayload("mark '" + s + "' is not numeric");
    }
    return v;
}

} // namespace

MarkSpacePtr merged_mark_space(std::span<const MarkSpacePtr> components)
{
    if (components.empty()) {
        throw std::invalid_argument("merge needs at least one component");
    }
    const auto r = radices(components);
    std::size_t total = 1;
    for (auto x : r) {
        if (total > std::numeric_limits<std::size_t>::max() / x || total * x > 10'000'000) {
            throw std::length_error("merged mark space too large");
        }
        total *= x;
    }
    std::vector<MarkLabel> labels;
    labels.reserve(total - 1);
    std::vector<std::size_t> digits(r.size(), 0);
    for (std::size_t n = 1; n < total; ++n) {
        // increment the mixed-radix counter, last slot least significant
        for (std::size_t i = r.size(); i-- > 0;) {
            if (++digits[i] < r[i]) break;
            digits[i] = 0;
        }
        MarkLabel label;
        label.reserve(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            label.push_back(digits[i] == 0 ? std::string(kZeroSymbol) : components[i]->label(MarkId{digits[i] - 1}).front());
        }
        labels.push_back(std::move(label));
    }
    return std::make_shared<const MarkSpace>(std::move(labels));
}

MarkId merged_mark_id(std::span<const MarkSpacePtr> components, std::span<const std::size_t> digits)
{
    const auto r = radices(components);
    if (digits.size() != r.size()) {
        throw std::invalid_argument("one digit per component required");
    }
    std::size_t index = 0;
    bool any = false;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (digits[i] >= r[i]) {
            throw std::domain_error("digit outside component mark space");
        }
        any = any || digits[i] != 0;
        index = index * r[i] + digits[i];
    }
    if (!any) {
        throw std::domain_error("the all-zero tuple is not a merged mark");
    }
    return MarkId{index - 1};
}

MergedTrajectory merge(std::span<const Trajectory> trajs, MarkSpacePtr merged_space)
{
    if (trajs.empty()) {
        throw std::invalid_argument("merge needs at least one trajectory");
    }
    const double horizon = trajs.front().horizon();
    for (const auto& t : trajs) {
        if (t.horizon() != horizon) {
            throw std::invalid_argument("merge: component horizons differ");
        }
        const auto ev = t.events();
        for (std::size_t n = 1; n < ev.size(); ++n) {
            if (!(ev[n - 1].time < ev[n].time)) {
                throw std::invalid_argument("merge: duplicate times within a component");
            }
        }
    }
    auto components = spaces_of(trajs);
    const auto r = radices(components);
    if (!merged_space) {
        merged_space = merged_mark_space(components);
    } else {
        std::size_t total = 1;
        for (auto x : r) total *= x;
        if (merged_space->size() != total - 1 || merged_space->arity() != trajs.size()) {
            throw std::invalid_argument("merge: supplied merged space does not match the components");
        }
    }

    const std::size_t d = trajs.size();
    std::vector<std::size_t> cursor(d, 0);
    std::size_t total_events = 0;
    for (const auto& t : trajs) total_events += t.size();
    std::vector<Event> events;
    events.reserve(total_events);
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (;;) {
        double next = kInf;
        for (std::size_t i = 0; i < d; ++i) {
            const auto ev = trajs[i].events();
            if (cursor[i] < ev.size()) next = std::min(next, ev[cursor[i]].time);
        }
        if (next == kInf) break;
        std::size_t index = 0;
        for (std::size_t i = 0; i < d; ++i) {
            const auto ev = trajs[i].events();
            std::size_t digit = 0;
            if (cursor[i] < ev.size() && ev[cursor[i]].time == next) {
                digit = ev[cursor[i]].mark.index + 1;
                ++cursor[i];
            }
            index = index * r[i] + digit;
        }
        events.push_back({next, MarkId{index - 1}});
    }
    return MergedTrajectory{Trajectory(std::move(merged_space), std::move(events), horizon), std::move(components)};
}

Trajectory project(const MergedTrajectory& merged, std::size_t i)
{
    if (i >= merged.component_count()) {
        throw std::out_of_range("component index out of range");
    }
    const auto& space = merged.trajectory.mark_space();
    const auto& comp = merged.components[i];
    std::vector<Event> events;
    for (const auto& e : merged.trajectory.events()) {
        const auto& coord = space.label(e.mark)[i];
        if (coord != kZeroSymbol) {
            events.push_back({e.time, comp->id(coord)});
        }
    }
    return Trajectory(comp, std::move(events), merged.trajectory.horizon());
}

std::vector<MarkId> cylinder(const MergedTrajectory& merged, std::size_t i, std::span<const MarkId> marks)
{
    if (i >= merged.component_count()) {
        throw std::out_of_range("component index out of range");
    }
    const auto& comp = *merged.components[i];
    require_marks(comp, marks);
    std::vector<char> wanted(comp.size(), 0);
    for (auto m : marks) wanted[m.index] = 1;
    const auto& space = merged.trajectory.mark_space();
    std::vector<MarkId> out;
    for (std::size_t n = 0; n < space.size(); ++n) {
        const auto& coord = space.label(MarkId{n})[i];
        if (coord == kZeroSymbol) continue;
        if (wanted[comp.id(coord).index]) out.push_back(MarkId{n});
    }
    return out;
}

std::vector<MarkId> cylinder(const MergedTrajectory& merged, std::size_t i, std::span<const std::string> labels)
{
    if (i >= merged.component_count()) {
        throw std::out_of_range("component index out of range");
    }
    std::vector<MarkId> ids;
    for (const auto& l : labels) {
        if (l == kZeroSymbol) {
            throw std::domain_error("cylinder sets cannot contain the zero symbol");
        }
        ids.push_back(merged.components[i]->id(l));
    }
    return cylinder(merged, i, std::span<const MarkId>(ids));
}

IndistinguishabilityReport merged_semimartingale_check(const MergedTrajectory& merged,
                                                       std::span<const Trajectory> trajs,
                                                       std::span<const double> grid)
{
    const std::size_t d = merged.component_count();
    if (trajs.size() != d) {
        throw std::invalid_argument("one trajectory per merged component required");
    }
    const auto& space = merged.trajectory.mark_space();
    std::vector<std::vector<double>> merged_values(space.size(), std::vector<double>(d));
    for (std::size_t n = 0; n < space.size(); ++n) {
        for (std::size_t i = 0; i < d; ++i) {
            merged_values[n][i] = parse_number(space.label(MarkId{n})[i]);
        }
    }

    std::vector<double> sorted_grid(grid.begin(), grid.end());
    std::sort(sorted_grid.begin(), sorted_grid.end());

    IndistinguishabilityReport report;
    for (std::size_t i = 0; i < d; ++i) {
        const auto& comp_space = trajs[i].mark_space();
        std::vector<double> comp_values(comp_space.size());
        for (std::size_t m = 0; m < comp_space.size(); ++m) {
            comp_values[m] = parse_number(comp_space.label(MarkId{m}).front());
        }
        const auto merged_events = merged.trajectory.events();
        const auto comp_events = trajs[i].events();
        std::size_t a = 0, b = 0;
        double v = 0.0, x = 0.0;
        for (double t : sorted_grid) {
            while (a < merged_events.size() && merged_events[a].time <= t) {
                v += merged_values[merged_events[a].mark.index][i];
                ++a;
            }
            while (b < comp_events.size() && comp_events[b].time <= t) {
                x += comp_values[comp_events[b].mark.index];
                ++b;
            }
            ++report.comparisons;
            if (v != x) {
                ++report.mismatches;
                report.max_abs_difference = std::max(report.max_abs_difference, std::abs(v - x));
            }
        }
    }
    report.pass = report.mismatches == 0;
    return report;
}

Compensator merged_compensator(std::span<const Compensator> comps, bool independent,
                               const Compensator* model_supplied, MarkSpacePtr merged_space)
{
    if (!independent) {
        if (!model_supplied) {
            throw std::invalid_argument("merged_compensator: dependent components need a model-supplied compensator");
        }
        return *model_supplied;
    }
    if (comps.empty()) {
        throw std::invalid_argument("merged_compensator: no components");
    }
    std::vector<MarkSpacePtr> spaces;
    for (const auto& c : comps) {
        if (c.horizon() != comps.front().horizon()) {
            throw std::invalid_argument("merged_compensator: component horizons differ");
        }
        spaces.push_back(c.mark_space_ptr());
    }
    std::vector<std::pair<double, std::size_t>> atom_owner;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        for (const auto& part : comps[i].parts()) {
            for (const auto& a : part.atoms) atom_owner.emplace_back(a.time, i);
        }
    }
    std::sort(atom_owner.begin(), atom_owner.end());
    for (std::size_t n = 1; n < atom_owner.size(); ++n) {
        if (atom_owner[n].first == atom_owner[n - 1].first && atom_owner[n].second != atom_owner[n - 1].second) {
            throw std::invalid_argument("merged_compensator: components share a predictable atom at t=" +
                                        std::to_string(atom_owner[n].first) + "; independence cannot be assumed");
        }
    }
    if (!merged_space) {
        merged_space = merged_mark_space(spaces);
    }
    // single-coordinate marks: digit m + 1 in slot i, zeros elsewhere
    const auto r = radices(spaces);
    std::vector<Compensator::MarkPart> parts(merged_space->size());
    std::size_t stride = 1;
    for (std::size_t i = comps.size(); i-- > 0;) {
        for (std::size_t m = 0; m < spaces[i]->size(); ++m) parts[(m + 1) * stride - 1] = comps[i].parts()[m];
        stride *= r[i];
    }
    return Compensator(std::move(merged_space), std::move(parts), comps.front().horizon());
}

} // namespace mpplab
