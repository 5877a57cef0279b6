#include "mpplab/compensator.hpp"

#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace mpplab {

CumulativeCurve::CumulativeCurve() = default;

bool operator==(const CumulativeCurve& a, const CumulativeCurve& b)
{
    return std::ranges::equal(a.starts(), b.starts()) && std::ranges::equal(a.values(), b.values()) &&
           std::ranges::equal(a.slopes(), b.slopes());
}

CumulativeCurve CumulativeCurve::from_breakpoints(std::span<const std::pair<double, double>> points)
{
    if (points.empty() || points.front().first != 0.0 || points.front().second != 0.0) {
        throw std::invalid_argument("compensator breakpoints must start at (0, 0)");
    }
    CumulativeCurve curve;
    curve.starts_.clear();
    curve.values_.clear();
    curve.slopes_.clear();
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto [t, c] = points[k];
        if (!std::isfinite(t) || !std::isfinite(c)) {
            throw std::invalid_argument("compensator breakpoints must be finite");
        }
        if (k > 0) {
            const auto [t0, c0] = points[k - 1];
            if (!(t0 < t)) {
                throw std::invalid_argument("compensator breakpoint times must be strictly increasing");
            }
            if (c < c0) {
                throw std::invalid_argument("compensator must be nondecreasing");
            }
            curve.slopes_.push_back((c - c0) / (t - t0));
        }
        curve.starts_.push_back(t);
        curve.values_.push_back(c);
    }
    curve.slopes_.push_back(0.0);
    return curve;
}

CumulativeCurve CumulativeCurve::from_slopes(std::vector<Piece> pieces)
{
    if (pieces.empty() || pieces.front().start != 0.0) {
        throw std::invalid_argument("compensator slope pieces must start at 0");
    }
    CumulativeCurve curve;
    curve.starts_.clear();
    curve.values_.clear();
    curve.slopes_.clear();
    detail::CompensatedSum acc;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const auto& p = pieces[k];
        if (!(p.slope >= 0.0) || !std::isfinite(p.slope) || !std::isfinite(p.start)) {
            throw std::invalid_argument("compensator slopes must be finite and nonnegative");
        }
        if (k > 0) {
            if (!(pieces[k - 1].start < p.start)) {
                throw std::invalid_argument("compensator slope starts must be strictly increasing");
            }
            acc.add(pieces[k - 1].slope * (p.start - pieces[k - 1].start));
        }
        curve.starts_.push_back(p.start);
        curve.values_.push_back(acc.value());
        curve.slopes_.push_back(p.slope);
    }
    return curve;
}

double CumulativeCurve::operator()(double s) const
{
    if (starts_.empty()) return 0.0;
    auto it = std::upper_bound(starts_.begin(), starts_.end(), s);
    const auto k = static_cast<std::size_t>(it - starts_.begin()) - 1;
    return values_[k] + slopes_[k] * (s - starts_[k]);
}

Compensator::Compensator(MarkSpacePtr space, std::vector<MarkPart> parts, double horizon)
    : space_(std::move(space)), parts_(std::move(parts)), horizon_(horizon)
{
    if (!space_) {
        throw std::invalid_argument("compensator requires a mark space");
    }
    if (!std::isfinite(horizon_) || horizon_ <= 0.0) {
        throw std::invalid_argument("compensator horizon must be positive and finite");
    }
    if (parts_.size() != space_->size()) {
        throw std::invalid_argument("compensator needs exactly one part per mark");
    }
    std::map<double, double> mass_at;
    for (const auto& part : parts_) {
        for (std::size_t k = 0; k < part.atoms.size(); ++k) {
            const auto& a = part.atoms[k];
            if (!(a.time > 0.0 && a.time <= horizon_)) {
                throw std::invalid_argument("atom time " + std::to_string(a.time) + " outside (0, horizon]");
            }
            if (!(a.mass >= 0.0 && a.mass <= 1.0)) {
                throw std::invalid_argument("atom mass must lie in [0, 1]");
            }
            if (k > 0 && !(part.atoms[k - 1].time < a.time)) {
                throw std::invalid_argument("atom times must be strictly increasing per mark");
            }
            mass_at[a.time] += a.mass;
        }
    }
    for (const auto& [t, m] : mass_at) {
        if (m > 1.0 + kAtomMassSlack) {
            throw std::invalid_argument("total atom mass " + std::to_string(m) + " at t=" + std::to_string(t) +
                                        " exceeds 1");
        }
    }
}

Compensator Compensator::poisson(MarkSpacePtr space, std::span<const double> rates, double horizon)
{
    if (!space || rates.size() != space->size()) {
        throw std::invalid_argument("one rate per mark required");
    }
    std::vector<MarkPart> parts;
    parts.reserve(rates.size());
    for (double r : rates) {
        parts.push_back({CumulativeCurve::from_slopes({{0.0, r}}), {}});
    }
    return Compensator(std::move(space), std::move(parts), horizon);
}

Compensator Compensator::zero(MarkSpacePtr space, double horizon)
{
    const std::size_t n = space ? space->size() : 0;
    return Compensator(std::move(space), std::vector<MarkPart>(n), horizon);
}

const Compensator::MarkPart& Compensator::part(MarkId h) const
{
    if (!space_->contains(h)) {
        throw std::domain_error("compensator: mark outside mark space");
    }
    return parts_[h.index];
}

double Compensator::atom_mass(MarkId h, double t) const
{
    const auto& atoms = part(h).atoms;
    auto it = std::lower_bound(atoms.begin(), atoms.end(), t, [](const Atom& a, double x) { return a.time < x; });
    return (it != atoms.end() && it->time == t) ? it->mass : 0.0;
}

bool operator==(const Compensator& a, const Compensator& b)
{
    return a.horizon_ == b.horizon_ && (a.space_ == b.space_ || *a.space_ == *b.space_) && a.parts_ == b.parts_;
}

double compensator_eval(const Compensator& comp, double s, MarkId h)
{
    const auto& part = comp.part(h);
    if (!(s >= 0.0 && s <= comp.horizon())) {
        throw std::out_of_range("time " + std::to_string(s) + " outside [0, horizon]");
    }
    double value = part.continuous(s);
    for (const auto& a : part.atoms) {
        if (a.time > s) {
            break;
        }
        value += a.mass;
    }
    return value;
}

} // namespace mpplab
