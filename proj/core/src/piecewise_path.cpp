#include "mpplab/piecewise_path.hpp"

#include "numeric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mpplab {

using Coeffs = std::array<double, DriftPiece::kCoefficients>;

double integrate_polynomial(const Coeffs& coeffs, double length) noexcept
{
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) {
        acc = acc * length + coeffs[i] / static_cast<double>(i + 1);
    }
    return acc * length;
}

Coeffs shift_polynomial(const Coeffs& coeffs, double from, double to) noexcept
{
    // p(t - from) = p((t - to) + delta) with delta = to - from.
    const double delta = to - from;
    if (delta == 0.0) {
        return coeffs;
    }
    Coeffs out{};
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0.0) {
            continue;
        }
        // binomial expansion of (s + delta)^i
        double binom = 1.0;
        double power = 1.0;
        for (std::size_t j = 0; j <= i; ++j) {
            // term for s^(i-j): C(i,j) delta^j
            out[i - j] += coeffs[i] * binom * power;
            binom = binom * static_cast<double>(i - j) / static_cast<double>(j + 1);
            power *= delta;
        }
    }
    return out;
}

PiecewisePath::PiecewisePath(double initial, std::vector<DriftPiece> drift, std::vector<Jump> jumps, double horizon)
    : initial_(initial), horizon_(horizon), drift_(std::move(drift)), jumps_(std::move(jumps))
{
    if (!std::isfinite(horizon_) || horizon_ <= 0.0) {
        throw std::invalid_argument("path horizon must be positive and finite");
    }
    if (!std::isfinite(initial_)) {
        throw std::invalid_argument("path initial value must be finite");
    }
    if (!drift_.empty() && drift_.front().start != 0.0) {
        throw std::invalid_argument("first drift piece must start at 0");
    }
    for (std::size_t k = 0; k < drift_.size(); ++k) {
        const auto& piece = drift_[k];
        if (!(piece.start <= horizon_)) {
            throw std::invalid_argument("drift piece starts after the horizon");
        }
        if (k > 0 && !(drift_[k - 1].start < piece.start)) {
            throw std::invalid_argument("drift piece starts must be strictly increasing");
        }
        for (double c : piece.rate) {
            if (!std::isfinite(c)) {
                throw std::invalid_argument("drift coefficients must be finite");
            }
        }
    }
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        const auto& j = jumps_[k];
        if (!(j.time > 0.0 && j.time <= horizon_) || !std::isfinite(j.size)) {
            throw std::invalid_argument("jump at t=" + std::to_string(j.time) + " outside (0, horizon] or not finite");
        }
        if (k > 0 && !(jumps_[k - 1].time < j.time)) {
            throw std::invalid_argument("jump times must be strictly increasing");
        }
    }

    drift_prefix_.resize(drift_.size());
    detail::CompensatedSum drift_acc;
    for (std::size_t k = 0; k < drift_.size(); ++k) {
        drift_prefix_[k] = drift_acc.value();
        const double end = k + 1 < drift_.size() ? drift_[k + 1].start : horizon_;
        drift_acc.add(integrate_polynomial(drift_[k].rate, end - drift_[k].start));
    }
    jump_prefix_.resize(jumps_.size());
    detail::CompensatedSum jump_acc;
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        jump_acc.add(jumps_[k].size);
        jump_prefix_[k] = jump_acc.value();
    }
}

PiecewisePath PiecewisePath::zero(double horizon)
{
    return PiecewisePath(0.0, {}, {}, horizon);
}

void PiecewisePath::check_time(double t) const
{
    if (!(t >= 0.0 && t <= horizon_)) {
        throw std::out_of_range("time " + std::to_string(t) + " outside [0, horizon]");
    }
}

std::size_t PiecewisePath::piece_index(double t) const
{
    auto it = std::upper_bound(drift_.begin(), drift_.end(), t,
                               [](double x, const DriftPiece& p) { return x < p.start; });
    return static_cast<std::size_t>(it - drift_.begin()) - 1;
}

double PiecewisePath::drift_integral(double t) const
{
    check_time(t);
    if (drift_.empty()) {
        return 0.0;
    }
    const std::size_t k = piece_index(t);
    return drift_prefix_[k] + integrate_polynomial(drift_[k].rate, t - drift_[k].start);
}

double PiecewisePath::jump_sum(double t) const
{
    check_time(t);
    auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t,
                               [](double x, const Jump& j) { return x < j.time; });
    if (it == jumps_.begin()) {
        return 0.0;
    }
    return jump_prefix_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
}

double PiecewisePath::value(double t) const
{
    return initial_ + drift_integral(t) + jump_sum(t);
}

double PiecewisePath::left_limit(double t) const
{
    check_time(t);
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                               [](const Jump& j, double x) { return j.time < x; });
    const double jumps_before = it == jumps_.begin() ? 0.0 : jump_prefix_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
    return initial_ + drift_integral(t) + jumps_before;
}

double PiecewisePath::jump_at(double t) const
{
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), t,
                               [](const Jump& j, double x) { return j.time < x; });
    return (it != jumps_.end() && it->time == t) ? it->size : 0.0;
}

bool PiecewisePath::has_drift() const noexcept
{
    for (const auto& p : drift_) {
        for (double c : p.rate) {
            if (c != 0.0) {
                return true;
            }
        }
    }
    return false;
}

bool PiecewisePath::is_identically_zero() const noexcept
{
    if (initial_ != 0.0 || has_drift()) {
        return false;
    }
    return std::all_of(jumps_.begin(), jumps_.end(), [](const Jump& j) { return j.size == 0.0; });
}

namespace {

std::vector<double> piece_boundaries(const PiecewisePath& a, const PiecewisePath& b)
{
    std::vector<double> starts;
    for (const auto& p : a.drift()) starts.push_back(p.start);
    for (const auto& p : b.drift()) starts.push_back(p.start);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    return starts;
}

Coeffs rate_at_piece(const PiecewisePath& p, double start)
{
    const auto pieces = p.drift();
    if (pieces.empty()) {
        return Coeffs{};
    }
    auto it = std::upper_bound(pieces.begin(), pieces.end(), start,
                               [](double x, const DriftPiece& q) { return x < q.start; });
    const auto& piece = *(it - 1);
    return shift_polynomial(piece.rate, piece.start, start);
}

PiecewisePath combine(const PiecewisePath& a, double ca, const PiecewisePath& b, double cb)
{
    if (a.horizon() != b.horizon()) {
        throw std::invalid_argument("paths must share a horizon");
    }
    std::vector<DriftPiece> drift;
    for (double start : piece_boundaries(a, b)) {
        const Coeffs ra = rate_at_piece(a, start);
        const Coeffs rb = rate_at_piece(b, start);
        DriftPiece piece{start, {}};
        for (std::size_t i = 0; i < piece.rate.size(); ++i) {
            piece.rate[i] = ca * ra[i] + cb * rb[i];
        }
        drift.push_back(piece);
    }
    std::vector<Jump> jumps;
    const auto ja = a.jumps();
    const auto jb = b.jumps();
    std::size_t i = 0, k = 0;
    while (i < ja.size() || k < jb.size()) {
        if (k == jb.size() || (i < ja.size() && ja[i].time < jb[k].time)) {
            jumps.push_back({ja[i].time, ca * ja[i].size});
            ++i;
        } else if (i == ja.size() || jb[k].time < ja[i].time) {
            jumps.push_back({jb[k].time, cb * jb[k].size});
            ++k;
        } else {
            jumps.push_back({ja[i].time, ca * ja[i].size + cb * jb[k].size});
            ++i;
            ++k;
        }
    }
    return PiecewisePath(ca * a.initial() + cb * b.initial(), std::move(drift), std::move(jumps), a.horizon());
}

} // namespace

PiecewisePath operator+(const PiecewisePath& a, const PiecewisePath& b) { return combine(a, 1.0, b, 1.0); }
PiecewisePath operator-(const PiecewisePath& a, const PiecewisePath& b) { return combine(a, 1.0, b, -1.0); }

PiecewisePath operator*(double c, const PiecewisePath& a)
{
    std::vector<DriftPiece> drift(a.drift().begin(), a.drift().end());
    for (auto& p : drift) {
        for (double& x : p.rate) x *= c;
    }
    std::vector<Jump> jumps(a.jumps().begin(), a.jumps().end());
    for (auto& j : jumps) j.size *= c;
    return PiecewisePath(c * a.initial(), std::move(drift), std::move(jumps), a.horizon());
}

} // namespace mpplab
