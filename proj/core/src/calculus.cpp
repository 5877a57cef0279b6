#include "mpplab/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpplab {

using Coeffs = std::array<double, DriftPiece::kCoefficients>;

PredictableIntegrand::PredictableIntegrand(std::vector<IntegrandCell> cells) : cells_(std::move(cells))
{
    if (cells_.empty() || cells_.front().start != 0.0) {
        throw std::invalid_argument("integrand cells must start at 0");
    }
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const auto& c = cells_[k];
        if (!std::isfinite(c.start) || !std::isfinite(c.value) || !std::isfinite(c.slope)) {
            throw std::invalid_argument("integrand values must be finite");
        }
        if (k > 0 && !(cells_[k - 1].start < c.start)) {
            throw std::invalid_argument("integrand breakpoints must be strictly increasing");
        }
    }
}

PredictableIntegrand PredictableIntegrand::constant(double c)
{
    return PredictableIntegrand({{0.0, c, 0.0}});
}

PredictableIntegrand PredictableIntegrand::step(std::span<const std::pair<double, double>> breakpoints)
{
    std::vector<IntegrandCell> cells;
    cells.reserve(breakpoints.size());
    for (const auto& [t, v] : breakpoints) cells.push_back({t, v, 0.0});
    return PredictableIntegrand(std::move(cells));
}

namespace {

// Cell containing t under the left-open convention: start_k < t <= start_{k+1}.
std::size_t cell_index(std::span<const IntegrandCell> cells, double t)
{
    auto it = std::lower_bound(cells.begin(), cells.end(), t,
                               [](const IntegrandCell& c, double x) { return c.start < x; });
    return it == cells.begin() ? 0 : static_cast<std::size_t>(it - cells.begin()) - 1;
}

} // namespace

double PredictableIntegrand::at(double t) const
{
    const auto& c = cells_[cell_index(cells_, t)];
    return c.value + c.slope * (t - c.start);
}

bool PredictableIntegrand::is_zero() const noexcept
{
    return std::all_of(cells_.begin(), cells_.end(), [](const IntegrandCell& c) { return c.value == 0.0 && c.slope == 0.0; });
}

PiecewisePath compensated_martingale(const PiecewisePath& counting, const Compensator& comp, MarkId h)
{
    const auto& part = comp.part(h);
    if (counting.horizon() != comp.horizon()) {
        throw std::invalid_argument("counting path and compensator horizons differ");
    }
    if (counting.initial() != 0.0 || counting.has_drift()) {
        throw std::domain_error("compensated_martingale expects a counting path");
    }
    const auto events = counting.jumps();
    for (const auto& j : events) {
        if (j.size != 1.0) {
            throw std::domain_error("compensated_martingale expects unit jumps");
        }
    }

    std::vector<DriftPiece> drift;
    const auto starts = part.continuous.starts();
    const auto slopes = part.continuous.slopes();
    for (std::size_t k = 0; k < starts.size(); ++k) {
        if (starts[k] > comp.horizon()) break;
        drift.push_back(DriftPiece{starts[k], {-slopes[k], 0.0, 0.0, 0.0}});
    }

    std::vector<Jump> jumps;
    jumps.reserve(events.size() + part.atoms.size());
    const auto& atoms = part.atoms;
    std::size_t i = 0, k = 0;
    while (i < events.size() || k < atoms.size()) {
        if (k == atoms.size() || (i < events.size() && events[i].time < atoms[k].time)) {
            jumps.push_back({events[i].time, 1.0});
            ++i;
        } else if (i == events.size() || atoms[k].time < events[i].time) {
            jumps.push_back({atoms[k].time, -atoms[k].mass});
            ++k;
        } else {
            jumps.push_back({atoms[k].time, 1.0 - atoms[k].mass});
            ++i;
            ++k;
        }
    }
    return PiecewisePath(0.0, std::move(drift), std::move(jumps), comp.horizon());
}

PiecewisePath compensated_martingale(const Trajectory& traj, const Compensator& comp, MarkId h)
{
    if (traj.mark_space_ptr() != comp.mark_space_ptr() && !(traj.mark_space() == comp.mark_space())) {
        throw std::domain_error("trajectory and compensator mark spaces differ");
    }
    return compensated_martingale(counting_path(traj, h), comp, h);
}

PiecewisePath stieltjes_integral(const PredictableIntegrand& w, const PiecewisePath& a)
{
    const auto cells = w.cells();
    const auto pieces = a.drift();

    std::vector<DriftPiece> drift;
    if (!pieces.empty()) {
        std::vector<double> starts;
        starts.reserve(cells.size() + pieces.size());
        for (const auto& p : pieces) starts.push_back(p.start);
        for (const auto& c : cells) {
            if (c.start <= a.horizon()) starts.push_back(c.start);
        }
        std::sort(starts.begin(), starts.end());
        starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

        std::size_t pi = 0, ci = 0;
        drift.reserve(starts.size());
        for (double s : starts) {
            while (pi + 1 < pieces.size() && pieces[pi + 1].start <= s) ++pi;
            // the cell covering (s, next] starts at or before s
            while (ci + 1 < cells.size() && cells[ci + 1].start <= s) ++ci;
            const auto& piece = pieces[pi];
            const auto& cell = cells[ci];
            const Coeffs rate = shift_polynomial(piece.rate, piece.start, s);
            const double w0 = cell.value + cell.slope * (s - cell.start);
            const double w1 = cell.slope;
            Coeffs product{};
            for (std::size_t i = 0; i < product.size(); ++i) {
                product[i] += w0 * rate[i];
                if (w1 != 0.0 && rate[i] != 0.0) {
                    if (i + 1 >= product.size()) {
                        throw std::domain_error("stieltjes_integral: drift degree exceeds the supported polynomial order");
                    }
                    product[i + 1] += w1 * rate[i];
                }
            }
            drift.push_back(DriftPiece{s, product});
        }
    }

    std::vector<Jump> jumps;
    jumps.reserve(a.jumps().size());
    for (const auto& j : a.jumps()) {
        jumps.push_back({j.time, w.at(j.time) * j.size});
    }
    return PiecewisePath(0.0, std::move(drift), std::move(jumps), a.horizon());
}

PiecewisePath stochastic_integral(const PredictableIntegrand& w, const PiecewisePath& m)
{
    return stieltjes_integral(w, m);
}

PiecewisePath quadratic_covariation(const PiecewisePath& x, const PiecewisePath& y)
{
    if (x.horizon() != y.horizon()) {
        throw std::invalid_argument("quadratic_covariation: horizons differ");
    }
    const auto jx = x.jumps();
    const auto jy = y.jumps();
    std::vector<Jump> jumps;
    std::size_t i = 0, k = 0;
    while (i < jx.size() && k < jy.size()) {
        if (jx[i].time < jy[k].time) {
            ++i;
        } else if (jy[k].time < jx[i].time) {
            ++k;
        } else {
            jumps.push_back({jx[i].time, jx[i].size * jy[k].size});
            ++i;
            ++k;
        }
    }
    return PiecewisePath(0.0, {}, std::move(jumps), x.horizon());
}

double compensator_jump(const Compensator& comp, MarkId h, double t)
{
    return comp.atom_mass(h, t);
}

} // namespace mpplab
