#pragma once

#include "mpplab/compensator.hpp"
#include "mpplab/piecewise_path.hpp"
#include "mpplab/trajectory.hpp"

#include <span>
#include <utility>
#include <vector>

namespace mpplab {

/// Left-open cell of a predictable integrand: on (start, next start] the
/// integrand equals value + slope * (t - start).
struct IntegrandCell {
    double start = 0.0;
    double value = 0.0;
    double slope = 0.0;
};

/// Left-continuous, piecewise-linear integrand of time.
///
/// Cells are left-open, so the value used at a jump time s comes from the cell
/// that ends at s and was fixed before s. This is the pathwise form of
/// predictability. Step integrands are the special case slope == 0.
class PredictableIntegrand {
public:
    explicit PredictableIntegrand(std::vector<IntegrandCell> cells);

    static PredictableIntegrand constant(double c);
    /// Breakpoints (t_k, v_k): value v_k on (t_k, t_{k+1}]; the first t must be 0.
    static PredictableIntegrand step(std::span<const std::pair<double, double>> breakpoints);

    /// Value at t > 0 (t = 0 uses the first cell).
    double at(double t) const;
    std::span<const IntegrandCell> cells() const noexcept { return cells_; }
    bool is_zero() const noexcept;

private:
    std::vector<IntegrandCell> cells_;
};

/// One slice W(., x_h) per mark, indexed by MarkId.
using Integrand = std::vector<PredictableIntegrand>;

/// M^h_t = N^h_t - nu((0, t] x {h}). At an atom of mass p the jump is 1 - p
/// when the mark fires there and -p otherwise. Throws std::domain_error when
/// `counting` is not a unit-jump counting path or h is not in the compensator.
PiecewisePath compensated_martingale(const PiecewisePath& counting, const Compensator& comp, MarkId h);
/// Same, building N^h from the trajectory; mark spaces must agree.
PiecewisePath compensated_martingale(const Trajectory& traj, const Compensator& comp, MarkId h);

/// Closed-form Lebesgue-Stieltjes integral t -> integral_(0,t] W dA.
PiecewisePath stieltjes_integral(const PredictableIntegrand& w, const PiecewisePath& a);

/// Pathwise stochastic integral against a compensated martingale. For
/// finite-variation martingales this coincides with stieltjes_integral, i.e.
/// integral W dN - integral W dnu.
PiecewisePath stochastic_integral(const PredictableIntegrand& w, const PiecewisePath& m);

/// [X, Y]_t = sum_{s <= t} dX_s dY_s over bit-identical shared jump times.
PiecewisePath quadratic_covariation(const PiecewisePath& x, const PiecewisePath& y);

/// dN^{h,p}_t: atom mass of mark h at exactly t.
double compensator_jump(const Compensator& comp, MarkId h, double t);

} // namespace mpplab
