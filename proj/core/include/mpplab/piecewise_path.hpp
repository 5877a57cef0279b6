#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mpplab {

struct Jump {
    double time = 0.0;
    double size = 0.0;
};

/// Polynomial drift rate on [start, next start): rate(t) = sum_i rate[i] * (t - start)^i.
/// Compensators and counting processes only need rate[0]; integrals against
/// piecewise-linear integrands produce the higher coefficients.
struct DriftPiece {
    static constexpr std::size_t kCoefficients = 4;
    double start = 0.0;
    std::array<double, kCoefficients> rate{};
};

/// Right-continuous pure-jump path of finite variation on [0, horizon]:
///
///   X_t = initial + integral_0^t rate(s) ds + sum_{s <= t} jump(s).
///
/// Drift pieces start at 0 (when present) with strictly increasing starts; the
/// last piece runs to the horizon. Jump times are strictly increasing in
/// (0, horizon]. Prefix sums are built once so evaluation is O(log n).
class PiecewisePath {
public:
    PiecewisePath(double initial, std::vector<DriftPiece> drift, std::vector<Jump> jumps, double horizon);

    static PiecewisePath zero(double horizon);

    double initial() const noexcept { return initial_; }
    double horizon() const noexcept { return horizon_; }
    std::span<const DriftPiece> drift() const noexcept { return drift_; }
    std::span<const Jump> jumps() const noexcept { return jumps_; }

    /// X_t, including a jump located exactly at t.
    double value(double t) const;
    /// X_{t-}.
    double left_limit(double t) const;
    /// Recorded jump size at exactly t (bit-identical time), 0 if none.
    double jump_at(double t) const;
    /// integral_0^t rate(s) ds.
    double drift_integral(double t) const;
    /// sum_{s <= t} jump(s).
    double jump_sum(double t) const;

    bool has_drift() const noexcept;
    /// True iff every stored number is exactly zero.
    bool is_identically_zero() const noexcept;

    friend PiecewisePath operator+(const PiecewisePath& a, const PiecewisePath& b);
    friend PiecewisePath operator-(const PiecewisePath& a, const PiecewisePath& b);
    friend PiecewisePath operator*(double c, const PiecewisePath& a);

private:
    void check_time(double t) const;
    std::size_t piece_index(double t) const;

    double initial_ = 0.0;
    double horizon_ = 0.0;
    std::vector<DriftPiece> drift_;
    std::vector<Jump> jumps_;
    std::vector<double> drift_prefix_;  // integral up to drift_[k].start
    std::vector<double> jump_prefix_;   // sum of jumps_[0..k]
};

/// integral_0^length sum_i coeffs[i] s^i ds.
double integrate_polynomial(const std::array<double, DriftPiece::kCoefficients>& coeffs, double length) noexcept;

/// Re-expresses p(t - from) as a polynomial in (t - to).
std::array<double, DriftPiece::kCoefficients> shift_polynomial(
    const std::array<double, DriftPiece::kCoefficients>& coeffs, double from, double to) noexcept;

} // namespace mpplab
