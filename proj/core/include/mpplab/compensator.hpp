#pragma once

#include "mpplab/mark_space.hpp"

#include <span>
#include <utility>
#include <vector>

namespace mpplab {

/// Predictable jump of a compensator: nu({time} x {h}) = mass.
struct Atom {
    double time = 0.0;
    double mass = 0.0;

    friend bool operator==(const Atom&, const Atom&) = default;
};

/// Continuous, nondecreasing, piecewise-linear function with value 0 at t = 0.
/// Piece k covers [start_k, start_{k+1}) with the given slope; the last piece
/// extends to infinity, so the curve is flat after its last breakpoint when
/// built from breakpoints.
class CumulativeCurve {
public:
    struct Piece {
        double start;
        double slope;
    };

    /// Zero curve.
    CumulativeCurve();

    /// Breakpoints (time, cumulative value) starting at (0, 0).
    static CumulativeCurve from_breakpoints(std::span<const std::pair<double, double>> points);
    /// Slopes switched on at the given starts; the first start must be 0.
    static CumulativeCurve from_slopes(std::vector<Piece> pieces);

    double operator()(double s) const;

    std::span<const double> starts() const noexcept { return starts_.empty() ? kZeroPiece : std::span<const double>(starts_); }
    std::span<const double> values() const noexcept { return values_.empty() ? kZeroPiece : std::span<const double>(values_); }
    std::span<const double> slopes() const noexcept { return slopes_.empty() ? kZeroPiece : std::span<const double>(slopes_); }

    friend bool operator==(const CumulativeCurve& a, const CumulativeCurve& b);

private:
    // the zero curve stores nothing; accessors present it as one flat piece at 0
    static constexpr double kZeroPiece[1] = {0.0};

    std::vector<double> starts_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

/// Per-mark predictable compensator nu((0, t] x {h}) = continuous_h(t) + sum of atoms <= t.
///
/// Invariants: atom masses lie in [0, 1], atom times are strictly increasing
/// per mark and lie in (0, horizon], and at each atom time the mass summed
/// over all marks is at most 1.
class Compensator {
public:
    struct MarkPart {
        CumulativeCurve continuous;
        std::vector<Atom> atoms;

        friend bool operator==(const MarkPart&, const MarkPart&) = default;
    };

    Compensator(MarkSpacePtr space, std::vector<MarkPart> parts, double horizon);

    /// Constant-rate compensator lambda_h * t, no atoms.
    static Compensator poisson(MarkSpacePtr space, std::span<const double> rates, double horizon);
    /// Identically zero compensator.
    static Compensator zero(MarkSpacePtr space, double horizon);

    const MarkSpace& mark_space() const noexcept { return *space_; }
    const MarkSpacePtr& mark_space_ptr() const noexcept { return space_; }
    double horizon() const noexcept { return horizon_; }
    const MarkPart& part(MarkId h) const;
    std::span<const MarkPart> parts() const noexcept { return parts_; }

    /// Atom mass of mark h at exactly t (bit-identical), 0 if none.
    double atom_mass(MarkId h, double t) const;

    friend bool operator==(const Compensator& a, const Compensator& b);

private:
    MarkSpacePtr space_;
    std::vector<MarkPart> parts_;
    double horizon_;
};

/// nu((0, s] x {h}). Throws std::domain_error for unknown marks and
/// std::out_of_range for s outside [0, horizon].
double compensator_eval(const Compensator& comp, double s, MarkId h);

/// Tolerance applied to the cross-mark atom mass constraint.
inline constexpr double kAtomMassSlack = 1e-12;

} // namespace mpplab
