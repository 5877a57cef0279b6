#pragma once

#include "mpplab/compensator.hpp"
#include "mpplab/models.hpp"
#include "mpplab/monte_carlo.hpp"
#include "mpplab/piecewise_path.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mpplab {

/// Deterministic atom times of a compensator, per mark, sorted.
struct PredictableAtomSet {
    std::vector<std::vector<double>> times;

    std::span<const double> of(MarkId h) const { return times.at(h.index); }
};

/// Atom times with positive mass.
PredictableAtomSet predictable_atoms(const Compensator& comp);

/// True iff the two sorted atom-time sets are disjoint. Only declared atoms
/// are inspected, so this is a sufficient condition, not a decision procedure.
bool nopjt_check(std::span<const double> a, std::span<const double> b);
bool nopjt_check(const Compensator& comp, MarkId h, MarkId k);
inline constexpr const char* kNopjtScope = "checked over declared atoms";

/// dnu^h_t * dnu^k_t.
double compensator_jump_product(const Compensator& comp_h, MarkId h, const Compensator& comp_k, MarkId k, double t);

/// max over atom times s of either mark of |dN^h_s dnu^k_s| and |dnu^h_s dN^k_s|.
double cross_jump_products(const PiecewisePath& n_h, const Compensator& comp_h, MarkId h, const PiecewisePath& n_k,
                           const Compensator& comp_k, MarkId k);

struct BracketReport {
    PiecewisePath bracket;
    bool nopjt = true;
    bool identically_zero = true;
    std::size_t nonzero_jumps = 0;
    double max_abs_jump = 0.0;
    /// Under NOPJT the bracket must vanish; otherwise the realized bracket is only reported.
    bool pass = true;
};

/// [M^h, M^k] for two marks of one path. Throws std::domain_error when h == k.
BracketReport basis_bracket_check(const PiecewisePath& m_h, MarkId h, const PiecewisePath& m_k, MarkId k, bool nopjt);

/// Monte Carlo estimate of E[M^h_t M^k_t]; replication r uses StreamRng(seed, r).
/// Throws std::invalid_argument when reps < 1000.
MonteCarloEstimate mc_orthogonality(const Model& model, MarkId h, MarkId k, double t, std::size_t reps,
                                    std::uint64_t seed, unsigned threads = 1);

struct AtomSupportScan {
    std::size_t atoms_scanned = 0;
    std::size_t violations = 0;
    std::vector<std::string> details;

    bool pass() const noexcept { return violations == 0; }
};

/// Every compensator atom must sit at a time where its mark fires with
/// positive probability (the model's deterministic firing support) and carry
/// positive mass. Scans `paths` realizations of the model.
AtomSupportScan atom_support_scan(const Model& model, std::size_t paths, std::uint64_t seed);

} // namespace mpplab
