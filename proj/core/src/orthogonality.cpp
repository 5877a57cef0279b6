#include "mpplab/orthogonality.hpp"

#include "mpplab/calculus.hpp"
#include "mpplab/serialization.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpplab {

PredictableAtomSet predictable_atoms(const Compensator& comp)
{
    PredictableAtomSet set;
    for (const auto& part : comp.parts()) {
        auto& times = set.times.emplace_back();
        for (const auto& a : part.atoms) {
            if (a.mass > 0.0) times.push_back(a.time);
        }
    }
    return set;
}

bool nopjt_check(std::span<const double> a, std::span<const double> b)
{
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) ++i;
        else if (b[j] < a[i]) ++j;
        else return false;
    }
    return true;
}

bool nopjt_check(const Compensator& comp, MarkId h, MarkId k)
{
    const auto atoms = predictable_atoms(comp);
    return nopjt_check(atoms.of(h), atoms.of(k));
}

double compensator_jump_product(const Compensator& comp_h, MarkId h, const Compensator& comp_k, MarkId k, double t)
{
    return compensator_jump(comp_h, h, t) * compensator_jump(comp_k, k, t);
}

double cross_jump_products(const PiecewisePath& n_h, const Compensator& comp_h, MarkId h, const PiecewisePath& n_k,
                           const Compensator& comp_k, MarkId k)
{
    double worst = 0.0;
    for (const auto& a : comp_k.part(k).atoms) {
        worst = std::max(worst, std::abs(n_h.jump_at(a.time) * a.mass));
    }
    for (const auto& a : comp_h.part(h).atoms) {
        worst = std::max(worst, std::abs(a.mass * n_k.jump_at(a.time)));
    }
    return worst;
}

BracketReport basis_bracket_check(const PiecewisePath& m_h, MarkId h, const PiecewisePath& m_k, MarkId k, bool nopjt)
{
    if (h == k) {
        throw std::domain_error("basis_bracket_check needs two distinct marks");
    }
    BracketReport report{quadratic_covariation(m_h, m_k)};
    report.nopjt = nopjt;
    for (const auto& j : report.bracket.jumps()) {
        if (j.size != 0.0) {
            ++report.nonzero_jumps;
            report.max_abs_jump = std::max(report.max_abs_jump, std::abs(j.size));
        }
    }
    report.identically_zero = report.bracket.is_identically_zero();
    report.pass = !nopjt || report.identically_zero;
    return report;
}

MonteCarloEstimate mc_orthogonality(const Model& model, MarkId h, MarkId k, double t, std::size_t reps,
                                    std::uint64_t seed, unsigned threads)
{
    if (reps < 1000) {
        throw std::invalid_argument("mc_orthogonality needs at least 1000 replications");
    }
    require_marks(*model.mark_space(), std::span<const MarkId>(&h, 1));
    require_marks(*model.mark_space(), std::span<const MarkId>(&k, 1));
    if (!(t >= 0.0 && t <= model.horizon())) {
        throw std::out_of_range("mc_orthogonality: t outside [0, horizon]");
    }
    std::vector<double> samples(reps);
    parallel_for(reps, threads, [&](std::size_t r) {
        StreamRng rng(seed, r);
        const auto path = model.simulate(rng);
        samples[r] = martingale_at(path.trajectory, path.compensator, h, t) *
                     martingale_at(path.trajectory, path.compensator, k, t);
    });
    return summarize(samples);
}

AtomSupportScan atom_support_scan(const Model& model, std::size_t paths, std::uint64_t seed)
{
    AtomSupportScan scan;
    const auto& support = model.deterministic_firing_times();
    const auto& space = *model.mark_space();
    for (std::size_t r = 0; r < paths; ++r) {
        StreamRng rng(seed, r);
        const auto path = model.simulate(rng);
        const auto parts = path.compensator.parts();
        for (std::size_t h = 0; h < parts.size(); ++h) {
            for (const auto& a : parts[h].atoms) {
                ++scan.atoms_scanned;
                const bool fires = std::binary_search(support[h].begin(), support[h].end(), a.time);
                if (!fires || !(a.mass > 0.0)) {
                    ++scan.violations;
                    if (scan.details.size() < 10) {
                        scan.details.push_back("mark " + space.display(MarkId{h}) + " atom at t=" +
                                               format_double(a.time) + " mass " + format_double(a.mass));
                    }
                }
            }
        }
    }
    return scan;
}

} // namespace mpplab
