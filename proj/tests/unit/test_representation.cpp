#include <doctest.h>
#include <fixtures.hpp>
#include <mpplab/monte_carlo.hpp>
#include <mpplab/representation.hpp>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace mpplab;

namespace {

double two_state_u1(double t, double T)
{
    return 1.0 - std::exp(-(T - t));
}

ValueFunction two_state_value(double T, std::size_t intervals)
{
    const double f[] = {0.0, 1.0};
    return ValueFunction::solve(fixtures::two_state(T), f, T, intervals);
}

double max_residual(const ValueFunction& u, const CtmcModel& chain, std::size_t paths, std::uint64_t seed)
{
    double worst = 0.0;
    for (std::size_t r = 0; r < paths; ++r) {
        StreamRng rng(seed, r);
        const auto rep = verify_representation_path(u, chain, chain.simulate(rng), 100);
        worst = std::max(worst, rep.residual);
    }
    return worst;
}

} // namespace

TEST_CASE("constant payoffs are harmonic")
{
    const auto spec = fixtures::three_state_cycle(2.0);
    const double f[] = {3.5, 3.5, 3.5};
    const auto u = ValueFunction::solve(spec, f, 2.0);
    for (std::size_t k = 0; k <= u.intervals(); k += 97) {
        for (std::size_t s = 0; s < 3; ++s) CHECK(std::abs(u.at_node(k, s) - 3.5) <= 1e-10 * 3.5);
    }
}

TEST_CASE("two-state value function matches the closed form")
{
    const double T = 1.0;
    const auto u = two_state_value(T, 1000);
    CHECK(u.payoff(0) == 0.0);
    CHECK(u.payoff(1) == 1.0);
    CHECK(u(T, 0) == 0.0);
    for (std::size_t k = 0; k <= u.intervals(); ++k) {
        CHECK(std::abs(u.at_node(k, 0) - two_state_u1(u.node(k), T)) <= 1e-10);
        CHECK(std::abs(u.at_node(k, 1) - 1.0) <= 1e-10);
    }
    // between nodes: linear interpolation error <= step^2 / 8 * max|u''|
    const double step = T / 1000.0;
    for (double t = 0.0003; t < T; t += 0.0137) {
        CHECK(std::abs(u(t, 0) - two_state_u1(t, T)) <= step * step / 8.0 + 1e-10);
    }
}

TEST_CASE("birth chain with linear payoff recovers the Poisson mean")
{
    const double lambda = 2.0, T = 1.5;
    const auto levels = static_cast<std::size_t>(std::ceil(lambda * T + 10.0 * std::sqrt(lambda * T))) + 1;
    const auto spec = CtmcSpec::birth_chain(lambda, levels, T);
    const auto f = parse_payoff("linear", spec);
    const auto u = ValueFunction::solve(spec, f, T);
    for (std::size_t k = 0; k <= u.intervals(); k += 50) {
        for (std::size_t n = 0; n < 4; ++n) {
            CHECK(std::abs(u.at_node(k, n) - (static_cast<double>(n) + lambda * (T - u.node(k)))) <= 1e-8);
        }
    }
}

TEST_CASE("uniformization agrees with the matrix exponential")
{
    const auto spec = fixtures::three_state_cycle(2.0);
    const double f[] = {1.0, -2.0, 0.5};
    const double T = 1.7;
    const auto u = ValueFunction::solve(spec, f, T, 1200);
    Eigen::Matrix3d q;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) q(i, j) = spec.generator[i][j];
    }
    const Eigen::Vector3d fv(f[0], f[1], f[2]);
    double bound = 0.0;
    for (std::size_t k = 0; k <= u.intervals(); k += 40) {
        const Eigen::Vector3d exact = (q * (T - u.node(k))).exp() * fv;
        for (int s = 0; s < 3; ++s) {
            CHECK(std::abs(u.at_node(k, s) - exact(s)) <= 1e-9);
            bound = std::max(bound, std::abs(u.at_node(k, s)));
        }
    }
    CHECK(bound <= 2.0 + 1e-12);
}

TEST_CASE("value function argument checks")
{
    const double f[] = {0.0, 1.0};
    CHECK_THROWS_AS(ValueFunction::solve(fixtures::two_state(1.0), f, 1.0, 999), std::invalid_argument);
    CHECK_THROWS_AS(ValueFunction::solve(fixtures::two_state(1.0), f, 2.0), std::invalid_argument);
    const double short_f[] = {0.0};
    CHECK_THROWS_AS(ValueFunction::solve(fixtures::two_state(1.0), short_f, 1.0), std::invalid_argument);
    const auto u = two_state_value(1.0, 1000);
    CHECK_THROWS_AS(u(1.5, 0), std::out_of_range);
    CHECK_THROWS_AS(u(0.5, 2), std::domain_error);
}

TEST_CASE("payoff descriptions")
{
    const auto spec = fixtures::three_state_cycle();
    CHECK(parse_payoff("const:2.5", spec) == std::vector<double>{2.5, 2.5, 2.5});
    CHECK(parse_payoff("indicator:2", spec) == std::vector<double>{0.0, 1.0, 0.0});
    CHECK(parse_payoff("linear", spec) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(parse_payoff("values:1,0,-1", spec) == std::vector<double>{1.0, 0.0, -1.0});
    CHECK_THROWS_AS(parse_payoff("values:1,2", spec), std::invalid_argument);
    CHECK_THROWS_AS(parse_payoff("indicator:9", spec), std::invalid_argument);
    CHECK_THROWS_AS(parse_payoff("cubic", spec), std::invalid_argument);
}

TEST_CASE("integrands: constant payoff gives zero, linear Poisson payoff gives one")
{
    const auto spec = CtmcSpec::birth_chain(1.0, 40, 2.0);
    const CtmcModel chain(spec);
    const auto c = parse_payoff("const:4", spec);
    const auto lin = parse_payoff("linear", spec);
    const auto uc = ValueFunction::solve(spec, c, 2.0);
    const auto ul = ValueFunction::tabulate(spec.states.size(), 2.0, 1000,
                                            [&](double t, std::size_t n) { return lin[n] + (2.0 - t); });
    for (std::size_t r = 0; r < 50; ++r) {
        StreamRng rng(3, r);
        const auto path = chain.simulate(rng);
        for (const auto& w : integrand_from_value(uc, chain, path.trajectory)) {
            for (const auto& cell : w.cells()) {
                CHECK(std::abs(cell.value) <= 1e-9);
                CHECK(std::abs(cell.slope) <= 1e-6);
            }
        }
        const auto w = integrand_from_value(ul, chain, path.trajectory);
        const auto states = chain.state_path(path.trajectory);
        // along the path, the mark leaving the current state carries W = 1
        for (double t : {0.25, 0.9, 1.6, 2.0}) {
            std::size_t state = 0;
            for (const auto& v : states) {
                if (v.start < t) state = v.state;
            }
            const MarkId h = chain.mark_space()->id(std::to_string(state) + "->" + std::to_string(state + 1));
            CHECK(std::abs(w[h.index].at(t) - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("two-state integrand equals exp(-(T - t)) before the jump")
{
    const double T = 1.0;
    const CtmcModel chain(fixtures::two_state(T));
    const auto u = two_state_value(T, 1000);
    for (std::size_t r = 0; r < 50; ++r) {
        StreamRng rng(12, r);
        const auto path = chain.simulate(rng);
        const auto w = integrand_from_value(u, chain, path.trajectory);
        const double jump = path.trajectory.empty() ? T : path.trajectory.events()[0].time;
        for (double t = 0.001; t <= T; t += 0.0173) {
            const double expected = t <= jump ? std::exp(-(T - t)) : 0.0;
            CHECK(std::abs(w[0].at(t) - expected) <= 2e-7);
        }
    }
}

TEST_CASE("target martingale")
{
    const auto spec = CtmcSpec::birth_chain(1.5, 40, 2.0);
    const CtmcModel chain(spec);
    const auto f = parse_payoff("const:7", spec);
    const auto uc = ValueFunction::solve(spec, f, 2.0);
    const auto lin = parse_payoff("linear", spec);
    const auto ul = ValueFunction::tabulate(spec.states.size(), 2.0, 1000,
                                            [&](double t, std::size_t n) { return lin[n] + 1.5 * (2.0 - t); });
    for (std::size_t r = 0; r < 50; ++r) {
        StreamRng rng(13, r);
        const auto path = chain.simulate(rng);
        const auto zc = target_martingale(uc, chain, path.trajectory);
        const auto zl = target_martingale(ul, chain, path.trajectory);
        for (double t : {0.0, 0.4, 1.3, 2.0}) {
            CHECK(std::abs(zc.value(t) - 7.0) <= 1e-9);
            double n = 0.0;
            for (const auto& e : path.trajectory.events()) n += e.time <= t ? 1.0 : 0.0;
            CHECK(std::abs(zl.value(t) - (n + 1.5 * (2.0 - t))) <= 1e-12);
        }
        CHECK_THROWS_AS(zl.value(2.5), std::out_of_range);
        CHECK(zl.value(2.0) == doctest::Approx(lin[chain.state_path(path.trajectory).back().state]));
    }
}

TEST_CASE("terminal time beyond the trajectory horizon is a range error")
{
    const CtmcModel chain(fixtures::two_state(1.0));
    const double f[] = {0.0, 1.0};
    auto longer = fixtures::two_state(3.0);
    const auto u = ValueFunction::solve(longer, f, 3.0);
    StreamRng rng(1, 0);
    const auto path = chain.simulate(rng);
    CHECK_THROWS_AS(target_martingale(u, chain, path.trajectory), std::out_of_range);
}

TEST_CASE("target martingale has constant mean")
{
    const double T = 1.0;
    const CtmcModel chain(fixtures::two_state(T));
    const auto u = two_state_value(T, 1000);
    const std::size_t reps = 100000;
    std::vector<double> mid(reps), end(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        StreamRng rng(14, r);
        const auto z = target_martingale(u, chain, chain.simulate(rng).trajectory);
        mid[r] = z.value(0.5);
        end[r] = z.value(T);
    }
    const double z0 = u(0.0, 0);
    CHECK(summarize(mid).covers(z0));
    CHECK(summarize(end).covers(z0));
}

TEST_CASE("residual is zero for affine value functions")
{
    const double lambda = 2.0, T = 2.0;
    const auto spec = CtmcSpec::birth_chain(lambda, 60, T);
    const CtmcModel chain(spec);
    const auto lin = parse_payoff("linear", spec);
    const auto ul = ValueFunction::tabulate(spec.states.size(), T, 1000,
                                            [&](double t, std::size_t n) { return lin[n] + lambda * (T - t); });
    const auto uc = ValueFunction::solve(spec, parse_payoff("const:-1.25", spec), T);
    for (std::size_t r = 0; r < 200; ++r) {
        StreamRng rng(15, r);
        const auto path = chain.simulate(rng);
        const auto rl = verify_representation_path(ul, chain, path, 100);
        CHECK(rl.residual <= 1e-12);
        CHECK(rl.jump_mismatch <= 1e-12);
        CHECK(rl.off_event_jump == 0.0);
        // uniformization truncation bounds the drift of u away from the constant
        CHECK(verify_representation_path(uc, chain, path, 100).residual <= 2.0 * 1.25 * ValueFunction::kTruncationTolerance);
    }
}

TEST_CASE("two-state residual stays within the interpolation budget and shrinks with the grid")
{
    const double T = 1.0;
    const CtmcModel chain(fixtures::two_state(T));
    const double coarse = max_residual(two_state_value(T, 1000), chain, 300, 16);
    const double fine = max_residual(two_state_value(T, 2000), chain, 300, 16);
    CHECK(coarse <= 1e-6);
    CHECK(fine <= coarse / 2.0);
}

TEST_CASE("jumps of Z match the represented jumps at events")
{
    const auto spec = fixtures::three_state_cycle(2.0);
    const CtmcModel chain(spec);
    const double f[] = {1.0, -2.0, 0.5};
    const auto u = ValueFunction::solve(spec, f, 2.0);
    for (std::size_t r = 0; r < 100; ++r) {
        StreamRng rng(17, r);
        const auto rep = verify_representation_path(u, chain, chain.simulate(rng), 100);
        CHECK(rep.jump_mismatch <= 1e-12);
        CHECK(rep.off_event_jump == 0.0);
        CHECK(rep.residual <= 1e-5);
    }
}

TEST_CASE("residual checks mark counts")
{
    const auto z = PiecewisePath::zero(1.0);
    const Integrand w = {PredictableIntegrand::constant(1.0)};
    const std::vector<PiecewisePath> m = {PiecewisePath::zero(1.0), PiecewisePath::zero(1.0)};
    const double checkpoints[] = {0.5};
    CHECK_THROWS_AS(representation_residual(z, w, m, checkpoints), std::domain_error);
}

TEST_CASE("checkpoints include events and their neighbours")
{
    const auto space = fixtures::flat({"1->2"});
    const auto t = fixtures::traj(space, {{0.5, "1->2"}}, 1.0);
    const auto cps = representation_checkpoints(t, 1.0, 0.001, 11);
    CHECK(std::find(cps.begin(), cps.end(), 0.5) != cps.end());
    CHECK(std::find(cps.begin(), cps.end(), 0.499) != cps.end());
    CHECK(std::find(cps.begin(), cps.end(), 0.501) != cps.end());
    CHECK(cps.front() == 0.0);
    CHECK(cps.back() == 1.0);
}
