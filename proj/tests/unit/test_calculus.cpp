#include <doctest.h>
#include <fixtures.hpp>
#include <mpplab/calculus.hpp>

#include <cmath>

using namespace mpplab;
using fixtures::flat;
using fixtures::traj;

namespace {

Compensator single_atom(const MarkSpacePtr& space, double p)
{
    return Compensator(space, {{CumulativeCurve(), {{1.0, p}}}}, 2.0);
}

PiecewisePath random_path(StreamRng& rng, double horizon)
{
    std::vector<DriftPiece> drift;
    const auto pieces = 1 + static_cast<std::size_t>(rng.uniform() * 4.0);
    for (std::size_t k = 0; k < pieces; ++k) {
        const double start = k == 0 ? 0.0 : horizon * (static_cast<double>(k) + rng.uniform() * 0.5) / pieces;
        drift.push_back({start, {rng.uniform() * 4.0 - 2.0, 0, 0, 0}});
    }
    std::vector<Jump> jumps;
    const auto n = static_cast<std::size_t>(rng.uniform() * 7.0);
    for (std::size_t k = 0; k < n; ++k) {
        jumps.push_back({horizon * (static_cast<double>(k) + 0.1 + 0.8 * rng.uniform()) / 7.0, rng.uniform() * 2.0 - 1.0});
    }
    return PiecewisePath(rng.uniform(), std::move(drift), std::move(jumps), horizon);
}

} // namespace

TEST_CASE("compensated Poisson martingale")
{
    const auto space = flat({"a"});
    const auto t = traj(space, {{0.4, "a"}, {1.1, "a"}}, 2.0);
    const double rates[] = {2.0};
    const auto m = compensated_martingale(t, Compensator::poisson(space, rates, 2.0), MarkId{0});
    CHECK(m.value(1.5) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(m.initial() == 0.0);
    CHECK(m.jump_at(0.4) == 1.0);
}

TEST_CASE("compensator atoms jump by -p without an event and 1 - p with one")
{
    const auto space = flat({"a"});
    const auto comp = single_atom(space, 0.3);
    const auto quiet = compensated_martingale(traj(space, {}, 2.0), comp, MarkId{0});
    CHECK(quiet.jump_at(1.0) == -0.3);
    const auto fired = compensated_martingale(traj(space, {{1.0, "a"}}, 2.0), comp, MarkId{0});
    CHECK(fired.jump_at(1.0) == 1.0 - 0.3);
    CHECK(fired.jumps().size() == 1);
}

TEST_CASE("compensated_martingale errors")
{
    const auto space = flat({"a"});
    const auto comp = single_atom(space, 0.3);
    const PiecewisePath not_counting(0.0, {}, {{0.5, 2.0}}, 2.0);
    CHECK_THROWS_AS(compensated_martingale(not_counting, comp, MarkId{0}), std::domain_error);
    CHECK_THROWS_AS(compensated_martingale(PiecewisePath::zero(2.0), comp, MarkId{1}), std::domain_error);
    const auto other = flat({"b"});
    CHECK_THROWS_AS(compensated_martingale(traj(other, {}, 2.0), comp, MarkId{0}), std::domain_error);
}

TEST_CASE("Stieltjes integral of constants")
{
    StreamRng rng(1, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const auto a = random_path(rng, 3.0);
        const auto one = stieltjes_integral(PredictableIntegrand::constant(1.0), a);
        const auto c = stieltjes_integral(PredictableIntegrand::constant(-2.5), a);
        for (double t : {0.0, 0.7, 1.9, 3.0}) {
            CHECK(one.value(t) == doctest::Approx(a.value(t) - a.initial()).epsilon(1e-12));
            CHECK(c.value(t) == doctest::Approx(-2.5 * (a.value(t) - a.initial())).epsilon(1e-12));
        }
        for (const auto& j : a.jumps()) CHECK(one.jump_at(j.time) == j.size);
    }
}

TEST_CASE("Stieltjes integral of random steps matches a refinement-sum oracle")
{
    StreamRng rng(2, 0);
    const double horizon = 2.0;
    for (int rep = 0; rep < 30; ++rep) {
        const auto a = random_path(rng, horizon);
        std::vector<std::pair<double, double>> bp = {{0.0, rng.uniform() * 2 - 1}};
        for (int k = 1; k < 5; ++k) bp.push_back({horizon * (k + rng.uniform() * 0.9) / 5.0, rng.uniform() * 2 - 1});
        // make some breakpoints coincide with jump times: the left-open convention matters there
        if (!a.jumps().empty()) bp[2].first = std::min(std::max(a.jumps()[0].time, bp[1].first + 1e-9), bp[3].first - 1e-9);
        const auto w = PredictableIntegrand::step(bp);
        const auto integral = stieltjes_integral(w, a);

        // sum over (t_i, t_{i+1}] of W(t_{i+1}) * (A(t_{i+1}) - A(t_i)) on a 1e-4 * horizon grid refined by the breakpoints
        std::vector<double> grid;
        for (int i = 0; i <= 10000; ++i) grid.push_back(horizon * i / 10000.0);
        for (const auto& [t, v] : bp) grid.push_back(t);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        double oracle = 0.0;
        std::size_t next_check = 0;
        const double checks[] = {0.5, 1.0, 1.5, 2.0};
        for (std::size_t i = 1; i < grid.size(); ++i) {
            oracle += w.at(grid[i]) * (a.value(grid[i]) - a.value(grid[i - 1]));
            while (next_check < 4 && grid[i] == checks[next_check]) {
                CHECK(std::abs(integral.value(grid[i]) - oracle) <= 1e-9);
                ++next_check;
            }
        }
        for (const auto& j : a.jumps()) CHECK(integral.jump_at(j.time) == w.at(j.time) * j.size);
    }
}

TEST_CASE("linear integrand against linear drift")
{
    const PiecewisePath a(0.0, {{0.0, {1.0, 0, 0, 0}}}, {}, 2.0);
    const PredictableIntegrand w({{0.0, 0.0, 1.0}});
    CHECK(stieltjes_integral(w, a).value(2.0) == doctest::Approx(2.0));
    // W = 3 + (t - 1) on (1, 2], zero before; A has rate 1 + t
    const PiecewisePath b(0.0, {{0.0, {1.0, 1.0, 0, 0}}}, {}, 2.0);
    const PredictableIntegrand v({{0.0, 0.0, 0.0}, {1.0, 3.0, 1.0}});
    // int_1^2 (2 + t)(1 + t) dt = [2t + 3t^2/2 + t^3/3]_1^2
    const double exact = (4.0 + 6.0 + 8.0 / 3.0) - (2.0 + 1.5 + 1.0 / 3.0);
    CHECK(stieltjes_integral(v, b).value(2.0) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("stochastic integral of one is the martingale and of zero is zero")
{
    const MarkSpacePtr space = flat({"a"});
    const Model model(PoissonSpec{{{"a", 1.3}}, 3.0});
    for (std::size_t r = 0; r < 100; ++r) {
        StreamRng rng(9, r);
        const auto path = model.simulate(rng);
        const auto m = compensated_martingale(path.trajectory, path.compensator, MarkId{0});
        const auto i1 = stochastic_integral(PredictableIntegrand::constant(1.0), m);
        REQUIRE(i1.jumps().size() == m.jumps().size());
        for (std::size_t k = 0; k < m.jumps().size(); ++k) {
            CHECK(i1.jumps()[k].time == m.jumps()[k].time);
            CHECK(i1.jumps()[k].size == m.jumps()[k].size);
        }
        for (double t : {0.5, 1.5, 3.0}) CHECK(std::abs(i1.value(t) - m.value(t)) <= 1e-12);
        CHECK(stochastic_integral(PredictableIntegrand::constant(0.0), m).value(3.0) == 0.0);
    }
}

TEST_CASE("two-level step integrand against compensated Poisson")
{
    const Model model(PoissonSpec{{{"a", 1.0}}, 2.0});
    const std::pair<double, double> bp[] = {{0.0, 1.0}, {1.0, 2.0}};
    const auto w = PredictableIntegrand::step(bp);
    for (std::size_t r = 0; r < 1000; ++r) {
        StreamRng rng(10, r);
        const auto path = model.simulate(rng);
        const auto m = compensated_martingale(path.trajectory, path.compensator, MarkId{0});
        const double n1 = static_cast<double>(measure_eval(path.trajectory, 1.0, MarkId{0}));
        const double n2 = static_cast<double>(measure_eval(path.trajectory, 2.0, MarkId{0}));
        CHECK(std::abs(stochastic_integral(w, m).value(2.0) - ((n1 - 1.0) + 2.0 * (n2 - n1 - 1.0))) <= 1e-12);
    }
}

TEST_CASE("quadratic covariation")
{
    const auto space = flat({"a", "b"});
    const double rates[] = {1.0, 1.0};
    const auto t = traj(space, {{0.3, "a"}, {0.9, "b"}, {1.4, "a"}}, 2.0);
    const auto comp = Compensator::poisson(space, rates, 2.0);
    const auto ma = compensated_martingale(t, comp, MarkId{0});
    const auto mb = compensated_martingale(t, comp, MarkId{1});
    const auto na = counting_path(t, MarkId{0});
    const auto qa = quadratic_covariation(ma, ma);
    for (double s : {0.0, 0.3, 1.0, 1.4, 2.0}) CHECK(qa.value(s) == na.value(s));
    CHECK(quadratic_covariation(ma, mb).is_identically_zero());

    const auto grid_space = flat({"h", "k"});
    const Compensator shared(grid_space, {{CumulativeCurve(), {{1.0, 0.3}}}, {CumulativeCurve(), {{1.0, 0.2}}}}, 2.0);
    const auto quiet = traj(grid_space, {}, 2.0);
    const auto mh = compensated_martingale(quiet, shared, MarkId{0});
    const auto mk = compensated_martingale(quiet, shared, MarkId{1});
    const auto q = quadratic_covariation(mh, mk);
    CHECK(q.jump_at(1.0) == mh.jump_at(1.0) * mk.jump_at(1.0));
    CHECK(q.value(1.0) == doctest::Approx(0.06).epsilon(1e-15));
}

TEST_CASE("quadratic covariation is symmetric and bilinear")
{
    StreamRng rng(4, 0);
    for (int rep = 0; rep < 100; ++rep) {
        // shared jump times come from a common coarse grid
        auto make = [&] {
            std::vector<Jump> j;
            for (int k = 1; k <= 8; ++k) {
                if (rng.uniform() < 0.6) j.push_back({0.25 * k, rng.uniform() * 2 - 1});
            }
            return PiecewisePath(0.0, {{0.0, {rng.uniform(), 0, 0, 0}}}, j, 2.0);
        };
        const auto x = make(), y = make(), z = make();
        const auto xy = quadratic_covariation(x, y);
        const auto yx = quadratic_covariation(y, x);
        REQUIRE(xy.jumps().size() == yx.jumps().size());
        for (std::size_t k = 0; k < xy.jumps().size(); ++k) CHECK(xy.jumps()[k].size == yx.jumps()[k].size);
        const auto lhs = quadratic_covariation(x + 2.0 * z, y);
        const auto rhs = quadratic_covariation(x, y) + 2.0 * quadratic_covariation(z, y);
        for (double s : {0.5, 1.0, 1.5, 2.0}) CHECK(lhs.value(s) == doctest::Approx(rhs.value(s)).epsilon(1e-12));
    }
}

TEST_CASE("compensator_jump reads atoms at exact times")
{
    const auto space = flat({"a"});
    const double rates[] = {2.0};
    CHECK(compensator_jump(Compensator::poisson(space, rates, 2.0), MarkId{0}, 1.0) == 0.0);
    const auto comp = single_atom(space, 0.3);
    CHECK(compensator_jump(comp, MarkId{0}, 1.0) == 0.3);
    CHECK(compensator_jump(comp, MarkId{0}, std::nextafter(1.0, 2.0)) == 0.0);
}

TEST_CASE("integrands are left-continuous")
{
    const std::pair<double, double> bp[] = {{0.0, 1.0}, {1.0, 5.0}};
    const auto w = PredictableIntegrand::step(bp);
    CHECK(w.at(1.0) == 1.0);
    CHECK(w.at(std::nextafter(1.0, 2.0)) == 5.0);
    const std::pair<double, double> late[] = {{0.5, 1.0}};
    CHECK_THROWS_AS(PredictableIntegrand::step(late), std::invalid_argument);
}
