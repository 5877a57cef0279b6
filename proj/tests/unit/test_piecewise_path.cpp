#include <doctest.h>
#include <mpplab/piecewise_path.hpp>
#include <mpplab/rng.hpp>

#include <cmath>
#include <stdexcept>

using namespace mpplab;

namespace {

PiecewisePath sample_path()
{
    // slope 2 on [0, 1), slope -1 on [1, 3]; jumps +0.5 at 0.5 and -2 at 2
    return PiecewisePath(1.0, {{0.0, {2.0, 0, 0, 0}}, {1.0, {-1.0, 0, 0, 0}}}, {{0.5, 0.5}, {2.0, -2.0}}, 3.0);
}

} // namespace

TEST_CASE("values are right-continuous with left limits")
{
    const auto p = sample_path();
    CHECK(p.value(0.0) == 1.0);
    CHECK(p.left_limit(0.5) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.value(0.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(p.value(1.0) == doctest::Approx(3.5));
    CHECK(p.left_limit(2.0) == doctest::Approx(2.5));
    CHECK(p.value(2.0) == doctest::Approx(0.5));
    CHECK(p.value(3.0) == doctest::Approx(-0.5));
    CHECK(p.jump_at(2.0) == -2.0);
    CHECK(p.jump_at(std::nextafter(2.0, 3.0)) == 0.0);
    CHECK(p.value(0.5) - p.left_limit(0.5) == 0.5);
}

TEST_CASE("jump reconstruction matches the recorded size on random paths")
{
    StreamRng rng(3, 0);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<Jump> jumps;
        double t = 0.0;
        for (int k = 0; k < 5; ++k) {
            t += rng.uniform();
            jumps.push_back({t, rng.uniform() * 4.0 - 2.0});
        }
        const PiecewisePath p(rng.uniform(), {{0.0, {rng.uniform(), 0, 0, 0}}, {t / 2, {-rng.uniform(), 0, 0, 0}}},
                              jumps, t + 1.0);
        for (const auto& j : jumps) {
            CHECK(p.jump_at(j.time) == j.size);
            CHECK(std::abs((p.value(j.time) - p.left_limit(j.time)) - j.size) <= 1e-12);
        }
    }
}

TEST_CASE("polynomial drift pieces integrate exactly")
{
    // rate(t) = 1 + 2t + 3t^2 on [0, 2]
    const PiecewisePath p(0.0, {{0.0, {1.0, 2.0, 3.0, 0.0}}}, {}, 2.0);
    CHECK(p.value(2.0) == doctest::Approx(2.0 + 4.0 + 8.0));
    CHECK(integrate_polynomial({1.0, 2.0, 3.0, 4.0}, 1.0) == doctest::Approx(1.0 + 1.0 + 1.0 + 1.0));
    const auto shifted = shift_polynomial({1.0, 2.0, 3.0, 0.0}, 0.0, 1.0);
    // p(t) = 1 + 2t + 3t^2 = 6 + 8 (t - 1) + 3 (t - 1)^2
    CHECK(shifted[0] == doctest::Approx(6.0));
    CHECK(shifted[1] == doctest::Approx(8.0));
    CHECK(shifted[2] == doctest::Approx(3.0));
}

TEST_CASE("arithmetic merges pieces and jumps")
{
    const auto p = sample_path();
    const PiecewisePath q(0.0, {{0.0, {1.0, 0, 0, 0}}}, {{2.0, 2.0}, {2.5, 1.0}}, 3.0);
    const auto s = p + q;
    const auto d = p - q;
    const auto m = 3.0 * p;
    for (double t : {0.0, 0.25, 0.5, 1.0, 1.7, 2.0, 2.5, 3.0}) {
        CHECK(s.value(t) == doctest::Approx(p.value(t) + q.value(t)));
        CHECK(d.value(t) == doctest::Approx(p.value(t) - q.value(t)));
        CHECK(m.value(t) == doctest::Approx(3.0 * p.value(t)));
    }
    CHECK(s.jump_at(2.0) == 0.0);
    CHECK((p - p).value(3.0) == doctest::Approx(0.0));
}

TEST_CASE("invalid paths and times are rejected")
{
    CHECK_THROWS_AS(PiecewisePath(0.0, {{0.5, {1, 0, 0, 0}}}, {}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PiecewisePath(0.0, {}, {{0.5, 1.0}, {0.5, 1.0}}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(PiecewisePath(0.0, {}, {{1.5, 1.0}}, 1.0), std::invalid_argument);
    const auto p = sample_path();
    CHECK_THROWS_AS(p.value(3.5), std::out_of_range);
    CHECK_THROWS_AS(p.value(-1.0), std::out_of_range);
    CHECK(PiecewisePath::zero(1.0).is_identically_zero());
}
