#include <cmath>
#include <doctest.h>
#include <fixtures.hpp>
#include <mpplab/calculus.hpp>
#include <mpplab/merge.hpp>
#include <mpplab/serialization.hpp>

#include <charconv>
#include <sstream>

using namespace mpplab;
using fixtures::flat;
using fixtures::traj;

namespace {

std::string line_error(const std::string& text)
{
    std::istringstream in(text);
    try {
        read_trajectory(in);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return "no error";
}

} // namespace

TEST_CASE("format_double is shortest round-trip")
{
    StreamRng rng(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const double x = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.uniform() * 40) - 20);
        const auto s = format_double(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(3.0) == "3");
}

TEST_CASE("trajectory files round-trip")
{
    const auto space = flat({"a", "b c"});
    const auto t = traj(space, {{0.1, "a"}, {1.0 / 3.0, "b c"}, {2.0, "a"}}, 2.0);
    std::stringstream io;
    write_trajectory(io, t);
    const auto back = read_trajectory(io);
    CHECK(back.trajectory == t);
    CHECK_FALSE(back.merged.has_value());
}

TEST_CASE("merged trajectory files keep tuple marks")
{
    const auto sa = flat({"a"});
    const auto sb = flat({"b"});
    const Trajectory comps[] = {traj(sa, {{1.0, "a"}, {1.5, "a"}}, 3.0), traj(sb, {{1.0, "b"}}, 3.0)};
    const auto m = merge(comps);
    std::stringstream io;
    write_trajectory(io, m);
    const std::string text = io.str();
    CHECK(text.find(R"(["a","b"])") != std::string::npos);
    CHECK(text.find(R"(["a","0"])") != std::string::npos);
    const auto back = read_trajectory(io);
    REQUIRE(back.merged.has_value());
    CHECK(back.trajectory == m.trajectory);
    CHECK(project(*back.merged, 1) == comps[1]);
}

TEST_CASE("malformed trajectory files report the line")
{
    const std::string header = R"({"schema":"mpplab.trajectory","version":"v1","horizon":2,"marks":["a"]})";
    CHECK(line_error(header + "\n{\"t\":0.5,\"mark\":\"a\"}\n{\"t\":0.4,\"mark\":\"a\"}\n").find("line 3") != std::string::npos);
    CHECK(line_error(header + "\n{\"t\":0.5,\"mark\":\"z\"}\n").find("line 2") != std::string::npos);
    CHECK(line_error(header + "\n{\"t\":0.5,\n").find("line 2") != std::string::npos);
    CHECK(line_error(R"({"schema":"other"})").find("line 1") != std::string::npos);
    CHECK(line_error("").find("line 1") != std::string::npos);
}

TEST_CASE("compensator files round-trip losslessly")
{
    const Model model(fixtures::three_state_cycle(3.0));
    for (std::size_t r = 0; r < 20; ++r) {
        StreamRng rng(2, r);
        const auto comp = model.simulate(rng).compensator;
        std::stringstream io;
        write_compensator(io, comp);
        CHECK(read_compensator(io) == comp);
    }
    const GridBernoulliModel grid(fixtures::disjoint_grid());
    std::stringstream io;
    write_compensator(io, grid.compensator());
    CHECK(read_compensator(io) == grid.compensator());
}

TEST_CASE("paths export as CSV and round-trip as JSON")
{
    const PiecewisePath p(0.5, {{0.0, {1.0, 0, 0, 0}}, {1.0, {-0.25, 0.5, 0, 0}}}, {{0.3, 1.0}, {1.7, -0.1}}, 2.0);
    std::ostringstream csv;
    write_path_csv(csv, p);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "time,value,jump");
    std::size_t rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows >= 5);

    std::stringstream io;
    write_path_json(io, p);
    const auto back = read_path_json(io);
    for (double t : {0.0, 0.3, 1.0, 1.7, 2.0}) CHECK(back.value(t) == p.value(t));
    CHECK(back.jumps().size() == 2);
}
