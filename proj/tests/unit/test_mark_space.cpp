#include <doctest.h>
#include <mpplab/mark_space.hpp>

#include <stdexcept>

using namespace mpplab;

TEST_CASE("flat space keeps label order and looks up by name")
{
    const auto s = MarkSpace::flat({"a", "b", "c"});
    CHECK(s.size() == 3);
    CHECK(s.arity() == 1);
    CHECK(s.id("b") == MarkId{1});
    CHECK(s.display(MarkId{2}) == "c");
    CHECK_FALSE(s.find(MarkLabel{"z"}).has_value());
    CHECK_THROWS_AS(s.id("z"), std::domain_error);
    CHECK_THROWS_AS(s.label(MarkId{3}), std::domain_error);
}

TEST_CASE("invalid mark spaces are rejected")
{
    CHECK_THROWS_AS(MarkSpace::flat({}), std::invalid_argument);
    CHECK_THROWS_AS(MarkSpace::flat({"a", "a"}), std::invalid_argument);
    CHECK_THROWS_AS(MarkSpace::flat({"0"}), std::invalid_argument);
    CHECK_THROWS_AS(MarkSpace::flat({""}), std::invalid_argument);
    CHECK_THROWS_AS(MarkSpace({{"a", "0"}, {"b"}}), std::invalid_argument);
    CHECK_THROWS_AS(MarkSpace(std::vector<MarkLabel>{{"0", "0"}}), std::invalid_argument);
}

TEST_CASE("tuple marks display with parentheses")
{
    const MarkSpace s({{"a", "0"}, {"0", "b"}, {"a", "b"}});
    CHECK(s.arity() == 2);
    CHECK(s.display(MarkId{2}) == "(a,b)");
    CHECK(s.id(MarkLabel{"0", "b"}) == MarkId{1});
}

TEST_CASE("require_marks reports the offending index")
{
    const auto s = MarkSpace::flat({"a"});
    const MarkId ok[] = {MarkId{0}};
    const MarkId bad[] = {MarkId{0}, MarkId{5}};
    CHECK_NOTHROW(require_marks(s, ok));
    CHECK_THROWS_AS(require_marks(s, bad), std::domain_error);
}
