// ============================================================================
// test_poset.cpp — FinitePoset construction, JSON I/O, fixture relations
// ============================================================================

#include <doctest.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "mtl/poset.hpp"

using namespace mtl;

namespace {

bool rel(const FinitePoset& ps, const std::string& a, const std::string& b) {
    return ps.related(ps.index_of(a), ps.index_of(b));
}

}  // namespace

TEST_SUITE("poset") {

TEST_CASE("from_edges validates names and transitivity") {
    CHECK_THROWS_AS(FinitePoset::from_edges({"a", "a"}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FinitePoset::from_edges({"a", ""}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(FinitePoset::from_edges({"a"}, {{"a", "b"}}),
                    std::invalid_argument);
    // a<b<c without a<c is rejected...
    CHECK_THROWS_AS(
        FinitePoset::from_edges({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}),
        std::invalid_argument);
    // ...and accepted once closed.
    FinitePoset ok = FinitePoset::from_edges(
        {"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}});
    CHECK(rel(ok, "a", "c"));
    CHECK_FALSE(rel(ok, "c", "a"));
    CHECK_FALSE(ok.reflexive_point(ok.index_of("a")));
}

TEST_CASE("from_covering_edges closes transitively") {
    FinitePoset ps = FinitePoset::from_covering_edges(
        {"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}});
    CHECK(rel(ps, "a", "c"));
    CHECK(rel(ps, "a", "d"));
    CHECK(rel(ps, "b", "d"));
    CHECK_FALSE(rel(ps, "d", "a"));
    // No reflexive loop is invented by the closure.
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK_FALSE(ps.reflexive_point(i));
    }
    // Declared loops survive it.
    FinitePoset lp = FinitePoset::from_covering_edges(
        {"a", "b"}, {{"a", "a"}, {"a", "b"}});
    CHECK(lp.reflexive_point(lp.index_of("a")));
    CHECK_FALSE(lp.reflexive_point(lp.index_of("b")));
}

TEST_CASE("json round trip and validation") {
    FinitePoset ps = FinitePoset::from_covering_edges(
        {"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"b", "b"}});
    FinitePoset back = FinitePoset::from_json(ps.to_json());
    CHECK(back.points() == ps.points());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        for (std::size_t j = 0; j < ps.size(); ++j) {
            CHECK(back.related(i, j) == ps.related(i, j));
        }
    }

    CHECK_THROWS_AS(FinitePoset::from_json("not json"), std::invalid_argument);
    CHECK_THROWS_AS(FinitePoset::from_json("[1,2]"), std::invalid_argument);
    CHECK_THROWS_AS(FinitePoset::from_json(R"({"points":["a"],"edges":[["a"]]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        FinitePoset::from_json(R"({"points":["a"],"edges":[["a","z"]]})"),
        std::invalid_argument);
    // Serialized relations must arrive transitively closed.
    CHECK_THROWS_AS(
        FinitePoset::from_json(
            R"({"points":["a","b","c"],"edges":[["a","b"],["b","c"]]})"),
        std::invalid_argument);
}

TEST_CASE("index_of and contains") {
    FinitePoset ps = FinitePoset::from_edges({"x", "y"}, {{"x", "y"}});
    CHECK(ps.index_of("x") == 0);
    CHECK(ps.index_of("y") == 1);
    CHECK(ps.contains("x"));
    CHECK_FALSE(ps.contains("z"));
    CHECK_THROWS_AS(ps.index_of("z"), std::invalid_argument);
}

TEST_CASE("fixture: 10-point order") {
    FinitePoset ps = p1_poset();
    REQUIRE(ps.size() == 10);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK_FALSE(ps.reflexive_point(i));
    }
    CHECK(rel(ps, "u", "s"));
    for (int i = 0; i < 4; ++i) {
        const std::string m = "p" + std::to_string(i) + "m";
        const std::string p = "p" + std::to_string(i) + "p";
        CHECK(rel(ps, "u", m));
        CHECK(rel(ps, "u", p));
        CHECK(rel(ps, m, p));
        CHECK(rel(ps, m, "s"));
        CHECK(rel(ps, p, "s"));
        CHECK_FALSE(rel(ps, m, "u"));
        CHECK_FALSE(rel(ps, "s", p));
    }
    // Branches are pairwise incomparable.
    CHECK_FALSE(rel(ps, "p0m", "p1p"));
    CHECK_FALSE(rel(ps, "p2p", "p3m"));
    CHECK_FALSE(rel(ps, "p1p", "p0p"));
}

TEST_CASE("fixture: 7-point order") {
    FinitePoset ps = p2_poset();
    REQUIRE(ps.size() == 7);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK_FALSE(ps.reflexive_point(i));
    }
    CHECK(rel(ps, "u", "s"));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(rel(ps, "p" + std::to_string(i), "q" + std::to_string(j)));
        }
        CHECK(rel(ps, "u", "p" + std::to_string(i)));
        CHECK(rel(ps, "p" + std::to_string(i), "s"));
    }
    CHECK_FALSE(rel(ps, "p0", "p1"));
    CHECK_FALSE(rel(ps, "q0", "q1"));
    CHECK_FALSE(rel(ps, "q2", "p0"));
}

TEST_CASE("fixture: 12-point square relation") {
    FinitePoset ps = square_poset();
    REQUIRE(ps.size() == 12);

    const std::vector<std::string> reflexive = {"eS", "eW", "eN",
                                                "eE", "alpha", "beta"};
    const std::vector<std::string> irreflexive = {"b", "t", "l",
                                                  "r", "d1", "d2"};
    for (const auto& name : reflexive) {
        CHECK(ps.reflexive_point(ps.index_of(name)));
    }
    for (const auto& name : irreflexive) {
        CHECK_FALSE(ps.reflexive_point(ps.index_of(name)));
    }

    // Bottom corner reaches everything; everything reaches the top corner.
    for (const auto& name : ps.points()) {
        if (name != "b") CHECK(rel(ps, "b", name));
        if (name != "t") CHECK(rel(ps, name, "t"));
    }
    // Chains through the interior.
    CHECK(rel(ps, "eW", "l"));
    CHECK(rel(ps, "l", "eN"));
    CHECK(rel(ps, "eS", "r"));
    CHECK(rel(ps, "r", "eE"));
    CHECK(rel(ps, "beta", "alpha"));
    CHECK(rel(ps, "beta", "eN"));
    CHECK(rel(ps, "d1", "eE"));
    CHECK(rel(ps, "eS", "alpha"));
    // Separations.
    CHECK_FALSE(rel(ps, "l", "r"));
    CHECK_FALSE(rel(ps, "r", "l"));
    CHECK_FALSE(rel(ps, "d1", "d2"));
    CHECK_FALSE(rel(ps, "d2", "d1"));
    CHECK_FALSE(rel(ps, "alpha", "beta"));
    CHECK_FALSE(rel(ps, "beta", "l"));
    CHECK_FALSE(rel(ps, "eW", "r"));
    CHECK_FALSE(rel(ps, "eN", "eE"));
    CHECK_FALSE(rel(ps, "alpha", "d1"));
    CHECK_FALSE(rel(ps, "l", "alpha"));
    CHECK_FALSE(rel(ps, "alpha", "l"));
}

}  // TEST_SUITE("poset")
