// ============================================================================
// test_kripke.cpp — evaluation semantics, relativization, frame descriptions
// ============================================================================

#include <doctest.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "mtl/formula.hpp"
#include "mtl/kripke.hpp"
#include "mtl/poset.hpp"

using namespace mtl;

namespace {

// Plain recursive evaluator, no memoization: the semantics spelled out once
// more, independently, as a cross-check.
bool ref_eval(const KripkeStructure& s, const FormulaPtr& f, std::size_t x) {
    switch (f->kind) {
        case Kind::Prop:
            return s.prop_true_at(f->name, x);
        case Kind::Neg:
            return !ref_eval(s, f->left, x);
        case Kind::Or:
            return ref_eval(s, f->left, x) || ref_eval(s, f->right, x);
        case Kind::Future:
            for (std::size_t y = 0; y < s.size(); ++y) {
                if (s.related(x, y) && ref_eval(s, f->left, y)) return true;
            }
            return false;
        case Kind::Past:
            for (std::size_t y = 0; y < s.size(); ++y) {
                if (s.related(y, x) && ref_eval(s, f->left, y)) return true;
            }
            return false;
    }
    return false;
}

FormulaPtr random_formula(std::mt19937& rng, int depth,
                          const std::vector<std::string>& props) {
    std::uniform_int_distribution<int> pick(0, depth == 0 ? 0 : 4);
    switch (pick(rng)) {
        case 0: {
            std::uniform_int_distribution<std::size_t> p(0, props.size() - 1);
            return make_prop(props[p(rng)]);
        }
        case 1: return make_neg(random_formula(rng, depth - 1, props));
        case 2: return make_or(random_formula(rng, depth - 1, props),
                               random_formula(rng, depth - 1, props));
        case 3: return make_future(random_formula(rng, depth - 1, props));
        default: return make_past(random_formula(rng, depth - 1, props));
    }
}

// Random structure over named points w0..w{n-1} with the given propositions.
KripkeStructure random_structure(std::mt19937& rng, std::size_t n,
                                 const std::vector<std::string>& props,
                                 double edge_prob = 0.35) {
    std::vector<std::string> points;
    for (std::size_t i = 0; i < n; ++i) points.push_back("w" + std::to_string(i));
    std::bernoulli_distribution edge(edge_prob);
    std::bernoulli_distribution holds(0.5);
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (edge(rng)) edges.emplace_back(points[a], points[b]);
        }
    }
    std::map<std::string, std::vector<std::string>> valuation;
    for (const auto& p : props) {
        std::vector<std::string> where;
        for (const auto& w : points) {
            if (holds(rng)) where.push_back(w);
        }
        valuation[p] = where;
    }
    return KripkeStructure::create(points, edges, valuation);
}

// Random transitive relation: random edges, transitively closed; optional
// loops are applied after closure (adding loops keeps transitivity).
FinitePoset random_transitive_poset(std::mt19937& rng, std::size_t n,
                                    double loop_prob) {
    std::vector<std::string> points;
    for (std::size_t i = 0; i < n; ++i) points.push_back("v" + std::to_string(i));
    std::bernoulli_distribution edge(0.3);
    std::bernoulli_distribution loop(loop_prob);
    std::vector<std::pair<std::string, std::string>> cover;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {  // acyclic base
            if (edge(rng)) cover.emplace_back(points[a], points[b]);
        }
        if (loop(rng)) cover.emplace_back(points[a], points[a]);
    }
    return FinitePoset::from_covering_edges(points, cover);
}

}  // namespace

TEST_SUITE("kripke") {

TEST_CASE("eval: chain semantics") {
    KripkeStructure s = KripkeStructure::create(
        {"u", "s"}, {{"u", "s"}}, {{"p", {"s"}}});
    CHECK(s.eval(parse("Fp"), s.index_of("u")));
    CHECK_FALSE(s.eval(parse("Pp"), s.index_of("u")));
    CHECK(s.eval(parse("p"), s.index_of("s")));
    CHECK_FALSE(s.eval(parse("p"), s.index_of("u")));
    CHECK(s.eval(parse("Pq | ~q"), s.index_of("u")));  // undeclared q: false
    CHECK(s.eval(parse("G p"), s.index_of("u")));
    CHECK(s.eval(parse("G p"), s.index_of("s")));  // vacuous: s has no successor
    CHECK(s.eval(parse("H ~p"), s.index_of("s")));
    CHECK_FALSE(s.eval(parse("F true"), s.index_of("s")));
}

TEST_CASE("eval: undeclared point index throws") {
    KripkeStructure s = KripkeStructure::create({"u"}, {}, {});
    CHECK_THROWS_AS(s.eval(parse("p"), 3), std::invalid_argument);
}

TEST_CASE("create validates input") {
    CHECK_THROWS_AS(KripkeStructure::create({"a", "a"}, {}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(KripkeStructure::create({"a"}, {{"a", "z"}}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(KripkeStructure::create({"a"}, {}, {{"p", {"z"}}}),
                    std::invalid_argument);
}

TEST_CASE("eval agrees with the non-memoized reference") {
    std::mt19937 rng(424242);
    const std::vector<std::string> props = {"p", "q"};
    std::uniform_int_distribution<std::size_t> size_dist(1, 8);
    for (int i = 0; i < 500; ++i) {
        KripkeStructure s = random_structure(rng, size_dist(rng), props);
        FormulaPtr f = normalize(random_formula(rng, 4, props));
        for (std::size_t x = 0; x < s.size(); ++x) {
            CHECK(s.eval(f, x) == ref_eval(s, f, x));
        }
    }
}

TEST_CASE("relativized: edge cases") {
    KripkeStructure s = KripkeStructure::create(
        {"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}},
        {{"p", {"a", "b", "c"}}, {"q", {"b"}}});

    KripkeStructure all = s.relativized("p");
    CHECK(all.size() == 3);
    CHECK(all.related(all.index_of("a"), all.index_of("b")));
    CHECK(all.prop_true_at("q", all.index_of("b")));

    KripkeStructure none = s.relativized("q");
    CHECK(none.size() == 1);
    CHECK(none.points()[0] == "b");
    CHECK_FALSE(none.related(0, 0));

    KripkeStructure empty = KripkeStructure::create(
        {"a"}, {}, {{"p", {}}}).relativized("p");
    CHECK(empty.size() == 0);

    CHECK_THROWS_AS(s.relativized("nope"), std::invalid_argument);
}

TEST_CASE("relativisation lemma on random structures") {
    std::mt19937 rng(777);
    const std::vector<std::string> props = {"q", "r", "g"};
    std::uniform_int_distribution<std::size_t> size_dist(1, 6);
    int checked_points = 0;
    for (int i = 0; i < 500; ++i) {
        KripkeStructure s = random_structure(rng, size_dist(rng),
                                             {"q", "r", "g", "p"});
        FormulaPtr f = normalize(random_formula(rng, 3, props));
        FormulaPtr fp = relativize(f, "p");
        KripkeStructure sub = s.relativized("p");
        for (std::size_t x = 0; x < s.size(); ++x) {
            if (!s.prop_true_at("p", x)) continue;
            const std::size_t sx = sub.index_of(s.points()[x]);
            CHECK(s.eval(fp, x) == sub.eval(f, sx));
            ++checked_points;
        }
    }
    CHECK(checked_points > 500);
}

TEST_CASE("frame description true under the canonical valuation") {
    std::mt19937 rng(31337);
    std::uniform_int_distribution<std::size_t> size_dist(1, 5);
    std::uniform_real_distribution<double> loop_prob(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        FinitePoset ps = random_transitive_poset(rng, size_dist(rng),
                                                 loop_prob(rng));
        KripkeStructure s = KripkeStructure::canonical(ps);
        const auto truth = s.eval_all(delta(ps, false));
        for (std::size_t x = 0; x < s.size(); ++x) CHECK(truth[x]);
        const auto truth_plus = s.eval_all(delta(ps, true));
        for (std::size_t x = 0; x < s.size(); ++x) CHECK(truth_plus[x]);
    }
}

TEST_CASE("frame description ignores loops; the strengthened form does not") {
    std::mt19937 rng(5150);
    for (int i = 0; i < 50; ++i) {
        FinitePoset ps = random_transitive_poset(rng, 4, 0.5);
        FormulaPtr d = delta(ps, false);

        // Same relation with all loops present / all loops absent.
        std::vector<std::pair<std::string, std::string>> edges;
        std::vector<std::pair<std::string, std::string>> edges_with;
        for (std::size_t a = 0; a < ps.size(); ++a) {
            for (std::size_t b = 0; b < ps.size(); ++b) {
                if (ps.related(a, b) && a != b) {
                    edges.emplace_back(ps.points()[a], ps.points()[b]);
                    edges_with.emplace_back(ps.points()[a], ps.points()[b]);
                }
            }
            edges_with.emplace_back(ps.points()[a], ps.points()[a]);
        }
        std::map<std::string, std::vector<std::string>> val;
        for (const auto& name : ps.points()) val[name] = {name};

        KripkeStructure bare = KripkeStructure::create(ps.points(), edges, val);
        KripkeStructure loopy =
            KripkeStructure::create(ps.points(), edges_with, val);
        for (std::size_t x = 0; x < ps.size(); ++x) {
            CHECK(bare.eval(d, x));
            CHECK(loopy.eval(d, x));
        }
    }

    // delta(·, true) separates the loopless from the fully-looped structure
    // (a lone point would not: an empty relation satisfies any G/H formula
    // vacuously, so a chain is needed to expose the missing loops).
    FinitePoset loops = FinitePoset::from_edges(
        {"u", "s"}, {{"u", "u"}, {"u", "s"}, {"s", "s"}});
    FormulaPtr d_plus = delta(loops, true);
    KripkeStructure with_loops = KripkeStructure::canonical(loops);
    CHECK(with_loops.eval(d_plus, with_loops.index_of("u")));
    CHECK(with_loops.eval(d_plus, with_loops.index_of("s")));
    KripkeStructure without = KripkeStructure::create(
        {"u", "s"}, {{"u", "s"}}, {{"u", {"u"}}, {"s", {"s"}}});
    CHECK_FALSE(without.eval(d_plus, without.index_of("u")));
}

TEST_CASE("builtin frames satisfy their own descriptions") {
    BuiltinFrames frames = builtin_frames();
    CHECK(frames.P1.size() == 10);
    CHECK(frames.P2.size() == 7);
    CHECK(frames.SquarePoset.size() == 12);
    CHECK(frames.P2.related(frames.P2.index_of("u"), frames.P2.index_of("s")));

    KripkeStructure s1 = KripkeStructure::canonical(frames.P1);
    const auto t1 = s1.eval_all(delta(frames.P1, false));
    for (std::size_t x = 0; x < s1.size(); ++x) CHECK(t1[x]);

    KripkeStructure s2 = KripkeStructure::canonical(frames.P2);
    const auto t2 = s2.eval_all(delta(frames.P2, false));
    for (std::size_t x = 0; x < s2.size(); ++x) CHECK(t2[x]);

    KripkeStructure sq = KripkeStructure::canonical(frames.SquarePoset);
    const auto tq = sq.eval_all(delta(frames.SquarePoset, true));
    for (std::size_t x = 0; x < sq.size(); ++x) CHECK(tq[x]);
}

TEST_CASE("json round trip") {
    KripkeStructure s = KripkeStructure::create(
        {"a", "b"}, {{"a", "b"}, {"b", "b"}}, {{"p", {"a"}}, {"q", {}}});
    KripkeStructure back = KripkeStructure::from_json(s.to_json());
    CHECK(back.points() == s.points());
    CHECK(back.related(0, 1));
    CHECK(back.related(1, 1));
    CHECK_FALSE(back.related(0, 0));
    CHECK(back.prop_true_at("p", 0));
    CHECK_FALSE(back.prop_true_at("p", 1));
    CHECK(back.to_json() == s.to_json());

    CHECK_THROWS_AS(KripkeStructure::from_json("nope"), std::invalid_argument);
    CHECK_THROWS_AS(KripkeStructure::from_json(R"({"points":[1]})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        KripkeStructure::from_json(R"({"points":["a"],"edges":[["a"]]})"),
        std::invalid_argument);
}

}  // TEST_SUITE("kripke")
