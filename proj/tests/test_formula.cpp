// ============================================================================
// test_formula.cpp — parser, printer, normalization, closure, transforms
// ============================================================================

#include <doctest.h>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "mtl/formula.hpp"
#include "mtl/poset.hpp"

using namespace mtl;

namespace {

// Deterministic random normalized formulas for round-trip properties.
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

}  // namespace

TEST_SUITE("formula") {

TEST_CASE("parse: grammar basics") {
    FormulaPtr f = parse("F p");
    REQUIRE(f->kind == Kind::Future);
    CHECK(f->left->kind == Kind::Prop);
    CHECK(f->left->name == "p");
    CHECK(equal(parse("Fp"), f));  // no space needed before an ident

    FormulaPtr g = parse("G p");
    CHECK(equal(g, make_neg(make_future(make_neg(make_prop("p"))))));
    CHECK(print(g) == "~F~p");

    FormulaPtr h = parse("H p");
    CHECK(equal(h, make_neg(make_past(make_neg(make_prop("p"))))));

    FormulaPtr imp = parse("p -> F q");
    CHECK(equal(imp, make_or(make_neg(make_prop("p")),
                             make_future(make_prop("q")))));
    CHECK(print(imp) == "~p|Fq");
}

TEST_CASE("parse: precedence and associativity") {
    // unary > & > | > ->
    CHECK(equal(parse("~a & b"),
                normalize(make_and(make_neg(make_prop("a")), make_prop("b")))));
    CHECK(equal(parse("a & b | c"),
                normalize(make_or(make_and(make_prop("a"), make_prop("b")),
                                  make_prop("c")))));
    CHECK(equal(parse("a | b & c"),
                normalize(make_or(make_prop("a"),
                                  make_and(make_prop("b"), make_prop("c"))))));
    // -> is right-associative: a -> b -> c = a -> (b -> c)
    CHECK(equal(parse("a -> b -> c"), parse("a -> (b -> c)")));
    CHECK_FALSE(equal(parse("a -> b -> c"), parse("(a -> b) -> c")));
    // | and & are left-associative
    CHECK(equal(parse("a | b | c"), parse("(a | b) | c")));
    CHECK(equal(parse("a & b & c"), parse("(a & b) & c")));
    // unary operators chain
    CHECK(equal(parse("FFp"), make_future(make_future(make_prop("p")))));
    CHECK(equal(parse("~Fp"), make_neg(make_future(make_prop("p")))));
    CHECK(print(parse("F(a|b)")) == "F(a|b)");
}

TEST_CASE("parse: identifiers may contain uppercase after the first letter") {
    FormulaPtr f = parse("pF");
    REQUIRE(f->kind == Kind::Prop);
    CHECK(f->name == "pF");
    CHECK(parse("fooBar_9")->name == "fooBar_9");
}

TEST_CASE("parse: constants use a fresh witness proposition") {
    FormulaPtr t = parse("true");
    CHECK(equal(t, make_or(make_prop("taut"), make_neg(make_prop("taut")))));
    FormulaPtr f = parse("false");
    // w & ~w normalizes to ~(~w | w)
    CHECK(equal(f, make_neg(make_or(make_neg(make_prop("taut")),
                                    make_prop("taut")))));

    // The witness avoids identifiers that occur anywhere in the input.
    FormulaPtr collide = parse("true | taut");
    CHECK(equal(collide,
                make_or(make_or(make_prop("taut0"), make_neg(make_prop("taut0"))),
                        make_prop("taut"))));
    FormulaPtr collide2 = parse("taut0 & true & taut");
    std::vector<std::string> names = props_in(collide2);
    CHECK(std::find(names.begin(), names.end(), "taut1") != names.end());

    // Both constants in one formula share one witness.
    FormulaPtr both = parse("true | false");
    CHECK(props_in(both) == std::vector<std::string>{"taut"});
}

TEST_CASE("parse: errors carry positions") {
    auto pos_of = [](const std::string& text) -> std::size_t {
        try {
            parse(text);
        } catch (const ParseError& e) {
            return e.position;
        }
        FAIL("expected ParseError for: ", text);
        return static_cast<std::size_t>(-1);
    };
    CHECK(pos_of("") == 0);
    CHECK(pos_of("p q") == 2);       // trailing input
    CHECK(pos_of("(p") == 2);        // missing ')'
    CHECK(pos_of(")") == 0);
    CHECK(pos_of("p |") == 3);       // missing operand
    CHECK(pos_of("p - q") == 2);     // '-' without '>'
    CHECK(pos_of("Q") == 0);         // bad start character
    CHECK(pos_of("p & @") == 4);
    CHECK(pos_of("~") == 1);
}

TEST_CASE("normalize collapses double negation and is idempotent") {
    FormulaPtr raw = make_neg(make_neg(make_prop("p")));
    CHECK(equal(normalize(raw), make_prop("p")));
    CHECK(is_normalized(normalize(raw)));
    CHECK_FALSE(is_normalized(raw));

    FormulaPtr quad = make_neg(make_neg(make_neg(make_neg(make_prop("p")))));
    CHECK(equal(normalize(quad), make_prop("p")));

    FormulaPtr nested = make_future(make_neg(make_neg(make_or(
        make_prop("a"), make_neg(make_neg(make_prop("b")))))));
    FormulaPtr n = normalize(nested);
    CHECK(equal(n, make_future(make_or(make_prop("a"), make_prop("b")))));
    CHECK(equal(normalize(n), n));
}

TEST_CASE("print: minimal parentheses") {
    CHECK(print(parse("a|b|c")) == "a|b|c");
    CHECK(print(parse("a|(b|c)")) == "a|(b|c)");
    CHECK(print(parse("~(a|b)")) == "~(a|b)");
    CHECK(print(parse("~a|b")) == "~a|b");
    CHECK(print(parse("FFp")) == "FFp");
    CHECK(print(parse("PFp")) == "PFp");
    CHECK(print(parse("Gp")) == "~F~p");
    CHECK(print(parse("Hp")) == "~P~p");
    CHECK(print(parse("a & b")) == "~(~a|~b)");
}

TEST_CASE("parse(print(f)) == f on random normalized formulas") {
    std::mt19937 rng(20260822);
    const std::vector<std::string> props = {"p", "q", "r"};
    for (int i = 0; i < 500; ++i) {
        FormulaPtr f = normalize(random_formula(rng, 4, props));
        const std::string text = print(f);
        FormulaPtr back = parse(text);
        CHECK(equal(back, f));
        CHECK(print(back) == text);
    }
}

TEST_CASE("closure: spec'd sizes") {
    ClosureSet cl_fp = closure(parse("Fp"));
    CHECK(cl_fp.size() == 2);
    CHECK(cl_fp.signed_size() == 4);

    // ~F~p has distinct signed members p, ~p, F~p, ~F~p: two unsigned items.
    ClosureSet cl_gp = closure(parse("Gp"));
    CHECK(cl_gp.size() == 2);
    CHECK(cl_gp.signed_size() == 4);
    CHECK(cl_gp.root().negated);

    ClosureSet cl_or = closure(parse("p|Fp"));
    CHECK(cl_or.size() == 3);
    CHECK(cl_or.signed_size() == 6);
}

TEST_CASE("closure: post-order indices, operand refs, free items") {
    ClosureSet cl = closure(parse("~p|q"));
    REQUIRE(cl.size() == 3);
    CHECK(cl.item(0).kind == Kind::Prop);
    CHECK(cl.item(0).name == "p");
    CHECK(cl.item(1).kind == Kind::Prop);
    CHECK(cl.item(1).name == "q");
    CHECK(cl.item(2).kind == Kind::Or);
    CHECK(cl.item(2).left == SignedRef{0, true});
    CHECK(cl.item(2).right == SignedRef{1, false});
    CHECK(cl.root() == SignedRef{2, false});
    CHECK(cl.free_items() == std::vector<std::uint32_t>{0, 1});

    // Operands always precede the items using them.
    ClosureSet big = closure(parse("F(p|q) | P~p"));
    for (std::uint32_t i = 0; i < big.size(); ++i) {
        const ClosureItem& it = big.item(i);
        if (it.kind == Kind::Or) {
            CHECK(it.left.index < i);
            CHECK(it.right.index < i);
        } else if (it.kind != Kind::Prop) {
            CHECK(it.left.index < i);
        }
    }
}

TEST_CASE("closure: duplicate subformulas are shared") {
    ClosureSet cl = closure(parse("Fp|Fp"));
    CHECK(cl.size() == 3);
    CHECK(cl.item(2).left == SignedRef{1, false});
    CHECK(cl.item(2).right == SignedRef{1, false});

    // ~p and p share one item.
    ClosureSet cl2 = closure(parse("p|~p"));
    CHECK(cl2.size() == 2);
    CHECK(cl2.item(1).left == SignedRef{0, false});
    CHECK(cl2.item(1).right == SignedRef{0, true});
}

TEST_CASE("closure: monotone over subformulas") {
    std::mt19937 rng(7);
    const std::vector<std::string> props = {"p", "q"};
    for (int i = 0; i < 200; ++i) {
        FormulaPtr f = normalize(random_formula(rng, 3, props));
        ClosureSet cf = closure(f);
        // Walk all subtrees; every subtree's closure items occur in cf.
        std::vector<FormulaPtr> stack = {f};
        while (!stack.empty()) {
            FormulaPtr g = stack.back();
            stack.pop_back();
            if (g->left) stack.push_back(g->left);
            if (g->right) stack.push_back(g->right);
            ClosureSet cg = closure(normalize(g));
            for (std::uint32_t k = 0; k < cg.size(); ++k) {
                CHECK(cf.find(cg.item(k).formula).has_value());
            }
        }
    }
}

TEST_CASE("closure: find and strings") {
    ClosureSet cl = closure(parse("Gp"));
    CHECK(cl.find(make_prop("p")).has_value());
    CHECK(cl.find(make_future(make_neg(make_prop("p")))).has_value());
    CHECK_FALSE(cl.find(make_prop("q")).has_value());
    CHECK(cl.item_string(1) == "F~p");
    CHECK(cl.literal_string(SignedRef{1, true}) == "~F~p");
    CHECK(cl.literal_string(SignedRef{0, false}) == "p");
}

TEST_CASE("relativize: definition cases") {
    CHECK(equal(relativize(parse("q"), "p"), parse("p & q")));
    CHECK(equal(relativize(parse("~q"), "p"), parse("p & ~(p & q)")));
    CHECK(equal(relativize(parse("Fq"), "p"), parse("p & F(p & q)")));
    CHECK(equal(relativize(parse("Pq"), "p"), parse("p & P(p & q)")));
    CHECK(equal(relativize(parse("q|r"), "p"), parse("(p&q) | (p&r)")));
    CHECK(is_normalized(relativize(parse("F(q|~r)"), "p")));
    CHECK_THROWS_AS(relativize(parse("p|q"), "p"), std::invalid_argument);
}

TEST_CASE("reflexive_translate: definition cases") {
    CHECK(equal(reflexive_translate(parse("Fp")), parse("p|Fp")));
    CHECK(equal(reflexive_translate(parse("Pq")), parse("q|Pq")));
    CHECK(equal(reflexive_translate(parse("r")), parse("r")));
    // Bottom-up: the inner translation feeds the outer one.
    CHECK(equal(reflexive_translate(parse("FFp")),
                parse("(p|Fp) | F(p|Fp)")));
    CHECK(equal(reflexive_translate(parse("~Fp")), parse("~(p|Fp)")));
}

TEST_CASE("time_reverse: swaps F and P") {
    CHECK(equal(time_reverse(parse("Fp")), parse("Pp")));
    CHECK(equal(time_reverse(parse("p|Pq")), parse("p|Fq")));
    CHECK(equal(time_reverse(parse("r")), parse("r")));
    std::mt19937 rng(99);
    const std::vector<std::string> props = {"p", "q"};
    for (int i = 0; i < 200; ++i) {
        FormulaPtr f = normalize(random_formula(rng, 4, props));
        CHECK(equal(time_reverse(time_reverse(f)), f));
        CHECK(equal(time_reverse(reflexive_translate(f)),
                    reflexive_translate(time_reverse(f))));
    }
}

TEST_CASE("delta: template instantiation") {
    FinitePoset loop = FinitePoset::from_edges({"u"}, {{"u", "u"}});
    CHECK(equal(delta(loop, false), parse("G H u")));
    CHECK(equal(delta(loop, true), parse("G H (u & (u -> Fu & Pu))")));

    FinitePoset chain = FinitePoset::from_edges({"u", "s"}, {{"u", "s"}});
    CHECK(equal(delta(chain, false),
                parse("G H ((u|s) & ~(u&s) & (u->Fs) & (s->Pu)"
                      " & (s->G~u) & (u->H~s))")));
    CHECK(equal(delta(chain, true),
                parse("G H ((u|s) & ~(u&s) & (u->Fs) & (s->Pu)"
                      " & (s->G~u) & (u->H~s)"
                      " & (u->G~u) & (s->G~s))")));

    FinitePoset incomparable = FinitePoset::from_edges({"a", "c"}, {});
    CHECK(equal(delta(incomparable, false),
                parse("G H ((a|c) & ~(a&c)"
                      " & (a->G~c) & (c->H~a) & (c->G~a) & (a->H~c))")));
}

TEST_CASE("delta: validation") {
    CHECK_THROWS_AS(delta(FinitePoset::from_edges({}, {}), false),
                    std::invalid_argument);
    CHECK_THROWS_AS(delta(FinitePoset::from_edges({"Bad"}, {}), false),
                    std::invalid_argument);
    CHECK_THROWS_AS(delta(FinitePoset::from_edges({"true"}, {}), false),
                    std::invalid_argument);
}

TEST_CASE("rho_reduction: reserved names and shape") {
    const auto& reserved = rho_reserved_props();
    CHECK(reserved.size() == 12);
    for (const auto& name : reserved) {
        CHECK_THROWS_AS(rho_reduction(parse(name)), std::invalid_argument);
    }
    CHECK_THROWS_AS(rho_reduction(parse("p | Falpha")), std::invalid_argument);

    FormulaPtr red = rho_reduction(parse("p"));
    CHECK(is_normalized(red));
    CHECK(equal(red, normalize(make_and(delta(square_poset(), true),
                                        parse("alpha & p")))));
    std::vector<std::string> names = props_in(red);
    CHECK(names.size() == 13);  // 12 markers + p
    CHECK(std::find(names.begin(), names.end(), "p") != names.end());

    FormulaPtr red2 = rho_reduction(parse("Fp"));
    CHECK(equal(red2, normalize(make_and(delta(square_poset(), true),
                                         parse("alpha & F(alpha & p)")))));
}

TEST_CASE("formula_size and equality") {
    CHECK(formula_size(parse("p")) == 1);
    CHECK(formula_size(parse("Fp")) == 2);
    CHECK(formula_size(parse("p|q")) == 3);
    CHECK_FALSE(equal(parse("p"), parse("q")));
    CHECK_FALSE(equal(parse("Fp"), parse("Pp")));
    CHECK(equal(parse("  F   p "), parse("Fp")));
}

}  // TEST_SUITE("formula")
