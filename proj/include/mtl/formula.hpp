#pragma once
// ============================================================================
// formula.hpp — Temporal formulas: AST, parser, printer, closure, transforms
// ============================================================================
//
// Formulas are built from propositional atoms with negation (~), disjunction
// (|), a future modality (F) and a past modality (P). Everything else in the
// concrete syntax — &, ->, G, H, true, false — is sugar that is expanded
// before any other component sees the formula.
//
// KEY DESIGN DECISIONS:
// ─────────────────────
// 1. Normal form: the AST after normalization contains no double negation and
//    only the four primitive connectives. parse() always returns normalized
//    trees; every downstream component (closure, filtration, solver) assumes
//    and asserts this form.
//
// 2. "true" is encoded as (w | ~w) and "false" as ~(~w | w) over a fresh
//    witness proposition w chosen per parse: "taut" if unused in the input,
//    otherwise "taut0", "taut1", ... The choice is deterministic, so equal
//    inputs parse to equal trees.
//
// 3. The printer emits minimal parentheses and round-trips: for every
//    normalized f, parse(print(f)) is structurally equal to f. Since the
//    printed string determines the tree, it doubles as the dedup key for
//    closure-set construction.
//
// 4. A ClosureSet stores only unsigned subformulas (negation lives in a
//    polarity bit on references). Items are listed in dedup'd post-order, so
//    every item's operands have strictly smaller indices; items that are not
//    disjunctions (atoms and modal formulas) are the "free" items whose
//    polarities determine a maximal consistent set.
//
// ============================================================================

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtl/poset.hpp"

namespace mtl {

// ============================================================================
// AST
// ============================================================================

enum class Kind : std::uint8_t { Prop, Neg, Or, Future, Past };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    Kind kind;
    std::string name;  // Prop only
    FormulaPtr left;   // Neg/Future/Past child; Or left operand
    FormulaPtr right;  // Or right operand
};

// Primitive node factories.
FormulaPtr make_prop(std::string name);
FormulaPtr make_neg(FormulaPtr f);
FormulaPtr make_or(FormulaPtr l, FormulaPtr r);
FormulaPtr make_future(FormulaPtr f);
FormulaPtr make_past(FormulaPtr f);

// Sugar factories; they expand immediately into the primitives above and may
// introduce double negations (run normalize() on the final tree).
FormulaPtr make_and(FormulaPtr l, FormulaPtr r);      // ~(~l | ~r)
FormulaPtr make_implies(FormulaPtr l, FormulaPtr r);  // ~l | r
FormulaPtr make_always(FormulaPtr f);                 // ~F~f
FormulaPtr make_hist(FormulaPtr f);                   // ~P~f

bool equal(const FormulaPtr& a, const FormulaPtr& b);
bool is_normalized(const FormulaPtr& f);
std::size_t formula_size(const FormulaPtr& f);  // node count

// Collapses every double negation; idempotent.
FormulaPtr normalize(FormulaPtr f);

// Minimal-parentheses concrete syntax (| is the only infix operator left
// after normalization; operands of ~/F/P and right operands of | are
// parenthesized exactly when they are disjunctions).
std::string print(const FormulaPtr& f);

// Sorted, deduplicated proposition names occurring in f.
std::vector<std::string> props_in(const FormulaPtr& f);

// ============================================================================
// Parser
// ============================================================================

struct ParseError : std::runtime_error {
    std::size_t position;  // byte offset into the input
    ParseError(const std::string& msg, std::size_t pos);
};

// Concrete syntax:
//   f := ident | "~"f | "F"f | "P"f | "G"f | "H"f | "("f")"
//      | f"&"f | f"|"f | f"->"f | "true" | "false"
// precedence: unary > & > | > -> ; "->" right-associative, "&"/"|" left-
// associative; ident = [a-z][a-zA-Z0-9_]*. Returns the normalized AST.
// Throws ParseError (with byte position) on malformed input.
FormulaPtr parse(const std::string& text);

// ============================================================================
// Closure sets
// ============================================================================

struct SignedRef {
    std::uint32_t index = 0;
    bool negated = false;

    friend bool operator==(const SignedRef& a, const SignedRef& b) {
        return a.index == b.index && a.negated == b.negated;
    }
};

struct ClosureItem {
    Kind kind;         // Prop, Or, Future or Past — never Neg
    std::string name;  // Prop only
    SignedRef left;    // Or left operand / modal operand
    SignedRef right;   // Or right operand
    FormulaPtr formula;  // the item as a positive formula
};

class ClosureSet {
public:
    explicit ClosureSet(const FormulaPtr& f);  // f must be normalized

    std::size_t size() const { return items_.size(); }
    std::size_t signed_size() const { return 2 * items_.size(); }
    const ClosureItem& item(std::uint32_t i) const { return items_[i]; }
    SignedRef root() const { return root_; }

    // Indices of atoms and modal items in increasing order; their polarities
    // freely determine a maximal consistent set (disjunction polarities are
    // derived).
    const std::vector<std::uint32_t>& free_items() const { return free_items_; }

    std::optional<std::uint32_t> find(const FormulaPtr& positive) const;

    std::string item_string(std::uint32_t i) const;
    std::string literal_string(SignedRef r) const;

private:
    SignedRef add(const FormulaPtr& f);

    std::vector<ClosureItem> items_;
    std::unordered_map<std::string, std::uint32_t> index_;  // print key → index
    SignedRef root_;
    std::vector<std::uint32_t> free_items_;
};

inline ClosureSet closure(const FormulaPtr& f) { return ClosureSet(f); }

// ============================================================================
// Syntactic transformations
// ============================================================================

// Relativization f_p: q ↦ p&q, ~a ↦ p&~(a_p), a|b ↦ a_p|b_p, Fa ↦ p&F(a_p),
// Pa ↦ p&P(a_p). Requires p not to occur in f (std::invalid_argument).
// Returns a normalized tree.
FormulaPtr relativize(const FormulaPtr& f, const std::string& prop);

// Replaces, bottom-up, every F-subformula Fa by (a|Fa) and every Pa by
// (a|Pa); the satisfiability of the result over the irreflexive plane matches
// satisfiability of the input over the reflexive plane.
FormulaPtr reflexive_translate(const FormulaPtr& f);

// Swaps every F with P. Satisfiability is invariant under this swap because
// (x,y) ↦ (-x,-y) reverses the spacetime order.
FormulaPtr time_reverse(const FormulaPtr& f);

// The frame-description formula of a finite transitive relation: under its
// canonical valuation (each point true exactly at itself) it pins models to
// look locally like the relation. plus=true appends per-point conjuncts
// p -> G~p (irreflexive p) / p -> (Fp & Pp) (reflexive p) inside the G/H
// scope. Point names must be valid proposition identifiers.
FormulaPtr delta(const FinitePoset& poset, bool plus);

// Reserved marker propositions of the containment reduction (the point names
// of square_poset()).
const std::vector<std::string>& rho_reserved_props();

// Containment-frame reduction: delta(square_poset(), true) & relativize(f,
// "alpha"). Throws std::invalid_argument when f mentions a reserved marker.
FormulaPtr rho_reduction(const FormulaPtr& f);

}  // namespace mtl
