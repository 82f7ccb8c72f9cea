#pragma once
// ============================================================================
// kripke.hpp — Finite Kripke structures and the model checker
// ============================================================================
//
// A KripkeStructure is a finite point set with an arbitrary binary
// accessibility relation and a valuation. It serves as the independent
// semantic oracle of the project: formula evaluation over finite structures
// is simple enough to trust, so properties of the syntactic transformations
// (relativization, frame-description formulas) are checked against it.
//
// KEY DESIGN DECISIONS:
// ─────────────────────
// 1. Undeclared propositions evaluate to false instead of erroring:
//    generated frame-description formulas mention only the poset's points,
//    and harness code routinely evaluates formulas over structures that
//    declare just the propositions they care about.
//
// 2. eval computes each subformula's truth set once per call (memoized per
//    node and point), so deeply nested modalities stay polynomial. A
//    non-memoized reference evaluator in the tests cross-checks it.
//
// 3. The relation is arbitrary (not necessarily transitive); transitive
//    fixtures arrive via FinitePoset and the canonical() adapter, which
//    assigns each point's name as the proposition true exactly there.
//
// ============================================================================

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mtl/formula.hpp"
#include "mtl/poset.hpp"

namespace mtl {

class KripkeStructure {
public:
    // Validates that edges and valuation mention only declared points.
    // Throws std::invalid_argument otherwise (also on duplicate/empty names).
    static KripkeStructure create(
        std::vector<std::string> points,
        const std::vector<std::pair<std::string, std::string>>& edges,
        const std::map<std::string, std::vector<std::string>>& valuation);

    // Relation of the poset; valuation maps each point name to exactly that
    // point.
    static KripkeStructure canonical(const FinitePoset& poset);

    // {"points":[...], "edges":[[a,b],...], "valuation":{"p":[points]}}
    static KripkeStructure from_json(const std::string& text);
    std::string to_json() const;

    std::size_t size() const { return points_.size(); }
    const std::vector<std::string>& points() const { return points_; }
    std::size_t index_of(const std::string& name) const;  // throws if unknown
    bool contains_point(const std::string& name) const;
    bool related(std::size_t a, std::size_t b) const {
        return rel_[a * points_.size() + b] != 0;
    }
    bool prop_true_at(const std::string& prop, std::size_t x) const;

    // f must be normalized; x must be a declared point index.
    bool eval(const FormulaPtr& f, std::size_t x) const;
    // Truth vector for f at every point (one entry per point, 0/1).
    std::vector<std::uint8_t> eval_all(const FormulaPtr& f) const;

    // Substructure induced by the points where prop holds (prop must be
    // declared in the valuation; std::invalid_argument otherwise).
    KripkeStructure relativized(const std::string& prop) const;

private:
    KripkeStructure() = default;

    std::vector<std::string> points_;
    std::vector<std::uint8_t> rel_;  // row-major size()×size()
    std::map<std::string, std::vector<std::uint8_t>> valuation_;  // per point
};

// The fixed frames used by the oracle tests and the containment reduction.
struct BuiltinFrames {
    FinitePoset P1;
    FinitePoset P2;
    FinitePoset SquarePoset;
};
BuiltinFrames builtin_frames();

}  // namespace mtl
