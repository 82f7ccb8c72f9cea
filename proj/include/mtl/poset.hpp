#pragma once
// ============================================================================
// poset.hpp — Finite named points with a transitive binary relation
// ============================================================================
//
// A FinitePoset is a finite list of named points together with a transitive
// binary relation. Individual points may carry a reflexive loop; the relation
// as a whole need not be reflexive or antisymmetric. These objects feed the
// frame-description formula generator (delta) and the finite model checker.
//
// KEY DESIGN DECISIONS:
// ─────────────────────
// 1. Transitivity is validated on every construction path. The JSON loader
//    rejects edge lists that are not already transitively closed, so that
//    serialized posets are unambiguous; the covering-edge builder closes the
//    given edges mechanically (reflexive loops are preserved as given, never
//    invented), because hand-closing fixed fixtures is the main source of
//    transcription errors.
//
// 2. Point order is significant and preserved: generated formulas enumerate
//    points and point pairs in list order, so a poset's identity includes the
//    order in which its points were declared.
//
// 3. The three fixed relations used by the containment reduction and the
//    oracle tests (a 10-point order, a 7-point order, and the 12-point
//    square-with-diagonal relation) are built from covering edges in code.
//
// ============================================================================

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mtl {

class FinitePoset {
public:
    // Builds from an explicit, already transitively closed edge list.
    // Throws std::invalid_argument on empty/duplicate point names, edges with
    // unknown endpoints, or a relation that is not transitively closed.
    static FinitePoset from_edges(
        std::vector<std::string> points,
        const std::vector<std::pair<std::string, std::string>>& edges);

    // Builds from covering edges: transitively closes the given edges, then
    // validates. Reflexive loops survive the closure exactly as given.
    static FinitePoset from_covering_edges(
        std::vector<std::string> points,
        const std::vector<std::pair<std::string, std::string>>& edges);

    std::size_t size() const { return points_.size(); }
    const std::vector<std::string>& points() const { return points_; }
    bool contains(const std::string& name) const;
    std::size_t index_of(const std::string& name) const;  // throws if unknown

    bool related(std::size_t a, std::size_t b) const {
        return rel_[a * points_.size() + b] != 0;
    }
    bool reflexive_point(std::size_t a) const { return related(a, a); }

    // {"points": [...], "edges": [[a,b], ...]} with edges in row-major point
    // order. from_json validates names and transitive closedness.
    std::string to_json() const;
    static FinitePoset from_json(const std::string& text);

private:
    FinitePoset() = default;
    void check_transitive() const;  // throws std::invalid_argument

    std::vector<std::string> points_;
    std::vector<std::uint8_t> rel_;  // row-major adjacency, size()×size()
};

// Fixed relation fixtures (constructed from covering edges on every call):
//
//   p1_poset(): 10 irreflexive points u; p0m..p3m; p0p..p3p; s with
//               u < pim < pip < s for each i.
//   p2_poset(): 7 irreflexive points u; p0,p1; q0,q1,q2; s with
//               u < pi < qj < s.
//   square_poset(): 12 points modelling a closed square with a distinguished
//               diagonal: corners b,l,r,t (irreflexive), open edges
//               eS,eW,eN,eE (reflexive), diagonal halves d1,d2 (irreflexive),
//               interior regions beta below and alpha above (reflexive), with
//               b < {eS,eW} < beta < {d1,d2} < alpha < {eN,eE} < t,
//               eW < l < eN and eS < r < eE.
FinitePoset p1_poset();
FinitePoset p2_poset();
FinitePoset square_poset();

}  // namespace mtl
