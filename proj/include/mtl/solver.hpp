// ===========================================================================
// solver.hpp — saturation-based satisfiability over spacetime frames
// ===========================================================================
//
// The decision procedure works inside the finite universe built by
// filtration.hpp.  It computes the least set B of valid boundary maps that
// contains the base maps (in_B0) and is closed under the three production
// rules — joining, limiting and shuffling — then searches B for a
// four-quadrant decomposition around a corner point satisfying the query.
// Frames with an edge of spacetime (half-planes, the closed square) run the
// same saturation and then compose triangular maps or closed rectangles on
// top of it.
//
// KEY DESIGN DECISIONS
// --------------------
// 1. Saturation is deterministic and single-threaded: members are kept in
//    discovery order, every round scans in member-id order, and candidate
//    generation enumerates traces and corners in a fixed order.  Two runs on
//    the same input produce the same member list element for element.
// 2. Every member of B carries a Derivation — which rule produced it and
//    from which premises — so a machine-checkable certificate can be pruned
//    out of the saturated set afterwards.  Join decompositions are recorded
//    even when the result was already a member: the limit rule needs them as
//    split witnesses.
// 3. Join results are re-validated before insertion.  Fitting is seam-local
//    and never compares the two tip pairs, so a join of valid members can
//    fail validity (exactly at the ∂(−) ≤ ∂(+) clause); such results are
//    discarded.
// 4. Candidate generation is bounded: edge traces for base maps, limit
//    targets and shuffle targets are enumerated below/above a tip cluster,
//    corners are prefiltered by the exact validity clause they must satisfy,
//    and the final predicates (in_B0, limit_rel, is_shuffle, validate) have
//    the last word.  Blowing a budget raises BudgetExceeded — the engine
//    refuses rather than guesses.
// 5. valid(f) is decided as sat(¬f): a satisfying configuration for the
//    negation is the counter-model, and its certificate is the refutation.
// ===========================================================================

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mtl/boundary.hpp"
#include "mtl/filtration.hpp"
#include "mtl/formula.hpp"

namespace mtl {

// ---------------------------------------------------------------------------
// Options and frames
// ---------------------------------------------------------------------------

struct SolverOptions {
    // Passed through to the filtration stage.
    std::size_t max_mcs = 4096;
    bool prune = false;
    // Cap on the number of saturated members (B and T each).
    std::size_t max_b = 100000;
    // Cap on enumerated candidate traces per tip cluster.
    std::size_t max_traces = 100000;
    // Wall-clock limit in seconds; 0 disables the clock.
    double max_seconds = 0.0;
};

enum class FrameKind {
    Irr2d,          // (R², <)  — irreflexive two-dimensional spacetime
    Refl2d,         // (R², ≤)  — reflexive closure
    HalfplaneIrr,   // upper half-plane, irreflexive (interval logic L)
    HalfplaneRefl,  // upper half-plane, reflexive  (interval logic LE)
    Square,         // closed unit square
    ContainStrict,  // strict containment frame, via reduction to the square
    Contain,        // reflexive containment frame
};

// Canonical command-line name of a frame ("irr2d", "halfplane-irr", ...).
const char* frame_name(FrameKind frame);

// Parse a frame name; accepts the interval-logic aliases "interval-L" and
// "interval-LE" for the two half-plane frames.
std::optional<FrameKind> frame_from_name(std::string_view name);

enum class Outcome { Sat, Unsat, Valid, NotValid };

const char* outcome_name(Outcome o);

// ---------------------------------------------------------------------------
// Provenance
// ---------------------------------------------------------------------------

// One recorded way of cutting a rail: member `lo` below member `hi` joins
// back to the premise, with the seam at cluster step `cut` of the rail.
struct SplitWitness {
    std::uint32_t cut = 0;
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;
};

// How a member of B was produced.
struct Derivation {
    enum class Rule { Base, Join, Limit, Shuffle };
    Rule rule = Rule::Base;
    // Join: premises[0] ⊕_dir premises[1].  Limit: premises[0] swept in
    // direction dir, with `splits` witnessing every cut of the shared rail.
    Dir dir = Dir::N;
    std::array<std::uint32_t, 2> premises{{0, 0}};
    std::vector<SplitWitness> splits;
    // Shuffle: the part set — closed members of B by id, one-point maps by
    // MCS id.
    std::vector<std::uint32_t> part_members;
    std::vector<McsId> part_points;
};

// Counters describing one saturation run.  join_attempts counts candidate
// pairs that shared a seam signature; recorded_joins counts split witnesses
// captured for later limit steps.
struct SaturationStats {
    std::size_t rounds = 0;
    std::size_t base_count = 0;
    std::size_t join_count = 0;
    std::size_t limit_count = 0;
    std::size_t shuffle_count = 0;
    std::size_t join_attempts = 0;
    std::size_t recorded_joins = 0;
};

// The saturated set B.  Members are valid boundary maps in discovery order;
// origins[i] explains member i from earlier members only.
struct SaturatedSet {
    std::vector<BoundaryMap> members;
    std::vector<Derivation> origins;
    SaturationStats stats;
    std::unordered_map<BoundaryMap, std::uint32_t, BmHash> index;

    std::optional<std::uint32_t> find(const BoundaryMap& bm) const {
        auto it = index.find(bm);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
    std::size_t size() const { return members.size(); }
};

// How a member of T was produced: a base triangle, or τ₁ ⊳ ∂ ⊳ τ₀ with τ₁
// from T, ∂ from B and τ₀ from the base layer T₀.
struct TriDerivation {
    enum class Rule { Base, TriJoin };
    Rule rule = Rule::Base;
    std::uint32_t tau1 = 0;
    std::uint32_t bm = 0;
    std::uint32_t tau0 = 0;
};

struct TriSet {
    std::vector<TriBoundaryMap> members;
    std::vector<TriDerivation> origins;
    std::vector<std::uint32_t> base_ids;  // which members form T₀
    std::unordered_map<TriBoundaryMap, std::uint32_t, TriHash> index;

    std::optional<std::uint32_t> find(const TriBoundaryMap& t) const {
        auto it = index.find(t);
        if (it == index.end()) return std::nullopt;
        return it->second;
    }
    std::size_t size() const { return members.size(); }
};

// ---------------------------------------------------------------------------
// Saturation and search
// ---------------------------------------------------------------------------

// Least set of valid boundary maps containing every base map and closed
// under join, limit and shuffle.  Throws BudgetExceeded on any blown cap.
SaturatedSet saturate_B(const Universe& u, const SolverOptions& opt);

// Least set of valid triangular maps containing T₀ and closed under
// tri_join with a rectangle from B and a base triangle on the right.
TriSet saturate_T(const Universe& u, const SaturatedSet& b,
                  const SolverOptions& opt);

// A four-quadrant decomposition of a boundary map around one corner MCS:
// quads = {SW, SE, NW, NE} member ids, glued (SW ⊕_E SE) ⊕_N (NW ⊕_E NE),
// with `corner` the shared central MCS.
struct FourSquare {
    std::array<std::uint32_t, 4> quads{{0, 0, 0, 0}};
    McsId corner = 0;
};

// Search B for a four-quadrant decomposition of `bm` whose central MCS
// satisfies f (the universe's formula or any closure member, possibly under
// negations).
std::optional<FourSquare> sat_in_boundary(const Universe& u,
                                          const SaturatedSet& b,
                                          const BoundaryMap& bm,
                                          const FormulaPtr& f);

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct SatWitness {
    enum class Shape { Plane, Square, Halfplane };
    Shape shape = Shape::Plane;
    // Always present: the four-quadrant decomposition.  For the square frame
    // the four quadrants are closed members and fs.corner carries the
    // formula; for the half-plane it decomposes the inner rectangle.
    FourSquare fs;
    // Half-plane only: τ₁ ⊳ ∂ ⊳ τ₀ member ids (tau ids into T, hb into B).
    std::uint32_t tau1 = 0;
    std::uint32_t hb = 0;
    std::uint32_t tau0 = 0;
};

struct SolveStats {
    std::size_t closure_items = 0;
    std::size_t mcs_count = 0;
    std::size_t cluster_count = 0;
    std::size_t b_size = 0;
    std::size_t t_size = 0;
    std::size_t rounds = 0;
    double wall_seconds = 0.0;
};

struct SolveResult {
    Outcome outcome;
    FrameKind frame;
    // The query as given, and the formula actually handed to the filtration
    // stage after the frame translation (reflexive closure, containment
    // reduction, negation for validity).  Certificates speak about `solved`.
    FormulaPtr query;
    FormulaPtr solved;
    bool negated;  // true when deciding validity via the negation
    Universe universe;
    SaturatedSet b;
    std::optional<TriSet> t;
    std::optional<SatWitness> witness;
    SolveStats stats;
};

// ---------------------------------------------------------------------------
// Frame procedures
// ---------------------------------------------------------------------------

// Satisfiability over the full plane; `reflexive` switches to (R², ≤) by
// translating the query first.
SolveResult sat_plane(const FormulaPtr& f, bool reflexive,
                      const SolverOptions& opt = {});

// Satisfiability over the upper half-plane (interval logics L / LE).
SolveResult sat_halfplane(const FormulaPtr& f, bool reflexive,
                          const SolverOptions& opt = {});

// Satisfiability over the closed unit square.
SolveResult sat_square(const FormulaPtr& f, const SolverOptions& opt = {});

// Satisfiability over the containment frames, by reduction to the square.
// Throws std::invalid_argument if f mentions a reserved marker proposition.
SolveResult sat_containment(const FormulaPtr& f, bool strict,
                            const SolverOptions& opt = {});

// Satisfiability of f over the given frame.
SolveResult solve(const FormulaPtr& f, FrameKind frame,
                  const SolverOptions& opt = {});

// Validity of f over the given frame, decided through the negation; a
// NotValid result carries the counter-configuration.
SolveResult valid(const FormulaPtr& f, FrameKind frame,
                  const SolverOptions& opt = {});

}  // namespace mtl
