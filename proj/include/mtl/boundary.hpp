#pragma once
// ============================================================================
// boundary.hpp — Boundary maps over a filtration universe
// ============================================================================
//
// A boundary map describes everything a rectangle of spacetime shows on its
// boundary: a trace along each edge (N/S/E/W), an MCS at each corner
// (t/l/r/b), and the two clusters realized at its lower-left (−) and
// upper-right (+) tips. One-point maps — a single MCS seen from every side —
// are the degenerate companions used as shuffle parts. Triangular maps
// describe half-plane boundaries: at most a North edge, a West edge and the
// corner between them.
//
// Corner/edge geometry (x grows East, y grows North):
//     l ──N── t
//     │       │
//     W       E        b=(xmin,ymin) r=(xmax,ymin) l=(xmin,ymax) t=(xmax,ymax)
//     │       │        N: l→t   S: b→r   W: b→l   E: r→t
//     b ──S── r
//
// KEY DESIGN DECISIONS:
// ─────────────────────
// 1. Partial-function convention: an equality between optional components
//    holds when both are defined and equal or both are undefined. Fit checks
//    between two maps additionally require each pair of edges to be
//    concatenated to be both-defined (with the shared seam corner defined and
//    the cluster-order side conditions of the concatenation met) or
//    both-undefined. Self-abutment (the limit/split precondition) instead
//    asks only for the axis equalities plus a single-cluster condition on
//    the trailing perpendicular edge of the limit direction — the leading
//    edge is about to be replaced and stays unconstrained.
//
// 2. Validity requires ∂(−) ≤ ∂(+). The height of a map is the
//    edge-length of the longest strictly increasing cluster chain between
//    them, so a well-defined height presupposes the comparison.
//
// 3. join returns nullopt exactly when fits fails. Fitting is seam-local:
//    it never compares the two tip pairs, so the glued map can fail
//    validity — though only at the ∂(−) ≤ ∂(+) clause, since every other
//    clause chains across the seam equalities. Callers that collect joined
//    maps must therefore re-validate (the solver does; the certificate
//    verifier re-checks everything anyway).
//
// 4. transpose (mirror across the main diagonal) and reverse (rotate by
//    180°, i.e. swap the roles of future and past) are pure index shuffles:
//    the time-reversed formula produces a universe with identical MCS ids
//    and transposed order, so reversed maps live in it without translation.
//
// 5. Predicates take the universe explicitly and never store it; maps are
//    small copyable values. Ids out of range make validate return false
//    rather than fault, so hostile certificate input degrades to "invalid".
//
// ============================================================================

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "mtl/filtration.hpp"

namespace mtl {

enum class Dir : std::uint8_t { N = 0, S = 1, E = 2, W = 3 };
enum class Corn : std::uint8_t { T = 0, L = 1, R = 2, B = 3 };
enum class Axis : std::uint8_t { Horiz, Vert };

struct BoundaryMap {
    bool is_point = false;
    McsId point_mcs = 0;  // one-point maps only

    // Proper maps only: edges indexed by Dir, corners by Corn.
    std::array<std::optional<Trace>, 4> edges;
    std::array<std::optional<McsId>, 4> corners;
    ClusterId minus = 0;
    ClusterId plus = 0;

    static BoundaryMap point(McsId m);
    static BoundaryMap open(ClusterId minus, ClusterId plus);

    const std::optional<Trace>& edge(Dir d) const {
        return edges[static_cast<std::size_t>(d)];
    }
    std::optional<Trace>& edge(Dir d) {
        return edges[static_cast<std::size_t>(d)];
    }
    const std::optional<McsId>& corner(Corn c) const {
        return corners[static_cast<std::size_t>(c)];
    }
    std::optional<McsId>& corner(Corn c) {
        return corners[static_cast<std::size_t>(c)];
    }

    // Proper with every edge and corner defined.
    bool closed_proper() const;
    // Proper with no edge and no corner defined.
    bool is_open() const;

    friend bool operator==(const BoundaryMap& a, const BoundaryMap& b);
};

std::size_t hash_bm(const BoundaryMap& bm);

struct BmHash {
    std::size_t operator()(const BoundaryMap& bm) const {
        return hash_bm(bm);
    }
};

// An unsatisfied modal obligation of a map, with the component that owns it.
struct BmDefect {
    std::uint32_t item;
    bool future;
    Node carrier;

    friend bool operator==(const BmDefect& a, const BmDefect& b) {
        return a.item == b.item && a.future == b.future &&
               a.carrier == b.carrier;
    }
};

// ---------------------------------------------------------------------------
// Rectangular predicates and operations
// ---------------------------------------------------------------------------

// One-point maps: the MCS must exist and be alive. Proper maps: domain shape
// (a corner is defined exactly when both adjacent edges are), valid traces
// and live corners, ∂(−) ≤ ∂(+), defect discharge for −/+ into the adjacent
// edges, the corner/edge sandwich conditions, and their mirror images.
bool validate(const Universe& u, const BoundaryMap& bm);

// Obligations the map leaves open to the outside, with carriers: for a
// one-point map all defects of its MCS; for a proper map the past defects of
// b, of the S/W traces not discharged into b, of l not discharged into the
// final cluster of W, of r not discharged into the final cluster of S — and
// the future duals (t; N/E traces vs t; l vs initial cluster of N; r vs
// initial cluster of E).
std::vector<BmDefect> bm_defects(const Universe& u, const BoundaryMap& bm);

// Longest-chain distance from ∂(−) to ∂(+); 0 for one-point maps.
std::uint32_t height(const Universe& u, const BoundaryMap& bm);

// fits(u, a, b, N): b fits to the North of a (a below, b on top); E: b to
// the East of a. S and W are the converses: fits(a,b,S) = fits(b,a,N).
// Both maps must be proper, and the seam edge must be defined (gluing two
// distinct maps without a recorded seam has no soundness witness).
bool fits(const Universe& u, const BoundaryMap& a, const BoundaryMap& b,
          Dir d);

// Self-abutment in direction d, the precondition of limits and splits: the
// map's two seam-axis edges (W and E for a horizontal sweep, S and N for a
// vertical one) must both be recorded and equal — abutting two copies
// requires the shared seam — the seam's two corner pairs agree under the
// partial convention (r=b and t=l for horizontal; l=b and t=r for
// vertical), and both perpendicular edges close up across the seam: each,
// when defined, is a single-cluster trace whose seam corner is defined and
// lies inside that cluster. The W and E forms coincide, as do S and N.
bool self_fits(const Universe& u, const BoundaryMap& bm, Dir d);

// nullopt exactly when fits fails. join(a,b,N) stacks b on top of a: the
// seam (a's N = b's S, with its corners) disappears, the W/E edges
// concatenate through a(l)/a(t), the result keeps a's bottom and b's top
// components, −=a(−), +=b(+).
std::optional<BoundaryMap> join(const Universe& u, const BoundaryMap& a,
                                const BoundaryMap& b, Dir d);

// The one-step limit relation in direction d: bm must self-abut in
// direction d; target must agree with bm except on the d-side triple (W:
// {W,b,l}; E: {E,t,r}; S: {S,b,r}; N: {N,t,l}); target must be valid;
// target's d-edge (when defined) must lie entirely below ∂(−) (W/S) or above
// ∂(+) (E/N) with its outward trace-defects discharged into the adjacent
// corner or tip; and every obligation in the sweep polarity carried by the
// boundary data the tower of copies repeats — the seam trace, and the edge
// cluster and seam corner of the flank the copies slide along — must be
// discharged by data surviving into the target (the opposite flank, a tip,
// the replacement edge's far end or its corner next to the repeated flank,
// or an operand occurrence on the seam itself).
bool limit_rel(const Universe& u, const BoundaryMap& bm,
               const BoundaryMap& target, Dir d);

// Witness that bm (self-fitting: W-form for horiz, S-form for vert) splits
// at cut i of its shared W=E trace (horiz) / S=N trace (vert) into
// bm = lo ⊕_N hi (horiz) /
// lo ⊕_E hi (vert), where on one side of the seam the cut edges are
// prefixes (c₀..c_j), (c₀..c_j′) of the shared trace with j ≤ i < j′, or on
// the other side suffixes (c_j..c_k), (c_j′..c_k). False (not an error) on
// an out-of-range cut index.
bool split(const Universe& u, const BoundaryMap& bm, Axis axis,
           std::size_t i, const BoundaryMap& lo, const BoundaryMap& hi);

// Dense interleaving of closed parts strictly between ∂(−) and ∂(+). Parts
// must be closed (full-domain proper or one-point; asserted) and contain at
// least one one-point map; every part sits between the tip clusters, the tip
// clusters discharge their defects into some part, every part discharges its
// own leftover defects into the tips, and the outer edges (when defined)
// stay outside the open interval with their trace-defects discharged.
bool is_shuffle(const Universe& u, const BoundaryMap& bm,
                const std::vector<BoundaryMap>& parts);

// Base maps: valid, ∂(−)=∂(+)=c, southern/western data below c and
// northern/eastern data above c, with edge trace-defects discharged into the
// adjacent corner or into c.
bool in_B0(const Universe& u, const BoundaryMap& bm);

// Mirror across the main diagonal: swaps N↔E, S↔W, l↔r; t, b, −, + fixed;
// trace direction is preserved.
BoundaryMap transpose(const BoundaryMap& bm);

// Rotate by 180° (time reversal): swaps N↔S and E↔W with each trace reversed,
// t↔b, l↔r, −↔+. The result lives in the universe of the time-reversed
// formula (which shares ids with the original).
BoundaryMap reverse_map(const BoundaryMap& bm);

// ---------------------------------------------------------------------------
// Triangular maps
// ---------------------------------------------------------------------------

struct TriBoundaryMap {
    std::optional<Trace> n;  // North edge
    std::optional<Trace> w;  // West edge
    std::optional<McsId> l;  // corner between them
    ClusterId minus = 0;
    ClusterId plus = 0;

    static TriBoundaryMap open(ClusterId minus, ClusterId plus);

    friend bool operator==(const TriBoundaryMap& a, const TriBoundaryMap& b);
};

std::size_t hash_tri(const TriBoundaryMap& t);

struct TriHash {
    std::size_t operator()(const TriBoundaryMap& t) const {
        return hash_tri(t);
    }
};

// Legal domain (l defined exactly when both N and W are), valid live
// components, τ(−) ≤ τ(+), future defects of τ(+) discharged into the final
// cluster of τ(N), past defects of τ(−) into the initial cluster of τ(W)
// (undefined receiver ⟹ no defects allowed), τ(+) ≤ final cluster of τ(N)
// and initial cluster of τ(W) ≤ τ(−) when defined, and W ≤ l ≤ N
// elementwise when l is defined.
bool tri_validate(const Universe& u, const TriBoundaryMap& t);

// Base triangular maps: τ(−)=τ(+)=c; τ(N) ≥ c elementwise with its past
// trace-defects discharged into τ(l) or c; τ(W) ≤ c elementwise with its
// future trace-defects discharged into τ(l) or c.
bool in_T0(const Universe& u, const TriBoundaryMap& t);

// Fill-in composition: bm (with S and E defined) glued between t1 (below,
// t1(N)=bm(S), t1(l)=bm(b)) and t2 (to the East, t2(W)=bm(E), t2(l)=bm(t)).
// Result: −=t1(−), +=t2(+), W=t1(W)+_{t1(l)}bm(W), N=bm(N)+_{bm(t)}t2(N),
// l=bm(l). nullopt when a fit equality or a required concatenation fails.
std::optional<TriBoundaryMap> tri_join(const Universe& u,
                                       const TriBoundaryMap& t1,
                                       const BoundaryMap& bm,
                                       const TriBoundaryMap& t2);

// ---------------------------------------------------------------------------
// Canonical JSON encoding (used inside certificates)
// ---------------------------------------------------------------------------

nlohmann::json bm_to_json(const BoundaryMap& bm);
std::optional<BoundaryMap> bm_from_json(const nlohmann::json& j);
nlohmann::json tri_to_json(const TriBoundaryMap& t);
std::optional<TriBoundaryMap> tri_from_json(const nlohmann::json& j);

}  // namespace mtl
