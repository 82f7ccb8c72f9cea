// ============================================================================
// boundary.cpp — rectangular and triangular boundary maps
// ============================================================================

#include "mtl/boundary.hpp"

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <utility>

namespace mtl {

namespace {

constexpr Dir kAllDirs[4] = {Dir::N, Dir::S, Dir::E, Dir::W};
constexpr Corn kAllCorns[4] = {Corn::T, Corn::L, Corn::R, Corn::B};

bool opt_mcs_eq(const std::optional<McsId>& a, const std::optional<McsId>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a.has_value() || *a == *b;
}

bool opt_trace_eq(const std::optional<Trace>& a,
                  const std::optional<Trace>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a.has_value() || a->seq == b->seq;
}

// Concatenation of two optional edges through an optional seam corner.
// ok with an undefined trace when both edges are undefined; ok with the
// concatenated trace when both edges and the corner are defined and the
// concatenation's cluster-order side conditions hold; not ok otherwise.
struct SeamConcat {
    bool ok = false;
    std::optional<Trace> trace;
};

SeamConcat seam_concat(const Universe& u, const std::optional<Trace>& x,
                       const std::optional<McsId>& m,
                       const std::optional<Trace>& y) {
    SeamConcat r;
    if (!x.has_value() && !y.has_value()) {
        r.ok = true;
        return r;
    }
    if (!x.has_value() || !y.has_value() || !m.has_value()) return r;
    auto joined = u.concat_traces(*x, *m, *y);
    if (!joined.has_value()) return r;
    r.ok = true;
    r.trace = std::move(*joined);
    return r;
}

bool mcs_ok(const Universe& u, McsId m) {
    return m < u.mcs_count() && u.alive(m);
}

bool cluster_ok(const Universe& u, ClusterId c) {
    return c < u.cluster_count();
}

// Every element of the trace lies below the node.
bool trace_below_node(const Universe& u, const Trace& t, Node n) {
    for (std::size_t i = 0; i < t.length(); ++i) {
        if (!u.node_leq(t.node_at(i), n)) return false;
    }
    return true;
}

// The node lies below every element of the trace.
bool node_below_trace(const Universe& u, Node n, const Trace& t) {
    for (std::size_t i = 0; i < t.length(); ++i) {
        if (!u.node_leq(n, t.node_at(i))) return false;
    }
    return true;
}

// Side condition for an outer edge kept outside the tip cluster: a lower
// edge (W/S) sits elementwise below the tip and discharges its future
// trace-defects upward into the adjacent corner or the tip; an upper edge
// (E/N) sits above the tip and discharges its past trace-defects downward.
bool edge_outside_tip(const Universe& u, const Trace& tr, bool lower,
                      Node tip, const std::optional<McsId>& adjacent) {
    for (std::size_t i = 0; i < tr.length(); ++i) {
        Node e = tr.node_at(i);
        if (lower ? !u.node_leq(e, tip) : !u.node_leq(tip, e)) return false;
    }
    for (const TraceDefect& td : u.trace_defects(tr)) {
        if (td.future != lower) continue;
        Node carrier = tr.node_at(td.position);
        bool ok = false;
        if (adjacent.has_value()) {
            Node corner = Node::mcs(*adjacent);
            ok = lower ? u.passes_up(td.item, carrier, corner)
                       : u.passes_down(td.item, carrier, corner);
        }
        if (!ok) {
            ok = lower ? u.passes_up(td.item, carrier, tip)
                       : u.passes_down(td.item, carrier, tip);
        }
        if (!ok) return false;
    }
    return true;
}

Trace reversed_trace(const Trace& t) {
    Trace r = t;
    std::reverse(r.seq.begin(), r.seq.end());
    return r;
}

std::size_t mix(std::size_t h, std::size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundaryMap basics
// ---------------------------------------------------------------------------

BoundaryMap BoundaryMap::point(McsId m) {
    BoundaryMap b;
    b.is_point = true;
    b.point_mcs = m;
    return b;
}

BoundaryMap BoundaryMap::open(ClusterId minus, ClusterId plus) {
    BoundaryMap b;
    b.minus = minus;
    b.plus = plus;
    return b;
}

bool BoundaryMap::closed_proper() const {
    if (is_point) return false;
    for (const auto& e : edges) {
        if (!e.has_value()) return false;
    }
    for (const auto& c : corners) {
        if (!c.has_value()) return false;
    }
    return true;
}

bool BoundaryMap::is_open() const {
    if (is_point) return false;
    for (const auto& e : edges) {
        if (e.has_value()) return false;
    }
    for (const auto& c : corners) {
        if (c.has_value()) return false;
    }
    return true;
}

bool operator==(const BoundaryMap& a, const BoundaryMap& b) {
    if (a.is_point != b.is_point) return false;
    if (a.is_point) return a.point_mcs == b.point_mcs;
    if (a.minus != b.minus || a.plus != b.plus) return false;
    for (std::size_t i = 0; i < 4; ++i) {
        if (!opt_trace_eq(a.edges[i], b.edges[i])) return false;
        if (!opt_mcs_eq(a.corners[i], b.corners[i])) return false;
    }
    return true;
}

std::size_t hash_bm(const BoundaryMap& bm) {
    if (bm.is_point) return mix(0x51ed270b, bm.point_mcs);
    std::size_t h = 0x2545f491;
    h = mix(h, bm.minus);
    h = mix(h, bm.plus);
    for (std::size_t i = 0; i < 4; ++i) {
        if (bm.edges[i].has_value()) {
            h = mix(h, 1);
            h = mix(h, hash_trace(*bm.edges[i]));
        } else {
            h = mix(h, 0);
        }
        if (bm.corners[i].has_value()) {
            h = mix(h, 2 + static_cast<std::size_t>(*bm.corners[i]));
        } else {
            h = mix(h, 0);
        }
    }
    return h;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

bool validate(const Universe& u, const BoundaryMap& bm) {
    if (bm.is_point) return mcs_ok(u, bm.point_mcs);

    const bool has_n = bm.edge(Dir::N).has_value();
    const bool has_s = bm.edge(Dir::S).has_value();
    const bool has_e = bm.edge(Dir::E).has_value();
    const bool has_w = bm.edge(Dir::W).has_value();

    // Domain shape: a corner is defined exactly when both adjacent edges are.
    if (bm.corner(Corn::T).has_value() != (has_n && has_e)) return false;
    if (bm.corner(Corn::B).has_value() != (has_s && has_w)) return false;
    if (bm.corner(Corn::L).has_value() != (has_w && has_n)) return false;
    if (bm.corner(Corn::R).has_value() != (has_s && has_e)) return false;

    if (!cluster_ok(u, bm.minus) || !cluster_ok(u, bm.plus)) return false;
    for (Dir d : kAllDirs) {
        if (bm.edge(d).has_value() && !u.validate_trace(*bm.edge(d))) {
            return false;
        }
    }
    for (Corn c : kAllCorns) {
        if (bm.corner(c).has_value() && !mcs_ok(u, *bm.corner(c))) {
            return false;
        }
    }

    if (!u.cluster_le(bm.minus, bm.plus)) return false;

    // The tip clusters discharge their outward defects into the adjacent
    // edges' extreme clusters (a missing receiving edge means no defect may
    // exist).
    const Node plus_node = Node::cluster(bm.plus);
    for (std::uint32_t item : u.future_defects(plus_node)) {
        bool received =
            (has_n && u.passes_up(item, plus_node,
                                  Node::cluster(
                                      bm.edge(Dir::N)->final_cluster()))) ||
            (has_e && u.passes_up(item, plus_node,
                                  Node::cluster(
                                      bm.edge(Dir::E)->final_cluster())));
        if (!received) return false;
    }
    const Node minus_node = Node::cluster(bm.minus);
    for (std::uint32_t item : u.past_defects(minus_node)) {
        bool received =
            (has_w && u.passes_down(item, minus_node,
                                    Node::cluster(
                                        bm.edge(Dir::W)->initial_cluster()))) ||
            (has_s && u.passes_down(item, minus_node,
                                    Node::cluster(
                                        bm.edge(Dir::S)->initial_cluster())));
        if (!received) return false;
    }

    // ∂(+) below the final clusters of N/E; initial clusters of W/S below
    // ∂(−).
    if (has_n && !u.cluster_le(bm.plus, bm.edge(Dir::N)->final_cluster())) {
        return false;
    }
    if (has_e && !u.cluster_le(bm.plus, bm.edge(Dir::E)->final_cluster())) {
        return false;
    }
    if (has_w && !u.cluster_le(bm.edge(Dir::W)->initial_cluster(), bm.minus)) {
        return false;
    }
    if (has_s && !u.cluster_le(bm.edge(Dir::S)->initial_cluster(), bm.minus)) {
        return false;
    }

    // t above N and E, its past defects discharged into their final
    // clusters; b dually below W and S.
    if (bm.corner(Corn::T).has_value()) {
        const Node t = Node::mcs(*bm.corner(Corn::T));
        if (!trace_below_node(u, *bm.edge(Dir::N), t)) return false;
        if (!trace_below_node(u, *bm.edge(Dir::E), t)) return false;
        for (std::uint32_t item : u.past_defects(t)) {
            bool received =
                u.passes_down(item, t,
                              Node::cluster(bm.edge(Dir::N)->final_cluster())) ||
                u.passes_down(item, t,
                              Node::cluster(bm.edge(Dir::E)->final_cluster()));
            if (!received) return false;
        }
    }
    if (bm.corner(Corn::B).has_value()) {
        const Node b = Node::mcs(*bm.corner(Corn::B));
        if (!node_below_trace(u, b, *bm.edge(Dir::W))) return false;
        if (!node_below_trace(u, b, *bm.edge(Dir::S))) return false;
        for (std::uint32_t item : u.future_defects(b)) {
            bool received =
                u.passes_up(item, b,
                            Node::cluster(bm.edge(Dir::W)->initial_cluster())) ||
                u.passes_up(item, b,
                            Node::cluster(bm.edge(Dir::S)->initial_cluster()));
            if (!received) return false;
        }
    }

    // l sandwiched between W and N; r between S and E.
    if (bm.corner(Corn::L).has_value()) {
        const Node l = Node::mcs(*bm.corner(Corn::L));
        if (!trace_below_node(u, *bm.edge(Dir::W), l)) return false;
        if (!node_below_trace(u, l, *bm.edge(Dir::N))) return false;
    }
    if (bm.corner(Corn::R).has_value()) {
        const Node r = Node::mcs(*bm.corner(Corn::R));
        if (!trace_below_node(u, *bm.edge(Dir::S), r)) return false;
        if (!node_below_trace(u, r, *bm.edge(Dir::E))) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// bm_defects / height
// ---------------------------------------------------------------------------

std::vector<BmDefect> bm_defects(const Universe& u, const BoundaryMap& bm) {
    std::vector<BmDefect> out;
    if (bm.is_point) {
        const Node n = Node::mcs(bm.point_mcs);
        for (std::uint32_t item : u.past_defects(n)) {
            out.push_back(BmDefect{item, false, n});
        }
        for (std::uint32_t item : u.future_defects(n)) {
            out.push_back(BmDefect{item, true, n});
        }
        return out;
    }

    // Past side: b keeps all its past defects; S/W traces keep those not
    // discharged into b; l and r keep those not discharged into the final
    // cluster of W resp. S.
    if (bm.corner(Corn::B).has_value()) {
        const Node b = Node::mcs(*bm.corner(Corn::B));
        for (std::uint32_t item : u.past_defects(b)) {
            out.push_back(BmDefect{item, false, b});
        }
    }
    for (Dir d : {Dir::S, Dir::W}) {
        if (!bm.edge(d).has_value()) continue;
        for (const TraceDefect& td : u.trace_defects(*bm.edge(d))) {
            if (td.future) continue;
            const Node carrier = bm.edge(d)->node_at(td.position);
            const bool received =
                bm.corner(Corn::B).has_value() &&
                u.passes_down(td.item, carrier,
                              Node::mcs(*bm.corner(Corn::B)));
            if (!received) out.push_back(BmDefect{td.item, false, carrier});
        }
    }
    if (bm.corner(Corn::L).has_value()) {
        const Node l = Node::mcs(*bm.corner(Corn::L));
        const Node recv = Node::cluster(bm.edge(Dir::W)->final_cluster());
        for (std::uint32_t item : u.past_defects(l)) {
            if (!u.passes_down(item, l, recv)) {
                out.push_back(BmDefect{item, false, l});
            }
        }
    }
    if (bm.corner(Corn::R).has_value()) {
        const Node r = Node::mcs(*bm.corner(Corn::R));
        const Node recv = Node::cluster(bm.edge(Dir::S)->final_cluster());
        for (std::uint32_t item : u.past_defects(r)) {
            if (!u.passes_down(item, r, recv)) {
                out.push_back(BmDefect{item, false, r});
            }
        }
    }

    // Future side, dually: t; N/E traces vs t; l vs the initial cluster of
    // N; r vs the initial cluster of E.
    if (bm.corner(Corn::T).has_value()) {
        const Node t = Node::mcs(*bm.corner(Corn::T));
        for (std::uint32_t item : u.future_defects(t)) {
            out.push_back(BmDefect{item, true, t});
        }
    }
    for (Dir d : {Dir::N, Dir::E}) {
        if (!bm.edge(d).has_value()) continue;
        for (const TraceDefect& td : u.trace_defects(*bm.edge(d))) {
            if (!td.future) continue;
            const Node carrier = bm.edge(d)->node_at(td.position);
            const bool received =
                bm.corner(Corn::T).has_value() &&
                u.passes_up(td.item, carrier, Node::mcs(*bm.corner(Corn::T)));
            if (!received) out.push_back(BmDefect{td.item, true, carrier});
        }
    }
    if (bm.corner(Corn::L).has_value()) {
        const Node l = Node::mcs(*bm.corner(Corn::L));
        const Node recv = Node::cluster(bm.edge(Dir::N)->initial_cluster());
        for (std::uint32_t item : u.future_defects(l)) {
            if (!u.passes_up(item, l, recv)) {
                out.push_back(BmDefect{item, true, l});
            }
        }
    }
    if (bm.corner(Corn::R).has_value()) {
        const Node r = Node::mcs(*bm.corner(Corn::R));
        const Node recv = Node::cluster(bm.edge(Dir::E)->initial_cluster());
        for (std::uint32_t item : u.future_defects(r)) {
            if (!u.passes_up(item, r, recv)) {
                out.push_back(BmDefect{item, true, r});
            }
        }
    }
    return out;
}

std::uint32_t height(const Universe& u, const BoundaryMap& bm) {
    if (bm.is_point) return 0;
    return u.chain_height(bm.minus, bm.plus);
}

// ---------------------------------------------------------------------------
// fits / join
// ---------------------------------------------------------------------------

bool fits(const Universe& u, const BoundaryMap& a, const BoundaryMap& b,
          Dir d) {
    if (d == Dir::S) return fits(u, b, a, Dir::N);
    if (d == Dir::W) return fits(u, b, a, Dir::E);
    if (a.is_point || b.is_point) return false;
    if (d == Dir::N) {
        if (!a.edge(Dir::N).has_value()) return false;
        if (!opt_trace_eq(a.edge(Dir::N), b.edge(Dir::S))) return false;
        if (!opt_mcs_eq(a.corner(Corn::L), b.corner(Corn::B))) return false;
        if (!opt_mcs_eq(a.corner(Corn::T), b.corner(Corn::R))) return false;
        if (!seam_concat(u, a.edge(Dir::W), a.corner(Corn::L),
                         b.edge(Dir::W))
                 .ok) {
            return false;
        }
        if (!seam_concat(u, a.edge(Dir::E), a.corner(Corn::T),
                         b.edge(Dir::E))
                 .ok) {
            return false;
        }
        return true;
    }
    // East.
    if (!a.edge(Dir::E).has_value()) return false;
    if (!opt_trace_eq(a.edge(Dir::E), b.edge(Dir::W))) return false;
    if (!opt_mcs_eq(a.corner(Corn::R), b.corner(Corn::B))) return false;
    if (!opt_mcs_eq(a.corner(Corn::T), b.corner(Corn::L))) return false;
    if (!seam_concat(u, a.edge(Dir::S), a.corner(Corn::R), b.edge(Dir::S))
             .ok) {
        return false;
    }
    if (!seam_concat(u, a.edge(Dir::N), a.corner(Corn::T), b.edge(Dir::N))
             .ok) {
        return false;
    }
    return true;
}

std::optional<BoundaryMap> join(const Universe& u, const BoundaryMap& a,
                                const BoundaryMap& b, Dir d) {
    if (d == Dir::S) return join(u, b, a, Dir::N);
    if (d == Dir::W) return join(u, b, a, Dir::E);
    if (!fits(u, a, b, d)) return std::nullopt;
    BoundaryMap r;
    r.minus = a.minus;
    r.plus = b.plus;
    if (d == Dir::N) {
        r.edge(Dir::S) = a.edge(Dir::S);
        r.edge(Dir::N) = b.edge(Dir::N);
        r.edge(Dir::W) =
            seam_concat(u, a.edge(Dir::W), a.corner(Corn::L), b.edge(Dir::W))
                .trace;
        r.edge(Dir::E) =
            seam_concat(u, a.edge(Dir::E), a.corner(Corn::T), b.edge(Dir::E))
                .trace;
        r.corner(Corn::B) = a.corner(Corn::B);
        r.corner(Corn::R) = a.corner(Corn::R);
        r.corner(Corn::T) = b.corner(Corn::T);
        r.corner(Corn::L) = b.corner(Corn::L);
    } else {
        r.edge(Dir::W) = a.edge(Dir::W);
        r.edge(Dir::E) = b.edge(Dir::E);
        r.edge(Dir::S) =
            seam_concat(u, a.edge(Dir::S), a.corner(Corn::R), b.edge(Dir::S))
                .trace;
        r.edge(Dir::N) =
            seam_concat(u, a.edge(Dir::N), a.corner(Corn::T), b.edge(Dir::N))
                .trace;
        r.corner(Corn::B) = a.corner(Corn::B);
        r.corner(Corn::L) = a.corner(Corn::L);
        r.corner(Corn::T) = b.corner(Corn::T);
        r.corner(Corn::R) = b.corner(Corn::R);
    }
    return r;
}

namespace {

// A perpendicular edge survives abutting the map against its own copy only
// when it concatenates with itself through the seam corner: a defined edge
// must hold a single cluster, with the seam corner defined and lying inside
// that cluster. An undefined edge imposes nothing.
bool edge_closes_through(const Universe& u, const std::optional<Trace>& e,
                         const std::optional<McsId>& corner) {
    if (!e.has_value()) return true;
    if (e->cluster_count() != 1) return false;
    if (!corner.has_value()) return false;
    return u.cluster_of(*corner) == e->initial_cluster();
}

}  // namespace

bool self_fits(const Universe& u, const BoundaryMap& bm, Dir d) {
    if (bm.is_point) return false;
    if (d == Dir::W || d == Dir::E) {
        // The map abuts its own copy to the East: the shared W/E seam edge
        // must be recorded, and the b/r, l/t corner pairs agree.
        if (!bm.edge(Dir::W).has_value()) return false;
        if (!opt_trace_eq(bm.edge(Dir::E), bm.edge(Dir::W))) return false;
        if (!opt_mcs_eq(bm.corner(Corn::R), bm.corner(Corn::B))) return false;
        if (!opt_mcs_eq(bm.corner(Corn::T), bm.corner(Corn::L))) return false;
        // Both perpendicular edges must close up across the seam: S through
        // the b/r corner pair, N through the l/t pair.
        return edge_closes_through(u, bm.edge(Dir::S), bm.corner(Corn::R)) &&
               edge_closes_through(u, bm.edge(Dir::N), bm.corner(Corn::T));
    }
    // Vertical: the map abuts its own copy to the North through the S/N seam.
    if (!bm.edge(Dir::S).has_value()) return false;
    if (!opt_trace_eq(bm.edge(Dir::N), bm.edge(Dir::S))) return false;
    if (!opt_mcs_eq(bm.corner(Corn::L), bm.corner(Corn::B))) return false;
    if (!opt_mcs_eq(bm.corner(Corn::T), bm.corner(Corn::R))) return false;
    return edge_closes_through(u, bm.edge(Dir::W), bm.corner(Corn::L)) &&
           edge_closes_through(u, bm.edge(Dir::E), bm.corner(Corn::T));
}

// ---------------------------------------------------------------------------
// limit_rel
// ---------------------------------------------------------------------------

namespace {

// A limit in direction d stacks unboundedly many displaced copies of the
// map toward d. Boundary data on the side the copies slide along — the
// seam trace shared by consecutive copies, and the cluster and seam corner
// of the perpendicular edge on the far-from-d flank — recurs at every
// level, while the receivers a single copy leaned on may be collapsed
// away. Every obligation such data carries in the sweep polarity (future
// for N/E, past for S/W) must therefore be discharged by data that
// survives into the target: the perpendicular edge on the d flank (its
// seam corner exactly, or its cluster holding the operand), a tip cluster,
// the far end of the replacement edge, the replacement corner adjacent to
// the surviving flank, or a seam element holding the operand. Obligations
// pointing against the sweep cascade level by level toward the fixed side
// and need no extra receiver.
bool swept_defects_discharge(const Universe& u, const BoundaryMap& bm,
                             const BoundaryMap& target, Dir d) {
    const bool up = (d == Dir::N || d == Dir::E);
    const bool vertical = (d == Dir::N || d == Dir::S);
    const std::optional<Trace>& rail =
        vertical ? bm.edge(Dir::S) : bm.edge(Dir::W);
    // The flank the copies slide along repeats at every level; the opposite
    // flank survives into the limit.
    const Dir near_side = vertical ? (d == Dir::N ? Dir::W : Dir::E)
                                   : (d == Dir::W ? Dir::N : Dir::S);
    const Dir far_side = vertical ? (d == Dir::N ? Dir::E : Dir::W)
                                  : (d == Dir::W ? Dir::S : Dir::N);
    const std::optional<Trace>& near_edge = bm.edge(near_side);
    const std::optional<Trace>& far_edge = bm.edge(far_side);
    // Seam corners: the repeated flank's pair collapses to the slot named
    // here by the self-abutment corner equalities, likewise the far flank's.
    const std::optional<McsId>& near_corner =
        bm.corner(up ? Corn::B : Corn::T);
    const std::optional<McsId>& far_corner =
        bm.corner(up ? Corn::T : Corn::B);
    // The replacement corner sitting between the new d-edge and the
    // repeated flank.
    const std::optional<McsId>& repl_corner =
        target.corner((d == Dir::N || d == Dir::W) ? Corn::L : Corn::R);
    const std::optional<Trace>& new_edge = target.edge(d);
    const ClusterId tip_main = up ? bm.plus : bm.minus;
    const ClusterId tip_other = up ? bm.minus : bm.plus;

    const auto passes = [&](std::uint32_t item, Node carrier, Node recv) {
        return up ? u.passes_up(item, carrier, recv)
                  : u.passes_down(item, carrier, recv);
    };
    // The obligation's operand itself holds at recv, with recv on the
    // correct side of the carrier.
    const auto realized = [&](std::uint32_t item, Node carrier, Node recv) {
        if (!(up ? u.node_leq(carrier, recv) : u.node_leq(recv, carrier))) {
            return false;
        }
        return u.node_has(recv, u.cl().item(item).left);
    };
    const auto in_cluster = [&](Node n, ClusterId c) {
        if (n.is_mcs()) {
            return u.cluster_of(n.id) == std::optional<ClusterId>(c);
        }
        return n.id == c;
    };
    // Re-emission at a tip only counts from a carrier outside that tip;
    // from inside, the operand itself must recur there.
    const auto via_tip = [&](std::uint32_t item, Node carrier, ClusterId c) {
        const Node t = Node::cluster(c);
        return in_cluster(carrier, c) ? realized(item, carrier, t)
                                      : passes(item, carrier, t);
    };
    const auto via_far_corner = [&](std::uint32_t item, Node carrier) {
        return far_corner.has_value() &&
               passes(item, carrier, Node::mcs(*far_corner));
    };
    const auto via_far_cluster = [&](std::uint32_t item, Node carrier) {
        return far_edge.has_value() &&
               realized(item, carrier,
                        Node::cluster(far_edge->initial_cluster()));
    };
    const auto via_repl_corner = [&](std::uint32_t item, Node carrier) {
        return repl_corner.has_value() &&
               passes(item, carrier, Node::mcs(*repl_corner));
    };
    const auto via_new_edge_end = [&](std::uint32_t item, Node carrier) {
        if (!new_edge.has_value()) return false;
        const ClusterId end =
            up ? new_edge->final_cluster() : new_edge->initial_cluster();
        return passes(item, carrier, Node::cluster(end));
    };
    const auto via_rail_realize = [&](std::uint32_t item, Node carrier) {
        for (std::uint32_t i = 0; i < rail->length(); ++i) {
            if (realized(item, carrier, rail->node_at(i))) return true;
        }
        return false;
    };

    // Obligations of the seam trace that survive within it.
    for (const TraceDefect& td : u.trace_defects(*rail)) {
        if (td.future != up) continue;
        const Node carrier = rail->node_at(td.position);
        if (via_far_corner(td.item, carrier)) continue;
        if (via_far_cluster(td.item, carrier)) continue;
        if (realized(td.item, carrier, Node::cluster(tip_main))) continue;
        if (via_new_edge_end(td.item, carrier)) continue;
        return false;
    }

    // Obligations of the repeated flank's edge cluster.
    if (near_edge.has_value()) {
        const Node carrier = Node::cluster(near_edge->initial_cluster());
        const auto& ds =
            up ? u.future_defects(carrier) : u.past_defects(carrier);
        for (std::uint32_t item : ds) {
            if (far_edge.has_value() &&
                passes(item, carrier,
                       Node::cluster(far_edge->initial_cluster()))) {
                continue;
            }
            if (via_repl_corner(item, carrier)) continue;
            if (via_tip(item, carrier, tip_main)) continue;
            if (via_tip(item, carrier, tip_other)) continue;
            if (via_rail_realize(item, carrier)) continue;
            return false;
        }
    }

    // Obligations of the repeated flank's seam corner.
    if (near_corner.has_value()) {
        const Node carrier = Node::mcs(*near_corner);
        const auto& ds =
            up ? u.future_defects(carrier) : u.past_defects(carrier);
        for (std::uint32_t item : ds) {
            if (via_far_corner(item, carrier)) continue;
            if (via_far_cluster(item, carrier)) continue;
            if (via_repl_corner(item, carrier)) continue;
            if (via_tip(item, carrier, tip_main)) continue;
            if (via_tip(item, carrier, tip_other)) continue;
            if (via_rail_realize(item, carrier)) continue;
            return false;
        }
    }
    return true;
}

}  // namespace

bool limit_rel(const Universe& u, const BoundaryMap& bm,
               const BoundaryMap& target, Dir d) {
    if (bm.is_point || target.is_point) return false;
    if (!self_fits(u, bm, d)) return false;

    // The target agrees with bm everywhere except the d-side triple.
    Corn changed1;
    Corn changed2;
    switch (d) {
        case Dir::W:
            changed1 = Corn::B;
            changed2 = Corn::L;
            break;
        case Dir::E:
            changed1 = Corn::T;
            changed2 = Corn::R;
            break;
        case Dir::S:
            changed1 = Corn::B;
            changed2 = Corn::R;
            break;
        default:  // Dir::N
            changed1 = Corn::T;
            changed2 = Corn::L;
            break;
    }
    if (bm.minus != target.minus || bm.plus != target.plus) return false;
    for (Dir e : kAllDirs) {
        if (e != d && !opt_trace_eq(bm.edge(e), target.edge(e))) return false;
    }
    for (Corn c : kAllCorns) {
        if (c != changed1 && c != changed2 &&
            !opt_mcs_eq(bm.corner(c), target.corner(c))) {
            return false;
        }
    }

    if (!validate(u, target)) return false;

    // The new edge, when defined, stays outside the tip cluster with its
    // outward trace-defects discharged.
    if (target.edge(d).has_value()) {
        const bool lower = (d == Dir::W || d == Dir::S);
        const Node tip = Node::cluster(lower ? target.minus : target.plus);
        const Corn adjacent =
            (d == Dir::W || d == Dir::N) ? Corn::L : Corn::R;
        if (!edge_outside_tip(u, *target.edge(d), lower, tip,
                              target.corner(adjacent))) {
            return false;
        }
    }

    // Obligations carried by the boundary data the limit tower repeats must
    // survive the collapse of the swept side.
    return swept_defects_discharge(u, bm, target, d);
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

namespace {

// piece equals shared[0 .. 2j] for the returned cluster index j.
bool is_prefix_of(const Trace& shared, const std::optional<Trace>& piece,
                  std::size_t& end_cluster) {
    if (!piece.has_value()) return false;
    if (piece->length() > shared.length()) return false;
    for (std::size_t p = 0; p < piece->length(); ++p) {
        if (piece->seq[p] != shared.seq[p]) return false;
    }
    end_cluster = piece->cluster_count() - 1;
    return true;
}

// piece equals shared[2j .. end] for the returned cluster index j.
bool is_suffix_of(const Trace& shared, const std::optional<Trace>& piece,
                  std::size_t& start_cluster) {
    if (!piece.has_value()) return false;
    if (piece->length() > shared.length()) return false;
    const std::size_t off = shared.length() - piece->length();
    for (std::size_t p = 0; p < piece->length(); ++p) {
        if (piece->seq[p] != shared.seq[off + p]) return false;
    }
    start_cluster = off / 2;
    return true;
}

// Cut side condition at index i: the low piece's near/far edges are
// prefixes (c₀..c_j), (c₀..c_j′) with j ≤ i < j′, or the high piece's
// far/near edges are suffixes (c_j′..c_k), (c_j..c_k) with the same bounds.
bool cut_witness(const Trace& shared, std::size_t i,
                 const std::optional<Trace>& lo_near,
                 const std::optional<Trace>& lo_far,
                 const std::optional<Trace>& hi_near,
                 const std::optional<Trace>& hi_far) {
    std::size_t j = 0;
    std::size_t jp = 0;
    if (is_prefix_of(shared, lo_near, j) && j <= i &&
        is_prefix_of(shared, lo_far, jp) && jp >= i + 1) {
        return true;
    }
    if (is_suffix_of(shared, hi_far, jp) && jp >= i + 1 &&
        is_suffix_of(shared, hi_near, j) && j <= i) {
        return true;
    }
    return false;
}

}  // namespace

bool split(const Universe& u, const BoundaryMap& bm, Axis axis, std::size_t i,
           const BoundaryMap& lo, const BoundaryMap& hi) {
    if (bm.is_point) return false;
    const bool horiz = (axis == Axis::Horiz);
    // A horizontal cut runs through the W=E trace of a W-form self-fitting
    // map and separates a bottom piece from a top piece (N-join); a vertical
    // cut dually through the S=N trace (E-join).
    const Dir near = horiz ? Dir::W : Dir::S;
    const Dir far = horiz ? Dir::E : Dir::N;
    if (!self_fits(u, bm, near)) return false;
    if (!bm.edge(near).has_value()) return false;
    const Trace& shared = *bm.edge(near);
    const std::size_t k = shared.cluster_count() - 1;
    if (i >= k) return false;
    auto joined = join(u, lo, hi, horiz ? Dir::N : Dir::E);
    if (!joined.has_value() || !(*joined == bm)) return false;
    return cut_witness(shared, i, lo.edge(near), lo.edge(far), hi.edge(near),
                       hi.edge(far));
}

// ---------------------------------------------------------------------------
// is_shuffle / in_B0
// ---------------------------------------------------------------------------

bool is_shuffle(const Universe& u, const BoundaryMap& bm,
                const std::vector<BoundaryMap>& parts) {
    if (bm.is_point) return false;
    if (!u.cluster_lt(bm.minus, bm.plus)) return false;
    if (parts.empty()) return false;
    bool any_point = false;
    for (const BoundaryMap& p : parts) {
        assert(p.is_point || p.closed_proper());
        if (p.is_point) any_point = true;
    }
    if (!any_point) return false;

    const Node lo = Node::cluster(bm.minus);
    const Node hi = Node::cluster(bm.plus);
    auto part_bottom = [](const BoundaryMap& p) {
        return Node::mcs(p.is_point ? p.point_mcs : *p.corner(Corn::B));
    };
    auto part_top = [](const BoundaryMap& p) {
        return Node::mcs(p.is_point ? p.point_mcs : *p.corner(Corn::T));
    };

    // Each part sits between the tips.
    for (const BoundaryMap& p : parts) {
        const Node pb = part_bottom(p);
        const Node pt = part_top(p);
        if (!u.node_leq(lo, pb) || !u.node_leq(pb, pt) ||
            !u.node_leq(pt, hi)) {
            return false;
        }
    }

    // The tips discharge their inward defects into some part.
    for (std::uint32_t item : u.future_defects(lo)) {
        bool ok = false;
        for (const BoundaryMap& p : parts) {
            if (u.passes_up(item, lo, part_bottom(p))) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    for (std::uint32_t item : u.past_defects(hi)) {
        bool ok = false;
        for (const BoundaryMap& p : parts) {
            if (u.passes_down(item, hi, part_top(p))) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }

    // Each part discharges its leftover defects into the tips.
    for (const BoundaryMap& p : parts) {
        for (const BmDefect& d : bm_defects(u, p)) {
            const bool ok = d.future ? u.passes_up(d.item, d.carrier, hi)
                                     : u.passes_down(d.item, d.carrier, lo);
            if (!ok) return false;
        }
    }

    // Outer edges stay outside the open interval.
    if (bm.edge(Dir::S).has_value() &&
        !edge_outside_tip(u, *bm.edge(Dir::S), true, lo,
                          bm.corner(Corn::R))) {
        return false;
    }
    if (bm.edge(Dir::W).has_value() &&
        !edge_outside_tip(u, *bm.edge(Dir::W), true, lo,
                          bm.corner(Corn::L))) {
        return false;
    }
    if (bm.edge(Dir::E).has_value() &&
        !edge_outside_tip(u, *bm.edge(Dir::E), false, hi,
                          bm.corner(Corn::R))) {
        return false;
    }
    if (bm.edge(Dir::N).has_value() &&
        !edge_outside_tip(u, *bm.edge(Dir::N), false, hi,
                          bm.corner(Corn::L))) {
        return false;
    }
    return true;
}

bool in_B0(const Universe& u, const BoundaryMap& bm) {
    if (bm.is_point) return false;
    if (!validate(u, bm)) return false;
    if (bm.minus != bm.plus) return false;
    const Node c = Node::cluster(bm.minus);
    if (bm.edge(Dir::S).has_value() &&
        !edge_outside_tip(u, *bm.edge(Dir::S), true, c, bm.corner(Corn::R))) {
        return false;
    }
    if (bm.edge(Dir::W).has_value() &&
        !edge_outside_tip(u, *bm.edge(Dir::W), true, c, bm.corner(Corn::L))) {
        return false;
    }
    if (bm.edge(Dir::E).has_value() &&
        !edge_outside_tip(u, *bm.edge(Dir::E), false, c,
                          bm.corner(Corn::R))) {
        return false;
    }
    if (bm.edge(Dir::N).has_value() &&
        !edge_outside_tip(u, *bm.edge(Dir::N), false, c,
                          bm.corner(Corn::L))) {
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// transpose / reverse
// ---------------------------------------------------------------------------

BoundaryMap transpose(const BoundaryMap& bm) {
    if (bm.is_point) return bm;
    BoundaryMap r = bm;
    std::swap(r.edge(Dir::N), r.edge(Dir::E));
    std::swap(r.edge(Dir::S), r.edge(Dir::W));
    std::swap(r.corner(Corn::L), r.corner(Corn::R));
    return r;
}

BoundaryMap reverse_map(const BoundaryMap& bm) {
    if (bm.is_point) return bm;
    auto rev = [](const std::optional<Trace>& t) -> std::optional<Trace> {
        if (!t.has_value()) return std::nullopt;
        return reversed_trace(*t);
    };
    BoundaryMap r;
    r.minus = bm.plus;
    r.plus = bm.minus;
    r.edge(Dir::N) = rev(bm.edge(Dir::S));
    r.edge(Dir::S) = rev(bm.edge(Dir::N));
    r.edge(Dir::E) = rev(bm.edge(Dir::W));
    r.edge(Dir::W) = rev(bm.edge(Dir::E));
    r.corner(Corn::T) = bm.corner(Corn::B);
    r.corner(Corn::B) = bm.corner(Corn::T);
    r.corner(Corn::L) = bm.corner(Corn::R);
    r.corner(Corn::R) = bm.corner(Corn::L);
    return r;
}

// ---------------------------------------------------------------------------
// Triangular maps
// ---------------------------------------------------------------------------

TriBoundaryMap TriBoundaryMap::open(ClusterId minus, ClusterId plus) {
    TriBoundaryMap t;
    t.minus = minus;
    t.plus = plus;
    return t;
}

bool operator==(const TriBoundaryMap& a, const TriBoundaryMap& b) {
    return a.minus == b.minus && a.plus == b.plus && opt_trace_eq(a.n, b.n) &&
           opt_trace_eq(a.w, b.w) && opt_mcs_eq(a.l, b.l);
}

std::size_t hash_tri(const TriBoundaryMap& t) {
    std::size_t h = 0x7f4a7c15;
    h = mix(h, t.minus);
    h = mix(h, t.plus);
    h = mix(h, t.n.has_value() ? 1 + hash_trace(*t.n) : 0);
    h = mix(h, t.w.has_value() ? 1 + hash_trace(*t.w) : 0);
    h = mix(h, t.l.has_value() ? 2 + static_cast<std::size_t>(*t.l) : 0);
    return h;
}

bool tri_validate(const Universe& u, const TriBoundaryMap& t) {
    if (t.l.has_value() != (t.n.has_value() && t.w.has_value())) return false;
    if (!cluster_ok(u, t.minus) || !cluster_ok(u, t.plus)) return false;
    if (t.n.has_value() && !u.validate_trace(*t.n)) return false;
    if (t.w.has_value() && !u.validate_trace(*t.w)) return false;
    if (t.l.has_value() && !mcs_ok(u, *t.l)) return false;
    if (!u.cluster_le(t.minus, t.plus)) return false;

    const Node plus_node = Node::cluster(t.plus);
    for (std::uint32_t item : u.future_defects(plus_node)) {
        if (!t.n.has_value() ||
            !u.passes_up(item, plus_node,
                         Node::cluster(t.n->final_cluster()))) {
            return false;
        }
    }
    const Node minus_node = Node::cluster(t.minus);
    for (std::uint32_t item : u.past_defects(minus_node)) {
        if (!t.w.has_value() ||
            !u.passes_down(item, minus_node,
                           Node::cluster(t.w->initial_cluster()))) {
            return false;
        }
    }
    if (t.n.has_value() && !u.cluster_le(t.plus, t.n->final_cluster())) {
        return false;
    }
    if (t.w.has_value() && !u.cluster_le(t.w->initial_cluster(), t.minus)) {
        return false;
    }
    if (t.l.has_value()) {
        const Node l = Node::mcs(*t.l);
        if (!trace_below_node(u, *t.w, l)) return false;
        if (!node_below_trace(u, l, *t.n)) return false;
    }
    return true;
}

bool in_T0(const Universe& u, const TriBoundaryMap& t) {
    if (!tri_validate(u, t)) return false;
    if (t.minus != t.plus) return false;
    const Node c = Node::cluster(t.minus);
    if (t.n.has_value() && !edge_outside_tip(u, *t.n, false, c, t.l)) {
        return false;
    }
    if (t.w.has_value() && !edge_outside_tip(u, *t.w, true, c, t.l)) {
        return false;
    }
    return true;
}

std::optional<TriBoundaryMap> tri_join(const Universe& u,
                                       const TriBoundaryMap& t1,
                                       const BoundaryMap& bm,
                                       const TriBoundaryMap& t2) {
    if (bm.is_point) return std::nullopt;
    if (!bm.edge(Dir::S).has_value() || !bm.edge(Dir::E).has_value()) {
        return std::nullopt;
    }
    if (!t1.n.has_value() || !(t1.n->seq == bm.edge(Dir::S)->seq)) {
        return std::nullopt;
    }
    if (!t2.w.has_value() || !(t2.w->seq == bm.edge(Dir::E)->seq)) {
        return std::nullopt;
    }
    if (!opt_mcs_eq(t1.l, bm.corner(Corn::B))) return std::nullopt;
    if (!opt_mcs_eq(t2.l, bm.corner(Corn::T))) return std::nullopt;
    const SeamConcat w = seam_concat(u, t1.w, t1.l, bm.edge(Dir::W));
    if (!w.ok) return std::nullopt;
    const SeamConcat n = seam_concat(u, bm.edge(Dir::N), bm.corner(Corn::T),
                                     t2.n);
    if (!n.ok) return std::nullopt;
    TriBoundaryMap r;
    r.minus = t1.minus;
    r.plus = t2.plus;
    r.w = w.trace;
    r.n = n.trace;
    r.l = bm.corner(Corn::L);
    return r;
}

// ---------------------------------------------------------------------------
// Canonical JSON encoding
// ---------------------------------------------------------------------------

namespace {

const char* const kEdgeKeys[4] = {"N", "S", "E", "W"};
const char* const kCornerKeys[4] = {"t", "l", "r", "b"};

bool read_u32(const nlohmann::json& v, std::uint32_t& out) {
    if (!v.is_number_unsigned()) return false;
    const std::uint64_t raw = v.get<std::uint64_t>();
    if (raw > 0xffffffffULL) return false;
    out = static_cast<std::uint32_t>(raw);
    return true;
}

// null → undefined; array of u32 ids with odd length → a trace.
bool read_opt_trace(const nlohmann::json& v, std::optional<Trace>& out) {
    if (v.is_null()) {
        out = std::nullopt;
        return true;
    }
    if (!v.is_array() || v.size() % 2 != 1) return false;
    Trace t;
    t.seq.reserve(v.size());
    for (const auto& e : v) {
        std::uint32_t id = 0;
        if (!read_u32(e, id)) return false;
        t.seq.push_back(id);
    }
    out = std::move(t);
    return true;
}

bool read_opt_u32(const nlohmann::json& v, std::optional<std::uint32_t>& out) {
    if (v.is_null()) {
        out = std::nullopt;
        return true;
    }
    std::uint32_t id = 0;
    if (!read_u32(v, id)) return false;
    out = id;
    return true;
}

}  // namespace

nlohmann::json bm_to_json(const BoundaryMap& bm) {
    nlohmann::json j;
    if (bm.is_point) {
        j["kind"] = "point";
        j["mcs"] = bm.point_mcs;
        return j;
    }
    j["kind"] = "proper";
    j["minus"] = bm.minus;
    j["plus"] = bm.plus;
    for (std::size_t i = 0; i < 4; ++i) {
        if (bm.edges[i].has_value()) {
            j[kEdgeKeys[i]] = bm.edges[i]->seq;
        } else {
            j[kEdgeKeys[i]] = nullptr;
        }
        if (bm.corners[i].has_value()) {
            j[kCornerKeys[i]] = *bm.corners[i];
        } else {
            j[kCornerKeys[i]] = nullptr;
        }
    }
    return j;
}

std::optional<BoundaryMap> bm_from_json(const nlohmann::json& j) {
    if (!j.is_object()) return std::nullopt;
    const auto kind = j.find("kind");
    if (kind == j.end() || !kind->is_string()) return std::nullopt;
    if (kind->get<std::string>() == "point") {
        if (j.size() != 2) return std::nullopt;
        const auto m = j.find("mcs");
        std::uint32_t id = 0;
        if (m == j.end() || !read_u32(*m, id)) return std::nullopt;
        return BoundaryMap::point(id);
    }
    if (kind->get<std::string>() != "proper") return std::nullopt;
    if (j.size() != 11) return std::nullopt;
    BoundaryMap bm;
    const auto minus = j.find("minus");
    const auto plus = j.find("plus");
    if (minus == j.end() || !read_u32(*minus, bm.minus)) return std::nullopt;
    if (plus == j.end() || !read_u32(*plus, bm.plus)) return std::nullopt;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto e = j.find(kEdgeKeys[i]);
        if (e == j.end() || !read_opt_trace(*e, bm.edges[i])) {
            return std::nullopt;
        }
        const auto c = j.find(kCornerKeys[i]);
        if (c == j.end() || !read_opt_u32(*c, bm.corners[i])) {
            return std::nullopt;
        }
    }
    return bm;
}

nlohmann::json tri_to_json(const TriBoundaryMap& t) {
    nlohmann::json j;
    j["minus"] = t.minus;
    j["plus"] = t.plus;
    if (t.n.has_value()) j["N"] = t.n->seq; else j["N"] = nullptr;
    if (t.w.has_value()) j["W"] = t.w->seq; else j["W"] = nullptr;
    if (t.l.has_value()) j["l"] = *t.l; else j["l"] = nullptr;
    return j;
}

std::optional<TriBoundaryMap> tri_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.size() != 5) return std::nullopt;
    TriBoundaryMap t;
    const auto minus = j.find("minus");
    const auto plus = j.find("plus");
    if (minus == j.end() || !read_u32(*minus, t.minus)) return std::nullopt;
    if (plus == j.end() || !read_u32(*plus, t.plus)) return std::nullopt;
    const auto n = j.find("N");
    if (n == j.end() || !read_opt_trace(*n, t.n)) return std::nullopt;
    const auto w = j.find("W");
    if (w == j.end() || !read_opt_trace(*w, t.w)) return std::nullopt;
    const auto l = j.find("l");
    if (l == j.end() || !read_opt_u32(*l, t.l)) return std::nullopt;
    return t;
}

}  // namespace mtl
