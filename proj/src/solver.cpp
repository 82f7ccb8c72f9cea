// ============================================================================
// solver.cpp — saturation of the boundary-map algebra and frame procedures
// ============================================================================
//
// Layout:
//   1. Budget         — wall-clock and size caps, uniform BudgetExceeded.
//   2. Gen            — bounded, deterministic candidate generation: traces
//                       below/above a tip cluster, corner candidates filtered
//                       by the exact validity clause they must satisfy, base
//                       maps, limit targets, shuffle targets.
//   3. saturate_B     — round-based closure under join / limit / shuffle,
//                       recording every join decomposition as a potential
//                       split witness.
//   4. saturate_T     — triangular layer on top of B.
//   5. Searches       — four-quadrant decomposition, frame procedures,
//                       dispatch, names.
//
// Determinism: members are kept in discovery order; every loop runs in
// ascending id order; candidate enumeration is a fixed-order DFS.  Hash maps
// are used only as indexes that are probed, never iterated.
// ============================================================================

#include "mtl/solver.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <stdexcept>
#include <string>
#include <utility>

namespace mtl {

namespace {

std::size_t dir_ix(Dir d) { return static_cast<std::size_t>(d); }

// ---------------------------------------------------------------------------
// Budget
// ---------------------------------------------------------------------------

class Budget {
public:
    explicit Budget(const SolverOptions& opt)
        : opt_(opt), start_(std::chrono::steady_clock::now()) {}

    // Cheap per-operation heartbeat; checks the wall clock every 1024 ops.
    void tick() {
        if ((++ops_ & 1023u) == 0) check_clock();
    }

    void check_clock() const {
        if (opt_.max_seconds <= 0.0) return;
        const auto now = std::chrono::steady_clock::now();
        const double secs =
            std::chrono::duration<double>(now - start_).count();
        if (secs > opt_.max_seconds) {
            throw BudgetExceeded("wall-clock budget exceeded");
        }
    }

private:
    const SolverOptions& opt_;
    std::chrono::steady_clock::time_point start_;
    std::uint64_t ops_ = 0;
};

// ---------------------------------------------------------------------------
// Candidate generation
// ---------------------------------------------------------------------------
//
// Everything a production rule may introduce is drawn from here.  The
// enumerators only have to produce a superset of what the final predicates
// (in_B0 / limit_rel / is_shuffle + validate) accept; the corner prefilters
// below are in fact exact — within a valid trace consecutive nodes are
// related, so "every node of the trace is below x" collapses to a single
// comparison against the extreme cluster — but nothing depends on that.

class Gen {
public:
    Gen(const Universe& u, const SolverOptions& opt, Budget& budget)
        : u_(u), opt_(opt), budget_(budget) {
        for (McsId m = 0; m < u_.mcs_count(); ++m) {
            if (u_.alive(m)) alive_.push_back(m);
        }
        below_.resize(u_.cluster_count());
        above_.resize(u_.cluster_count());
    }

    const std::vector<McsId>& alive() const { return alive_; }

    // Every valid trace all of whose nodes lie below / above cluster `tip`.
    const std::vector<Trace>& below(ClusterId tip) {
        if (!below_[tip]) below_[tip] = enumerate(tip, true);
        return *below_[tip];
    }
    const std::vector<Trace>& above(ClusterId tip) {
        if (!above_[tip]) above_[tip] = enumerate(tip, false);
        return *above_[tip];
    }

    // Corner candidates, one list per validity clause.
    std::vector<McsId> cand_t(const Trace& n, const Trace& e) const {
        std::vector<McsId> out;
        const Node nf = Node::cluster(n.final_cluster());
        const Node ef = Node::cluster(e.final_cluster());
        for (McsId m : alive_) {
            const Node t = Node::mcs(m);
            if (!u_.node_leq(nf, t) || !u_.node_leq(ef, t)) continue;
            bool ok = true;
            for (std::uint32_t item : u_.past_defects(t)) {
                if (!u_.passes_down(item, t, nf) &&
                    !u_.passes_down(item, t, ef)) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back(m);
        }
        return out;
    }

    std::vector<McsId> cand_b(const Trace& s, const Trace& w) const {
        std::vector<McsId> out;
        const Node si = Node::cluster(s.initial_cluster());
        const Node wi = Node::cluster(w.initial_cluster());
        for (McsId m : alive_) {
            const Node b = Node::mcs(m);
            if (!u_.node_leq(b, si) || !u_.node_leq(b, wi)) continue;
            bool ok = true;
            for (std::uint32_t item : u_.future_defects(b)) {
                if (!u_.passes_up(item, b, si) &&
                    !u_.passes_up(item, b, wi)) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back(m);
        }
        return out;
    }

    std::vector<McsId> cand_l(const Trace& w, const Trace& n) const {
        std::vector<McsId> out;
        const Node wf = Node::cluster(w.final_cluster());
        const Node ni = Node::cluster(n.initial_cluster());
        for (McsId m : alive_) {
            const Node l = Node::mcs(m);
            if (u_.node_leq(wf, l) && u_.node_leq(l, ni)) out.push_back(m);
        }
        return out;
    }

    std::vector<McsId> cand_r(const Trace& s, const Trace& e) const {
        std::vector<McsId> out;
        const Node sf = Node::cluster(s.final_cluster());
        const Node ei = Node::cluster(e.initial_cluster());
        for (McsId m : alive_) {
            const Node r = Node::mcs(m);
            if (u_.node_leq(sf, r) && u_.node_leq(r, ei)) out.push_back(m);
        }
        return out;
    }

    // ---- base maps --------------------------------------------------------

    template <typename Emit>
    void base_maps(Emit&& emit) {
        const std::size_t nc = u_.cluster_count();
        for (ClusterId c = 0; c < nc; ++c) {
            const std::vector<Trace>& lows = below(c);
            const std::vector<Trace>& ups = above(c);
            for (std::size_t si = 0; si <= lows.size(); ++si) {
                const std::optional<Trace> s =
                    si ? std::optional<Trace>(lows[si - 1]) : std::nullopt;
                for (std::size_t wi = 0; wi <= lows.size(); ++wi) {
                    const std::optional<Trace> w =
                        wi ? std::optional<Trace>(lows[wi - 1]) : std::nullopt;
                    const auto b_slots =
                        corner_slots(s && w, s && w ? cand_b(*s, *w)
                                                    : std::vector<McsId>{});
                    if (b_slots.empty()) continue;
                    for (std::size_t ni = 0; ni <= ups.size(); ++ni) {
                        const std::optional<Trace> n =
                            ni ? std::optional<Trace>(ups[ni - 1])
                               : std::nullopt;
                        const auto l_slots = corner_slots(
                            w && n,
                            w && n ? cand_l(*w, *n) : std::vector<McsId>{});
                        if (l_slots.empty()) continue;
                        for (std::size_t ei = 0; ei <= ups.size(); ++ei) {
                            const std::optional<Trace> e =
                                ei ? std::optional<Trace>(ups[ei - 1])
                                   : std::nullopt;
                            const auto t_slots = corner_slots(
                                n && e,
                                n && e ? cand_t(*n, *e)
                                       : std::vector<McsId>{});
                            if (t_slots.empty()) continue;
                            const auto r_slots = corner_slots(
                                s && e,
                                s && e ? cand_r(*s, *e)
                                       : std::vector<McsId>{});
                            if (r_slots.empty()) continue;
                            BoundaryMap bm = BoundaryMap::open(c, c);
                            bm.edge(Dir::S) = s;
                            bm.edge(Dir::W) = w;
                            bm.edge(Dir::N) = n;
                            bm.edge(Dir::E) = e;
                            for (const auto& bv : b_slots) {
                                bm.corner(Corn::B) = bv;
                                for (const auto& lv : l_slots) {
                                    bm.corner(Corn::L) = lv;
                                    for (const auto& tv : t_slots) {
                                        bm.corner(Corn::T) = tv;
                                        for (const auto& rv : r_slots) {
                                            bm.corner(Corn::R) = rv;
                                            budget_.tick();
                                            if (in_B0(u_, bm)) emit(bm);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // ---- limit targets ----------------------------------------------------

    template <typename Emit>
    void limit_targets(const BoundaryMap& bm, Dir d, Emit&& emit) {
        const bool lower = (d == Dir::W || d == Dir::S);
        const std::vector<Trace>& pool =
            lower ? below(bm.minus) : above(bm.plus);
        for (std::size_t ti = 0; ti <= pool.size(); ++ti) {
            const std::optional<Trace> ne =
                ti ? std::optional<Trace>(pool[ti - 1]) : std::nullopt;
            BoundaryMap t = bm;
            t.edge(d) = ne;
            // The two corners adjacent to the swept edge are the only other
            // slots allowed to change.
            Corn c1;
            Corn c2;
            std::vector<McsId> c1_cands;
            std::vector<McsId> c2_cands;
            bool c1_defined = false;
            bool c2_defined = false;
            switch (d) {
                case Dir::W:
                    c1 = Corn::B;
                    c2 = Corn::L;
                    c1_defined = t.edge(Dir::S).has_value() && ne.has_value();
                    c2_defined = ne.has_value() && t.edge(Dir::N).has_value();
                    if (c1_defined) c1_cands = cand_b(*t.edge(Dir::S), *ne);
                    if (c2_defined) c2_cands = cand_l(*ne, *t.edge(Dir::N));
                    break;
                case Dir::E:
                    c1 = Corn::T;
                    c2 = Corn::R;
                    c1_defined = t.edge(Dir::N).has_value() && ne.has_value();
                    c2_defined = t.edge(Dir::S).has_value() && ne.has_value();
                    if (c1_defined) c1_cands = cand_t(*t.edge(Dir::N), *ne);
                    if (c2_defined) c2_cands = cand_r(*t.edge(Dir::S), *ne);
                    break;
                case Dir::S:
                    c1 = Corn::B;
                    c2 = Corn::R;
                    c1_defined = ne.has_value() && t.edge(Dir::W).has_value();
                    c2_defined = ne.has_value() && t.edge(Dir::E).has_value();
                    if (c1_defined) c1_cands = cand_b(*ne, *t.edge(Dir::W));
                    if (c2_defined) c2_cands = cand_r(*ne, *t.edge(Dir::E));
                    break;
                default:  // Dir::N
                    c1 = Corn::T;
                    c2 = Corn::L;
                    c1_defined = ne.has_value() && t.edge(Dir::E).has_value();
                    c2_defined = t.edge(Dir::W).has_value() && ne.has_value();
                    if (c1_defined) c1_cands = cand_t(*ne, *t.edge(Dir::E));
                    if (c2_defined) c2_cands = cand_l(*t.edge(Dir::W), *ne);
                    break;
            }
            const auto s1 = corner_slots(c1_defined, std::move(c1_cands));
            if (s1.empty()) continue;
            const auto s2 = corner_slots(c2_defined, std::move(c2_cands));
            if (s2.empty()) continue;
            for (const auto& v1 : s1) {
                t.corner(c1) = v1;
                for (const auto& v2 : s2) {
                    t.corner(c2) = v2;
                    budget_.tick();
                    if (limit_rel(u_, bm, t, d)) emit(t);
                }
            }
        }
    }

    // ---- shuffle targets --------------------------------------------------

    // One-point parts that may take part in a shuffle between the two tips:
    // alive, reflexive (a point must reach itself), inside the band, every
    // own defect discharged into the matching tip.
    std::vector<McsId> eligible_points(ClusterId cm, ClusterId cp) const {
        std::vector<McsId> out;
        const Node lo = Node::cluster(cm);
        const Node hi = Node::cluster(cp);
        for (McsId m : alive_) {
            const Node p = Node::mcs(m);
            if (!u_.node_leq(lo, p) || !u_.node_leq(p, p) ||
                !u_.node_leq(p, hi)) {
                continue;
            }
            bool ok = true;
            for (std::uint32_t item : u_.future_defects(p)) {
                if (!u_.passes_up(item, p, hi)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                for (std::uint32_t item : u_.past_defects(p)) {
                    if (!u_.passes_down(item, p, lo)) {
                        ok = false;
                        break;
                    }
                }
            }
            if (ok) out.push_back(m);
        }
        return out;
    }

    // Whether a closed member may take part between the tips: its b/t
    // corners inside the band, every leftover defect discharged.
    bool eligible_closed(ClusterId cm, ClusterId cp, const BoundaryMap& part,
                         const std::vector<BmDefect>& defects) const {
        const Node lo = Node::cluster(cm);
        const Node hi = Node::cluster(cp);
        const Node pb = Node::mcs(*part.corner(Corn::B));
        const Node pt = Node::mcs(*part.corner(Corn::T));
        if (!u_.node_leq(lo, pb) || !u_.node_leq(pb, pt) ||
            !u_.node_leq(pt, hi)) {
            return false;
        }
        for (const BmDefect& d : defects) {
            const bool ok = d.future ? u_.passes_up(d.item, d.carrier, hi)
                                     : u_.passes_down(d.item, d.carrier, lo);
            if (!ok) return false;
        }
        return true;
    }

    template <typename Emit>
    void shuffle_targets(ClusterId cm, ClusterId cp,
                         const std::vector<BoundaryMap>& parts, Emit&& emit) {
        const std::vector<Trace>& lows = below(cm);
        const std::vector<Trace>& ups = above(cp);
        for (std::size_t si = 0; si <= lows.size(); ++si) {
            const std::optional<Trace> s =
                si ? std::optional<Trace>(lows[si - 1]) : std::nullopt;
            for (std::size_t wi = 0; wi <= lows.size(); ++wi) {
                const std::optional<Trace> w =
                    wi ? std::optional<Trace>(lows[wi - 1]) : std::nullopt;
                const auto b_slots =
                    corner_slots(s && w, s && w ? cand_b(*s, *w)
                                                : std::vector<McsId>{});
                if (b_slots.empty()) continue;
                for (std::size_t ni = 0; ni <= ups.size(); ++ni) {
                    const std::optional<Trace> n =
                        ni ? std::optional<Trace>(ups[ni - 1]) : std::nullopt;
                    const auto l_slots = corner_slots(
                        w && n, w && n ? cand_l(*w, *n)
                                       : std::vector<McsId>{});
                    if (l_slots.empty()) continue;
                    for (std::size_t ei = 0; ei <= ups.size(); ++ei) {
                        const std::optional<Trace> e =
                            ei ? std::optional<Trace>(ups[ei - 1])
                               : std::nullopt;
                        const auto t_slots = corner_slots(
                            n && e, n && e ? cand_t(*n, *e)
                                           : std::vector<McsId>{});
                        if (t_slots.empty()) continue;
                        const auto r_slots = corner_slots(
                            s && e, s && e ? cand_r(*s, *e)
                                           : std::vector<McsId>{});
                        if (r_slots.empty()) continue;
                        BoundaryMap bm = BoundaryMap::open(cm, cp);
                        bm.edge(Dir::S) = s;
                        bm.edge(Dir::W) = w;
                        bm.edge(Dir::N) = n;
                        bm.edge(Dir::E) = e;
                        for (const auto& bv : b_slots) {
                            bm.corner(Corn::B) = bv;
                            for (const auto& lv : l_slots) {
                                bm.corner(Corn::L) = lv;
                                for (const auto& tv : t_slots) {
                                    bm.corner(Corn::T) = tv;
                                    for (const auto& rv : r_slots) {
                                        bm.corner(Corn::R) = rv;
                                        budget_.tick();
                                        if (validate(u_, bm) &&
                                            is_shuffle(u_, bm, parts)) {
                                            emit(bm);
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

private:
    static std::vector<std::optional<McsId>> corner_slots(
        bool defined, std::vector<McsId> cands) {
        std::vector<std::optional<McsId>> out;
        if (!defined) {
            out.push_back(std::nullopt);
            return out;
        }
        out.reserve(cands.size());
        for (McsId m : cands) out.emplace_back(m);
        return out;
    }

    std::vector<Trace> enumerate(ClusterId tip, bool lower) {
        const std::size_t nc = u_.cluster_count();
        std::vector<ClusterId> dom;
        for (ClusterId c = 0; c < nc; ++c) {
            const bool in =
                lower ? u_.cluster_le(c, tip) : u_.cluster_le(tip, c);
            if (in) dom.push_back(c);
        }
        std::vector<Trace> out;
        std::vector<std::uint32_t> seq;
        auto step = [&](auto&& self, ClusterId cur) -> void {
            out.push_back(Trace{seq});
            if (out.size() > opt_.max_traces) {
                throw BudgetExceeded("trace enumeration budget exceeded");
            }
            for (ClusterId nxt : dom) {
                if (!u_.cluster_lt(cur, nxt)) continue;
                for (McsId m : alive_) {
                    if (!u_.node_leq(Node::cluster(cur), Node::mcs(m))) {
                        continue;
                    }
                    if (!u_.node_leq(Node::mcs(m), Node::cluster(nxt))) {
                        continue;
                    }
                    const bool side =
                        lower ? u_.node_leq(Node::mcs(m), Node::cluster(tip))
                              : u_.node_leq(Node::cluster(tip), Node::mcs(m));
                    if (!side) continue;
                    budget_.tick();
                    seq.push_back(m);
                    seq.push_back(nxt);
                    self(self, nxt);
                    seq.pop_back();
                    seq.pop_back();
                }
            }
        };
        for (ClusterId c : dom) {
            seq.assign(1, c);
            step(step, c);
        }
        return out;
    }

    const Universe& u_;
    const SolverOptions& opt_;
    Budget& budget_;
    std::vector<McsId> alive_;
    std::vector<std::optional<std::vector<Trace>>> below_;
    std::vector<std::optional<std::vector<Trace>>> above_;
};

// ---------------------------------------------------------------------------
// Root reference
// ---------------------------------------------------------------------------

SignedRef root_ref(const ClosureSet& cl, const FormulaPtr& f) {
    FormulaPtr cur = f;
    bool neg = false;
    while (cur && cur->kind == Kind::Neg) {
        neg = !neg;
        cur = cur->left;
    }
    const auto ix = cl.find(cur);
    if (!ix.has_value()) {
        throw std::invalid_argument("formula is not in the closure");
    }
    return SignedRef{*ix, neg};
}

// Seam signature for join-pair bucketing: the facing edge trace and the two
// corner slots that must agree under fits.  Only bucket matches can fit, so
// pairing is tried inside buckets only (a hash collision merely costs one
// failed attempt).
std::size_t seam_key(const Trace& t, const std::optional<McsId>& c1,
                     const std::optional<McsId>& c2) {
    std::size_t h = hash_trace(t);
    const auto mix = [&h](std::size_t v) {
        h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    };
    mix(c1.has_value() ? 1 + static_cast<std::size_t>(*c1) : 0);
    mix(c2.has_value() ? 1 + static_cast<std::size_t>(*c2) : 0);
    return h;
}

// Split-witness bookkeeping for one member: the limit rule in a direction
// needs every cut of the shared rail (W=E for horizontal sweeps, S=N for
// vertical ones) witnessed by a recorded join decomposition.  Witnesses are
// filled eagerly from the join stream, first hit per cut, so nothing else
// about the stream needs to be stored.
struct RailWits {
    bool horiz_need = false;
    bool vert_need = false;
    bool horiz_done = true;  // every horizontal cut witnessed (or none exist)
    bool vert_done = true;
    std::vector<std::optional<SplitWitness>> horiz;
    std::vector<std::optional<SplitWitness>> vert;
};

SolveStats collect_stats(const Universe& u, const SaturatedSet& b,
                         const TriSet* t, double wall) {
    SolveStats s;
    s.closure_items = u.cl().size();
    s.mcs_count = u.mcs_count();
    s.cluster_count = u.cluster_count();
    s.b_size = b.size();
    s.t_size = t ? t->size() : 0;
    s.rounds = b.stats.rounds;
    s.wall_seconds = wall;
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
}

}  // namespace

// ---------------------------------------------------------------------------
// saturate_B
// ---------------------------------------------------------------------------

SaturatedSet saturate_B(const Universe& u, const SolverOptions& opt) {
    Budget budget(opt);
    Gen gen(u, opt, budget);
    SaturatedSet sat;

    std::vector<RailWits> wits;                   // per member
    std::vector<std::array<bool, 4>> limit_done;  // per member, by dir

    auto insert = [&](const BoundaryMap& bm, Derivation deriv,
                      bool* inserted) -> std::uint32_t {
        const auto it = sat.index.find(bm);
        if (it != sat.index.end()) {
            if (inserted) *inserted = false;
            return it->second;
        }
        if (sat.members.size() >= opt.max_b) {
            throw BudgetExceeded("boundary-map set budget exceeded");
        }
        const auto id = static_cast<std::uint32_t>(sat.members.size());
        sat.members.push_back(bm);
        sat.origins.push_back(std::move(deriv));
        sat.index.emplace(bm, id);
        RailWits rw;
        if ((self_fits(u, bm, Dir::W) || self_fits(u, bm, Dir::E)) &&
            bm.edge(Dir::W).has_value()) {
            rw.horiz_need = true;
            rw.horiz.resize(bm.edge(Dir::W)->cluster_count() - 1);
            rw.horiz_done = rw.horiz.empty();
        }
        if ((self_fits(u, bm, Dir::S) || self_fits(u, bm, Dir::N)) &&
            bm.edge(Dir::S).has_value()) {
            rw.vert_need = true;
            rw.vert.resize(bm.edge(Dir::S)->cluster_count() - 1);
            rw.vert_done = rw.vert.empty();
        }
        wits.push_back(std::move(rw));
        limit_done.push_back({false, false, false, false});
        if (inserted) *inserted = true;
        return id;
    };

    // ---- base layer -------------------------------------------------------
    gen.base_maps([&](const BoundaryMap& bm) {
        Derivation d;
        d.rule = Derivation::Rule::Base;
        insert(bm, std::move(d), nullptr);
    });
    sat.stats.base_count = sat.size();

    // ---- shuffle bookkeeping ----------------------------------------------
    const std::size_t nc = u.cluster_count();
    std::vector<std::pair<ClusterId, ClusterId>> tip_pairs;
    for (ClusterId cm = 0; cm < nc; ++cm) {
        for (ClusterId cp = 0; cp < nc; ++cp) {
            if (u.cluster_lt(cm, cp)) tip_pairs.emplace_back(cm, cp);
        }
    }
    std::vector<std::optional<std::vector<McsId>>> pair_points(
        tip_pairs.size());
    // 0 = never ran; otherwise 1 + the closed-part population it ran with.
    constexpr std::size_t kNever = 0;
    constexpr std::size_t kDead = static_cast<std::size_t>(-1);
    std::vector<std::size_t> pair_ran(tip_pairs.size(), kNever);

    std::vector<std::optional<std::vector<BmDefect>>> defect_cache;
    auto closed_defects =
        [&](std::uint32_t id) -> const std::vector<BmDefect>& {
        if (defect_cache.size() <= id) defect_cache.resize(id + 1);
        if (!defect_cache[id]) {
            defect_cache[id] = bm_defects(u, sat.members[id]);
        }
        return *defect_cache[id];
    };

    // ---- rounds -----------------------------------------------------------
    std::size_t new_lo = 0;  // ids >= new_lo are new for the upcoming round
    bool progress = true;
    while (progress) {
        progress = false;
        ++sat.stats.rounds;
        const std::size_t cur = sat.size();

        // Joins: at least one premise must be new since the previous round.
        // Pairs come from a seam-signature index — fits requires the facing
        // edge and its two corner slots to agree, so only bucket matches can
        // succeed.  A join of valid fitting members is valid exactly when its
        // tips compare (every other validity clause chains across the seam),
        // so the insertion filter is that single comparison.
        for (Dir d : {Dir::N, Dir::E}) {
            const bool north = (d == Dir::N);
            std::unordered_map<std::size_t, std::vector<std::uint32_t>>
                by_seam;
            for (std::uint32_t bp = 0; bp < cur; ++bp) {
                const BoundaryMap& m = sat.members[bp];
                const auto& e = m.edge(north ? Dir::S : Dir::W);
                if (!e.has_value()) continue;
                const std::size_t key =
                    north ? seam_key(*e, m.corner(Corn::B), m.corner(Corn::R))
                          : seam_key(*e, m.corner(Corn::B), m.corner(Corn::L));
                by_seam[key].push_back(bp);
            }
            for (std::uint32_t a = 0; a < cur; ++a) {
                const BoundaryMap& ma = sat.members[a];
                const auto& e = ma.edge(north ? Dir::N : Dir::E);
                if (!e.has_value()) continue;
                const std::size_t key =
                    north
                        ? seam_key(*e, ma.corner(Corn::L), ma.corner(Corn::T))
                        : seam_key(*e, ma.corner(Corn::R), ma.corner(Corn::T));
                const auto bucket = by_seam.find(key);
                if (bucket == by_seam.end()) continue;
                for (std::uint32_t bp : bucket->second) {
                    if (a < new_lo && bp < new_lo) continue;
                    budget.tick();
                    ++sat.stats.join_attempts;
                    auto j = join(u, sat.members[a], sat.members[bp], d);
                    if (!j.has_value()) continue;
                    if (!u.cluster_le(j->minus, j->plus)) continue;
                    Derivation deriv;
                    deriv.rule = Derivation::Rule::Join;
                    deriv.dir = d;
                    deriv.premises = {a, bp};
                    bool ins = false;
                    const std::uint32_t id = insert(*j, std::move(deriv), &ins);
                    if (ins) {
                        ++sat.stats.join_count;
                        progress = true;
                    }
                    // Feed the decomposition to the member's split-witness
                    // table (first hit per cut wins).
                    RailWits& rw = wits[id];
                    if (north && rw.horiz_need && !rw.horiz_done) {
                        bool done = true;
                        for (std::size_t i = 0; i < rw.horiz.size(); ++i) {
                            if (!rw.horiz[i].has_value() &&
                                split(u, sat.members[id], Axis::Horiz, i,
                                      sat.members[a], sat.members[bp])) {
                                rw.horiz[i] = SplitWitness{
                                    static_cast<std::uint32_t>(i), a, bp};
                                ++sat.stats.recorded_joins;
                            }
                            done = done && rw.horiz[i].has_value();
                        }
                        rw.horiz_done = done;
                    } else if (!north && rw.vert_need && !rw.vert_done) {
                        bool done = true;
                        for (std::size_t i = 0; i < rw.vert.size(); ++i) {
                            if (!rw.vert[i].has_value() &&
                                split(u, sat.members[id], Axis::Vert, i,
                                      sat.members[a], sat.members[bp])) {
                                rw.vert[i] = SplitWitness{
                                    static_cast<std::uint32_t>(i), a, bp};
                                ++sat.stats.recorded_joins;
                            }
                            done = done && rw.vert[i].has_value();
                        }
                        rw.vert_done = done;
                    }
                }
            }
        }
        new_lo = cur;

        // Limits: a member that abuts itself in a direction is swept once
        // every cut of its shared rail is witnessed.  The witness tables only
        // fill over time, so a pending member is retried each round.
        for (std::uint32_t i = 0; i < sat.size(); ++i) {
            for (Dir d : {Dir::W, Dir::E, Dir::S, Dir::N}) {
                if (limit_done[i][dir_ix(d)]) continue;
                const BoundaryMap premise = sat.members[i];
                if (!self_fits(u, premise, d)) {
                    limit_done[i][dir_ix(d)] = true;
                    continue;
                }
                const bool horiz = (d == Dir::W || d == Dir::E);
                const bool rail_defined =
                    premise.edge(horiz ? Dir::W : Dir::S).has_value();
                std::vector<SplitWitness> cut_wits;
                if (rail_defined) {
                    const RailWits& rw = wits[i];
                    if (horiz ? !rw.horiz_done : !rw.vert_done) continue;
                    const auto& filled = horiz ? rw.horiz : rw.vert;
                    cut_wits.reserve(filled.size());
                    for (const auto& sw : filled) cut_wits.push_back(*sw);
                }
                gen.limit_targets(premise, d, [&](const BoundaryMap& t) {
                    Derivation deriv;
                    deriv.rule = Derivation::Rule::Limit;
                    deriv.dir = d;
                    deriv.premises = {i, 0};
                    deriv.splits = cut_wits;
                    bool ins = false;
                    insert(t, std::move(deriv), &ins);
                    if (ins) {
                        ++sat.stats.limit_count;
                        progress = true;
                    }
                });
                limit_done[i][dir_ix(d)] = true;
            }
        }

        // Shuffles: between each strictly related tip pair, against the
        // maximal eligible part set.  Eligibility of a part never changes,
        // and parts only accumulate, so a pair is re-enumerated exactly when
        // its closed-part population grew.
        std::vector<std::uint32_t> closed_ids;
        for (std::uint32_t i = 0; i < sat.size(); ++i) {
            if (sat.members[i].closed_proper()) closed_ids.push_back(i);
        }
        for (std::size_t pi = 0; pi < tip_pairs.size(); ++pi) {
            if (pair_ran[pi] == kDead) continue;
            const ClusterId cm = tip_pairs[pi].first;
            const ClusterId cp = tip_pairs[pi].second;
            if (!pair_points[pi]) {
                pair_points[pi] = gen.eligible_points(cm, cp);
            }
            const std::vector<McsId>& pts = *pair_points[pi];
            if (pts.empty()) {
                // A shuffle needs at least one one-point part.
                pair_ran[pi] = kDead;
                continue;
            }
            std::vector<std::uint32_t> ecl;
            for (std::uint32_t id : closed_ids) {
                budget.tick();
                if (gen.eligible_closed(cm, cp, sat.members[id],
                                        closed_defects(id))) {
                    ecl.push_back(id);
                }
            }
            if (pair_ran[pi] == 1 + ecl.size()) continue;
            std::vector<BoundaryMap> parts;
            parts.reserve(pts.size() + ecl.size());
            for (McsId m : pts) parts.push_back(BoundaryMap::point(m));
            for (std::uint32_t id : ecl) parts.push_back(sat.members[id]);
            gen.shuffle_targets(cm, cp, parts, [&](const BoundaryMap& t) {
                Derivation deriv;
                deriv.rule = Derivation::Rule::Shuffle;
                deriv.part_members = ecl;
                deriv.part_points = pts;
                bool ins = false;
                insert(t, std::move(deriv), &ins);
                if (ins) {
                    ++sat.stats.shuffle_count;
                    progress = true;
                }
            });
            pair_ran[pi] = 1 + ecl.size();
        }
    }
    return sat;
}

// ---------------------------------------------------------------------------
// saturate_T
// ---------------------------------------------------------------------------

TriSet saturate_T(const Universe& u, const SaturatedSet& b,
                  const SolverOptions& opt) {
    Budget budget(opt);
    Gen gen(u, opt, budget);
    TriSet tri;

    auto insert = [&](const TriBoundaryMap& t, TriDerivation deriv,
                      bool* inserted) -> std::uint32_t {
        const auto it = tri.index.find(t);
        if (it != tri.index.end()) {
            if (inserted) *inserted = false;
            return it->second;
        }
        if (tri.members.size() >= opt.max_b) {
            throw BudgetExceeded("triangular-map set budget exceeded");
        }
        const auto id = static_cast<std::uint32_t>(tri.members.size());
        tri.members.push_back(t);
        tri.origins.push_back(deriv);
        tri.index.emplace(t, id);
        if (inserted) *inserted = true;
        return id;
    };

    // ---- base triangles ---------------------------------------------------
    const std::size_t nc = u.cluster_count();
    for (ClusterId c = 0; c < nc; ++c) {
        const std::vector<Trace>& ups = gen.above(c);
        const std::vector<Trace>& lows = gen.below(c);
        for (std::size_t ni = 0; ni <= ups.size(); ++ni) {
            const std::optional<Trace> n =
                ni ? std::optional<Trace>(ups[ni - 1]) : std::nullopt;
            for (std::size_t wi = 0; wi <= lows.size(); ++wi) {
                const std::optional<Trace> w =
                    wi ? std::optional<Trace>(lows[wi - 1]) : std::nullopt;
                std::vector<std::optional<McsId>> l_slots;
                if (n && w) {
                    for (McsId m : gen.cand_l(*w, *n)) l_slots.emplace_back(m);
                } else {
                    l_slots.push_back(std::nullopt);
                }
                for (const auto& lv : l_slots) {
                    TriBoundaryMap t;
                    t.n = n;
                    t.w = w;
                    t.l = lv;
                    t.minus = c;
                    t.plus = c;
                    budget.tick();
                    if (tri_validate(u, t) && in_T0(u, t)) {
                        TriDerivation deriv;
                        deriv.rule = TriDerivation::Rule::Base;
                        bool ins = false;
                        const auto id = insert(t, deriv, &ins);
                        if (ins) tri.base_ids.push_back(id);
                    }
                }
            }
        }
    }

    // ---- closure under composition ----------------------------------------
    std::vector<std::uint32_t> bs;  // members of B with a S and E edge
    for (std::uint32_t i = 0; i < b.members.size(); ++i) {
        if (b.members[i].is_point) continue;
        if (b.members[i].edge(Dir::S).has_value() &&
            b.members[i].edge(Dir::E).has_value()) {
            bs.push_back(i);
        }
    }
    std::size_t lo = 0;
    while (lo < tri.size()) {
        const std::size_t hi = tri.size();
        for (std::uint32_t t1 = static_cast<std::uint32_t>(lo);
             t1 < hi; ++t1) {
            for (std::uint32_t bid : bs) {
                for (std::uint32_t t0 : tri.base_ids) {
                    budget.tick();
                    auto r = tri_join(u, tri.members[t1], b.members[bid],
                                      tri.members[t0]);
                    if (!r.has_value() || !tri_validate(u, *r)) continue;
                    TriDerivation deriv;
                    deriv.rule = TriDerivation::Rule::TriJoin;
                    deriv.tau1 = t1;
                    deriv.bm = bid;
                    deriv.tau0 = t0;
                    insert(*r, deriv, nullptr);
                }
            }
        }
        lo = hi;
    }
    return tri;
}

// ---------------------------------------------------------------------------
// sat_in_boundary
// ---------------------------------------------------------------------------

std::optional<FourSquare> sat_in_boundary(const Universe& u,
                                          const SaturatedSet& b,
                                          const BoundaryMap& bm,
                                          const FormulaPtr& f) {
    if (bm.is_point) return std::nullopt;
    const SignedRef root = root_ref(u.cl(), f);

    struct Half {
        BoundaryMap map;
        std::uint32_t a;
        std::uint32_t b;
    };

    // Definedness of each outer edge survives both joins unchanged (two
    // defined edges concatenate, two undefined edges stay undefined), the
    // outer corners of the assembly come from one quadrant each, and the
    // assembly's tips are the SW member's lower tip and the NE member's
    // upper tip.  These necessary conditions prune the pools sharply.
    const bool want_s = bm.edge(Dir::S).has_value();
    const bool want_n = bm.edge(Dir::N).has_value();
    const bool want_w = bm.edge(Dir::W).has_value();
    const bool want_e = bm.edge(Dir::E).has_value();

    for (McsId x = 0; x < u.mcs_count(); ++x) {
        if (!u.alive(x) || !u.mcs_has(x, root)) continue;
        // Quadrant pools: the member's corner facing the centre must be x,
        // the two centre-facing edges must be defined (they are the seams of
        // the assembling joins), and the outward-facing components must agree
        // with the target map.
        std::vector<std::uint32_t> sw;
        std::vector<std::uint32_t> se;
        std::vector<std::uint32_t> nw;
        std::vector<std::uint32_t> ne;
        for (std::uint32_t i = 0; i < b.members.size(); ++i) {
            const BoundaryMap& m = b.members[i];
            if (m.is_point) continue;
            const bool has_s = m.edge(Dir::S).has_value();
            const bool has_n = m.edge(Dir::N).has_value();
            const bool has_w = m.edge(Dir::W).has_value();
            const bool has_e = m.edge(Dir::E).has_value();
            if (m.corner(Corn::T).has_value() && *m.corner(Corn::T) == x &&
                has_n && has_e && has_s == want_s && has_w == want_w &&
                m.minus == bm.minus &&
                m.corner(Corn::B) == bm.corner(Corn::B)) {
                sw.push_back(i);
            }
            if (m.corner(Corn::L).has_value() && *m.corner(Corn::L) == x &&
                has_n && has_w && has_s == want_s && has_e == want_e &&
                m.corner(Corn::R) == bm.corner(Corn::R)) {
                se.push_back(i);
            }
            if (m.corner(Corn::R).has_value() && *m.corner(Corn::R) == x &&
                has_s && has_e && has_n == want_n && has_w == want_w &&
                m.corner(Corn::L) == bm.corner(Corn::L)) {
                nw.push_back(i);
            }
            if (m.corner(Corn::B).has_value() && *m.corner(Corn::B) == x &&
                has_s && has_w && has_n == want_n && has_e == want_e &&
                m.plus == bm.plus &&
                m.corner(Corn::T) == bm.corner(Corn::T)) {
                ne.push_back(i);
            }
        }
        // Bottom row: SW ⊕_E SE must reproduce bm's southern components.
        std::vector<Half> bottoms;
        for (std::uint32_t i : sw) {
            for (std::uint32_t j : se) {
                auto jn = join(u, b.members[i], b.members[j], Dir::E);
                if (!jn.has_value()) continue;
                if (jn->minus != bm.minus) continue;
                if (!(jn->edge(Dir::S) == bm.edge(Dir::S))) continue;
                if (!(jn->corner(Corn::B) == bm.corner(Corn::B))) continue;
                if (!(jn->corner(Corn::R) == bm.corner(Corn::R))) continue;
                bottoms.push_back({std::move(*jn), i, j});
            }
        }
        if (bottoms.empty()) continue;
        // Top row: NW ⊕_E NE must reproduce bm's northern components.
        std::vector<Half> tops;
        for (std::uint32_t i : nw) {
            for (std::uint32_t j : ne) {
                auto jn = join(u, b.members[i], b.members[j], Dir::E);
                if (!jn.has_value()) continue;
                if (jn->plus != bm.plus) continue;
                if (!(jn->edge(Dir::N) == bm.edge(Dir::N))) continue;
                if (!(jn->corner(Corn::T) == bm.corner(Corn::T))) continue;
                if (!(jn->corner(Corn::L) == bm.corner(Corn::L))) continue;
                tops.push_back({std::move(*jn), i, j});
            }
        }
        for (const Half& bot : bottoms) {
            for (const Half& top : tops) {
                auto full = join(u, bot.map, top.map, Dir::N);
                if (!full.has_value()) continue;
                if (*full == bm) {
                    FourSquare fs;
                    fs.quads = {bot.a, bot.b, top.a, top.b};
                    fs.corner = x;
                    return fs;
                }
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Frame procedures
// ---------------------------------------------------------------------------

SolveResult sat_plane(const FormulaPtr& f, bool reflexive,
                      const SolverOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const FormulaPtr solved = reflexive ? reflexive_translate(f) : f;
    Universe u(solved, FiltrationOptions{opt.max_mcs, opt.prune});
    SaturatedSet b = saturate_B(u, opt);

    std::optional<SatWitness> w;
    const std::size_t nc = u.cluster_count();
    for (ClusterId c = 0; c < nc && !w; ++c) {
        for (ClusterId d = 0; d < nc && !w; ++d) {
            BoundaryMap target = BoundaryMap::open(c, d);
            if (!validate(u, target)) continue;
            if (auto fs = sat_in_boundary(u, b, target, solved)) {
                SatWitness sw;
                sw.shape = SatWitness::Shape::Plane;
                sw.fs = *fs;
                w = sw;
            }
        }
    }

    const SolveStats st = collect_stats(u, b, nullptr, seconds_since(t0));
    return SolveResult{w.has_value() ? Outcome::Sat : Outcome::Unsat,
                       reflexive ? FrameKind::Refl2d : FrameKind::Irr2d,
                       f,
                       solved,
                       false,
                       std::move(u),
                       std::move(b),
                       std::nullopt,
                       std::move(w),
                       st};
}

SolveResult sat_halfplane(const FormulaPtr& f, bool reflexive,
                          const SolverOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const FormulaPtr solved = reflexive ? reflexive_translate(f) : f;
    Universe u(solved, FiltrationOptions{opt.max_mcs, opt.prune});
    SaturatedSet b = saturate_B(u, opt);
    TriSet tri = saturate_T(u, b, opt);

    // ∂ with domain {S, E, r} is the inner rectangle: a triangle on its
    // west flank and a base triangle on its east flank tile the half-plane
    // when the composition is open and valid.
    std::optional<SatWitness> w;
    for (std::uint32_t bid = 0;
         bid < b.members.size() && !w.has_value(); ++bid) {
        const BoundaryMap& inner = b.members[bid];
        if (inner.is_point) continue;
        if (!inner.edge(Dir::S).has_value() ||
            !inner.edge(Dir::E).has_value()) {
            continue;
        }
        if (inner.edge(Dir::W).has_value() ||
            inner.edge(Dir::N).has_value()) {
            continue;
        }
        const auto fs = sat_in_boundary(u, b, inner, solved);
        if (!fs.has_value()) continue;
        for (std::uint32_t t1 = 0;
             t1 < tri.members.size() && !w.has_value(); ++t1) {
            const TriBoundaryMap& west = tri.members[t1];
            if (west.w.has_value() || west.l.has_value() ||
                !west.n.has_value()) {
                continue;
            }
            if (!(*west.n == *inner.edge(Dir::S))) continue;
            for (std::uint32_t t0i : tri.base_ids) {
                const TriBoundaryMap& east = tri.members[t0i];
                if (east.n.has_value() || east.l.has_value() ||
                    !east.w.has_value()) {
                    continue;
                }
                if (!(*east.w == *inner.edge(Dir::E))) continue;
                auto comp = tri_join(u, west, inner, east);
                if (!comp.has_value()) continue;
                if (comp->n.has_value() || comp->w.has_value() ||
                    comp->l.has_value()) {
                    continue;
                }
                if (!tri_validate(u, *comp)) continue;
                SatWitness sw;
                sw.shape = SatWitness::Shape::Halfplane;
                sw.fs = *fs;
                sw.tau1 = t1;
                sw.hb = bid;
                sw.tau0 = t0i;
                w = sw;
                break;
            }
        }
    }

    const SolveStats st = collect_stats(u, b, &tri, seconds_since(t0));
    return SolveResult{
        w.has_value() ? Outcome::Sat : Outcome::Unsat,
        reflexive ? FrameKind::HalfplaneRefl : FrameKind::HalfplaneIrr,
        f,
        solved,
        false,
        std::move(u),
        std::move(b),
        std::move(tri),
        std::move(w),
        st};
}

SolveResult sat_square(const FormulaPtr& f, const SolverOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    Universe u(f, FiltrationOptions{opt.max_mcs, opt.prune});
    SaturatedSet b = saturate_B(u, opt);
    const SignedRef root = root_ref(u.cl(), f);

    struct Half {
        BoundaryMap map;
        std::uint32_t a;
        std::uint32_t b;
    };

    // Four closed rectangles around a corner satisfying f, glued into one
    // closed rectangle with nothing left open: that rectangle is the whole
    // square.
    std::optional<SatWitness> w;
    for (McsId x = 0; x < u.mcs_count() && !w.has_value(); ++x) {
        if (!u.alive(x) || !u.mcs_has(x, root)) continue;
        std::vector<std::uint32_t> sw;
        std::vector<std::uint32_t> se;
        std::vector<std::uint32_t> nw;
        std::vector<std::uint32_t> ne;
        for (std::uint32_t i = 0; i < b.members.size(); ++i) {
            const BoundaryMap& m = b.members[i];
            if (!m.closed_proper()) continue;
            if (*m.corner(Corn::T) == x) sw.push_back(i);
            if (*m.corner(Corn::L) == x) se.push_back(i);
            if (*m.corner(Corn::R) == x) nw.push_back(i);
            if (*m.corner(Corn::B) == x) ne.push_back(i);
        }
        std::vector<Half> bottoms;
        for (std::uint32_t i : sw) {
            for (std::uint32_t j : se) {
                auto jn = join(u, b.members[i], b.members[j], Dir::E);
                if (jn.has_value()) bottoms.push_back({std::move(*jn), i, j});
            }
        }
        if (bottoms.empty()) continue;
        std::vector<Half> tops;
        for (std::uint32_t i : nw) {
            for (std::uint32_t j : ne) {
                auto jn = join(u, b.members[i], b.members[j], Dir::E);
                if (jn.has_value()) tops.push_back({std::move(*jn), i, j});
            }
        }
        for (const Half& bot : bottoms) {
            for (const Half& top : tops) {
                auto full = join(u, bot.map, top.map, Dir::N);
                if (!full.has_value()) continue;
                if (!validate(u, *full)) continue;
                if (!bm_defects(u, *full).empty()) continue;
                SatWitness sq;
                sq.shape = SatWitness::Shape::Square;
                sq.fs.quads = {bot.a, bot.b, top.a, top.b};
                sq.fs.corner = x;
                w = sq;
                break;
            }
            if (w.has_value()) break;
        }
    }

    const SolveStats st = collect_stats(u, b, nullptr, seconds_since(t0));
    return SolveResult{w.has_value() ? Outcome::Sat : Outcome::Unsat,
                       FrameKind::Square,
                       f,
                       f,
                       false,
                       std::move(u),
                       std::move(b),
                       std::nullopt,
                       std::move(w),
                       st};
}

SolveResult sat_containment(const FormulaPtr& f, bool strict,
                            const SolverOptions& opt) {
    const FormulaPtr base = strict ? f : reflexive_translate(f);
    const FormulaPtr reduced = rho_reduction(base);
    SolveResult r = sat_square(reduced, opt);
    r.frame = strict ? FrameKind::ContainStrict : FrameKind::Contain;
    r.query = f;
    return r;
}

SolveResult solve(const FormulaPtr& f, FrameKind frame,
                  const SolverOptions& opt) {
    switch (frame) {
        case FrameKind::Irr2d:
            return sat_plane(f, false, opt);
        case FrameKind::Refl2d:
            return sat_plane(f, true, opt);
        case FrameKind::HalfplaneIrr:
            return sat_halfplane(f, false, opt);
        case FrameKind::HalfplaneRefl:
            return sat_halfplane(f, true, opt);
        case FrameKind::Square:
            return sat_square(f, opt);
        case FrameKind::ContainStrict:
            return sat_containment(f, true, opt);
        default:
            return sat_containment(f, false, opt);
    }
}

SolveResult valid(const FormulaPtr& f, FrameKind frame,
                  const SolverOptions& opt) {
    const FormulaPtr negated = normalize(make_neg(f));
    SolveResult r = solve(negated, frame, opt);
    r.outcome =
        (r.outcome == Outcome::Sat) ? Outcome::NotValid : Outcome::Valid;
    r.negated = true;
    r.query = f;
    return r;
}

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

const char* frame_name(FrameKind frame) {
    switch (frame) {
        case FrameKind::Irr2d:
            return "irr2d";
        case FrameKind::Refl2d:
            return "refl2d";
        case FrameKind::HalfplaneIrr:
            return "halfplane-irr";
        case FrameKind::HalfplaneRefl:
            return "halfplane-refl";
        case FrameKind::Square:
            return "square";
        case FrameKind::ContainStrict:
            return "contain-strict";
        default:
            return "contain";
    }
}

std::optional<FrameKind> frame_from_name(std::string_view name) {
    if (name == "irr2d") return FrameKind::Irr2d;
    if (name == "refl2d") return FrameKind::Refl2d;
    if (name == "halfplane-irr" || name == "interval-L") {
        return FrameKind::HalfplaneIrr;
    }
    if (name == "halfplane-refl" || name == "interval-LE") {
        return FrameKind::HalfplaneRefl;
    }
    if (name == "square") return FrameKind::Square;
    if (name == "contain-strict") return FrameKind::ContainStrict;
    if (name == "contain") return FrameKind::Contain;
    return std::nullopt;
}

const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Sat:
            return "SAT";
        case Outcome::Unsat:
            return "UNSAT";
        case Outcome::Valid:
            return "VALID";
        default:
            return "NOT_VALID";
    }
}

}  // namespace mtl
