#pragma once
// ============================================================================
// filtration.hpp — MCS universe: enumeration, order, clusters, traces
// ============================================================================
//
// Building block of the decision procedure: the finitely many "point types"
// a model can realize. A maximal consistent set (MCS) assigns a polarity to
// every subformula in a closure set, subject to boolean coherence; MCSs are
// packed into 64-bit vectors. On top of them sit a preorder (who may lie in
// whose future), its equivalence classes of reflexive MCSs (clusters), the
// unsatisfied modal obligations of each point type (defects), and finite
// ascending alternating sequences of clusters and MCSs (traces) describing
// everything a time-like line can carry.
//
// KEY DESIGN DECISIONS:
// ─────────────────────
// 1. MCS = boolean-coherent signed subset, not a provability check. Only the
//    polarities of atoms and modal subformulas are free; disjunction bits are
//    derived bottom-up. Incoherent-but-unprovable combinations are harmless:
//    they can never occur in a defect-free decoration, so they only cost
//    space.
//
// 2. Enumeration is DFS over the free indices in increasing order, false
//    branch first, which yields exactly lexicographic order over the full
//    bit vectors (the first differing bit between two coherent assignments
//    is always a free bit). Ids are positions in this order — fully
//    deterministic, so certificates can reference MCSs by id.
//
// 3. The preorder is evaluated with four precomputed masks per MCS (its
//    positive F-bits and P-bits, and the F/P items whose operand it
//    satisfies), making each order query a handful of word operations; the
//    full matrix is materialized bit-packed (≤ 2 MB at the 4096-MCS cap).
//
// 4. All members of a cluster carry identical modal bits (both order
//    directions force F/P agreement), so a cluster's modal data can be read
//    off any member; only atom/disjunction bits vary inside a cluster, which
//    is why clusters also cache union and intersection vectors.
//
// 5. The optional prune switch iteratively discards MCSs owning a defect
//    that no surviving MCS can receive. A reflexive MCS always receives its
//    own modal obligations, so pruning only ever removes irreflexive MCSs
//    and the cluster structure is prune-invariant; ids are never renumbered,
//    pruned MCSs are only flagged dead. Verdicts must not depend on the
//    switch (property-tested).
//
// ============================================================================

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtl/formula.hpp"

namespace mtl {

// Raised when a computation would exceed a configured resource cap. Carries a
// human-readable reason (e.g. the required bit width); callers map it to the
// distinguished budget verdict, never to unsatisfiability.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& msg) : std::runtime_error(msg) {}
};

using McsBits = std::uint64_t;  // bit i = closure item i is positive
using McsId = std::uint32_t;
using ClusterId = std::uint32_t;

constexpr std::uint32_t kNoCluster = 0xffffffffu;

struct FiltrationOptions {
    std::size_t max_mcs = 4096;  // cap on 2^(free items)
    bool prune = false;          // drop MCSs with unreceivable defects
};

struct Cluster {
    std::vector<McsId> members;  // ascending; front() is the representative
    McsBits union_bits = 0;
    McsBits inter_bits = 0;

    McsId rep() const { return members.front(); }
};

// A trace element: either a single MCS or a cluster.
struct Node {
    enum class Sort : std::uint8_t { Mcs, Cluster };
    Sort sort;
    std::uint32_t id;

    static Node mcs(McsId m) { return {Sort::Mcs, m}; }
    static Node cluster(ClusterId c) { return {Sort::Cluster, c}; }
    bool is_mcs() const { return sort == Sort::Mcs; }

    friend bool operator==(const Node& a, const Node& b) {
        return a.sort == b.sort && a.id == b.id;
    }
};

// Alternating sequence c0, m0, c1, ..., m_{k-1}, c_k stored flat; even
// positions hold cluster ids, odd positions MCS ids. Always odd length.
struct Trace {
    std::vector<std::uint32_t> seq;

    static Trace single(ClusterId c) { return Trace{{c}}; }

    std::size_t length() const { return seq.size(); }
    std::size_t cluster_count() const { return seq.size() / 2 + 1; }
    ClusterId cluster_at(std::size_t i) const { return seq[2 * i]; }
    McsId mcs_at(std::size_t i) const { return seq[2 * i + 1]; }
    ClusterId initial_cluster() const { return seq.front(); }
    ClusterId final_cluster() const { return seq.back(); }
    Node node_at(std::size_t pos) const {
        return (pos % 2 == 0) ? Node::cluster(seq[pos]) : Node::mcs(seq[pos]);
    }

    friend bool operator==(const Trace& a, const Trace& b) {
        return a.seq == b.seq;
    }
};

std::size_t hash_trace(const Trace& t);

// An unsatisfied modal obligation of one element of a trace.
struct TraceDefect {
    std::uint32_t item;      // closure index of the F/P subformula
    bool future;             // true: F-defect, false: P-defect
    std::uint32_t position;  // index into Trace::seq of the owning element

    friend bool operator==(const TraceDefect& a, const TraceDefect& b) {
        return a.item == b.item && a.future == b.future &&
               a.position == b.position;
    }
};

// '0'/'1' rendering of the low `width` bits (character j = item j).
std::string bits_to_string(McsBits bits, std::size_t width);
std::optional<McsBits> bits_from_string(const std::string& text);

class Universe {
public:
    // f must be normalized. Throws BudgetExceeded when the closure needs more
    // than 64 item slots or the universe more than opts.max_mcs MCSs.
    explicit Universe(FormulaPtr f, FiltrationOptions opts = {});

    const FormulaPtr& formula() const { return formula_; }
    const ClosureSet& cl() const { return cl_; }
    const FiltrationOptions& options() const { return opts_; }

    // ---- MCSs ----
    std::size_t mcs_count() const { return mcs_bits_.size(); }
    McsBits mcs_bits(McsId m) const { return mcs_bits_[m]; }
    bool alive(McsId m) const { return alive_[m] != 0; }
    bool mcs_has(McsId m, SignedRef r) const {
        const bool bit = (mcs_bits_[m] >> r.index) & 1;
        return r.negated ? !bit : bit;
    }
    bool mcs_reflexive(McsId m) const { return reflexive_[m] != 0; }
    std::optional<McsId> find_mcs(McsBits bits) const;

    // The preorder: may n lie in m's (reflexive: non-strict) future.
    bool order_rel(McsId m, McsId n) const {
        const std::size_t w = order_words_;
        return (order_[m * w + n / 64] >> (n % 64)) & 1;
    }

    // ---- clusters ----
    std::size_t cluster_count() const { return clusters_.size(); }
    const Cluster& cluster(ClusterId c) const { return clusters_[c]; }
    std::optional<ClusterId> cluster_of(McsId m) const {
        if (cluster_of_[m] == kNoCluster) return std::nullopt;
        return cluster_of_[m];
    }
    // Signed membership in the union over the cluster's members.
    bool union_has(ClusterId c, SignedRef r) const {
        const Cluster& cl = clusters_[c];
        if (r.negated) return ((cl.inter_bits >> r.index) & 1) == 0;
        return ((cl.union_bits >> r.index) & 1) == 1;
    }

    bool cluster_le(ClusterId c, ClusterId d) const {
        return cluster_le_[c * clusters_.size() + d] != 0;
    }
    bool cluster_lt(ClusterId c, ClusterId d) const {
        return c != d && cluster_le(c, d);
    }

    // ---- lifted order and membership on nodes ----
    bool node_leq(Node a, Node b) const;
    bool node_has(Node a, SignedRef r) const {
        return a.is_mcs() ? mcs_has(a.id, r) : union_has(a.id, r);
    }

    // ---- defects ----
    // Closure indices of F-items (future) / P-items (past) that are
    // obligations of the node: for an MCS every positive modal bit, for a
    // cluster every positive modal bit whose operand escapes the union.
    const std::vector<std::uint32_t>& future_defects(Node a) const;
    const std::vector<std::uint32_t>& past_defects(Node a) const;

    // defect must be an obligation of a (asserted). passes_up: b is above a
    // and b contains the operand (signed) or the F-item itself positively;
    // passes_down dual with b below a.
    bool passes_up(std::uint32_t f_item, Node a, Node b) const;
    bool passes_down(std::uint32_t p_item, Node a, Node b) const;

    // ---- traces ----
    bool validate_trace(const Trace& t) const;
    std::vector<TraceDefect> trace_defects(const Trace& t) const;
    // Defined when final(t) ≤ m ≤ initial(t2) and the end clusters are equal
    // (m is dropped, the shared cluster merged) or strictly ordered (m is
    // inserted between them); nullopt otherwise.
    std::optional<Trace> concat_traces(const Trace& t, McsId m,
                                       const Trace& t2) const;

    // ---- cluster graph ----
    // Length (edge count) of the longest strictly increasing cluster chain
    // from lo to hi; requires cluster_le(lo, hi). 0 when lo == hi.
    std::uint32_t chain_height(ClusterId lo, ClusterId hi) const;

    // Debug rendering: items, MCS bit vectors, reflexivity, clusters, order
    // matrix rows.
    std::string dump_json() const;

private:
    void enumerate_mcs();
    void build_order();
    void run_prune();
    void build_clusters();

    FormulaPtr formula_;
    ClosureSet cl_;
    FiltrationOptions opts_;

    McsBits or_mask_ = 0;      // items of kind Or
    McsBits future_mask_ = 0;  // items of kind Future
    McsBits past_mask_ = 0;    // items of kind Past

    std::vector<McsBits> mcs_bits_;
    std::vector<std::uint8_t> reflexive_;
    std::vector<std::uint8_t> alive_;
    std::size_t order_words_ = 0;
    std::vector<std::uint64_t> order_;  // bit-packed rows

    std::vector<Cluster> clusters_;
    std::vector<std::uint32_t> cluster_of_;  // kNoCluster when irreflexive

    std::vector<std::uint8_t> cluster_le_;
    std::vector<std::uint32_t> chain_height_;  // longest-chain matrix

    std::vector<std::vector<std::uint32_t>> mcs_future_defects_;
    std::vector<std::vector<std::uint32_t>> mcs_past_defects_;
    std::vector<std::vector<std::uint32_t>> cluster_future_defects_;
    std::vector<std::vector<std::uint32_t>> cluster_past_defects_;
};

}  // namespace mtl
