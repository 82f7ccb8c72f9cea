// ============================================================================
// filtration.cpp — MCS enumeration, order matrix, clusters, traces
// ============================================================================

#include "mtl/filtration.hpp"

#include <json.hpp>

#include <algorithm>
#include <cassert>
#include <sstream>

namespace mtl {

namespace {

bool signed_bit(McsBits bits, SignedRef r) {
    const bool bit = (bits >> r.index) & 1;
    return r.negated ? !bit : bit;
}

}  // namespace

std::size_t hash_trace(const Trace& t) {
    std::size_t h = t.seq.size();
    for (std::uint32_t v : t.seq) {
        h ^= v + 0x9e3779b9u + (h << 6) + (h >> 2);
    }
    return h;
}

std::string bits_to_string(McsBits bits, std::size_t width) {
    std::string out(width, '0');
    for (std::size_t i = 0; i < width; ++i) {
        if ((bits >> i) & 1) out[i] = '1';
    }
    return out;
}

std::optional<McsBits> bits_from_string(const std::string& text) {
    if (text.empty() || text.size() > 64) return std::nullopt;
    McsBits bits = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1') {
            bits |= McsBits{1} << i;
        } else if (text[i] != '0') {
            return std::nullopt;
        }
    }
    return bits;
}

// ----------------------------------------------------------------------------
// construction
// ----------------------------------------------------------------------------

Universe::Universe(FormulaPtr f, FiltrationOptions opts)
    : formula_(std::move(f)), cl_(formula_), opts_(opts) {
    if (cl_.size() > 64) {
        std::ostringstream msg;
        msg << "closure requires " << cl_.size()
            << " subformula slots, exceeding the 64-slot representation";
        throw BudgetExceeded(msg.str());
    }
    for (std::size_t i = 0; i < cl_.size(); ++i) {
        switch (cl_.item(i).kind) {
            case Kind::Or: or_mask_ |= McsBits{1} << i; break;
            case Kind::Future: future_mask_ |= McsBits{1} << i; break;
            case Kind::Past: past_mask_ |= McsBits{1} << i; break;
            default: break;
        }
    }
    enumerate_mcs();
    build_order();
    alive_.assign(mcs_bits_.size(), 1);
    if (opts_.prune) run_prune();
    build_clusters();
}

void Universe::enumerate_mcs() {
    const std::vector<std::uint32_t>& free = cl_.free_items();
    const std::size_t k = free.size();
    if (k >= 63 || (std::uint64_t{1} << k) > opts_.max_mcs) {
        std::ostringstream msg;
        msg << "universe requires 2^" << k
            << " maximal consistent sets, exceeding the configured cap of "
            << opts_.max_mcs;
        throw BudgetExceeded(msg.str());
    }
    const std::uint64_t total = std::uint64_t{1} << k;
    mcs_bits_.reserve(total);
    for (std::uint64_t c = 0; c < total; ++c) {
        McsBits bits = 0;
        // Counter bit 0 is the last free item: earlier free items vary
        // slowest, giving lexicographic order over the full bit vectors.
        for (std::size_t j = 0; j < k; ++j) {
            if ((c >> (k - 1 - j)) & 1) bits |= McsBits{1} << free[j];
        }
        // Disjunction bits are derived bottom-up (children precede parents).
        for (std::size_t i = 0; i < cl_.size(); ++i) {
            if (!((or_mask_ >> i) & 1)) continue;
            const ClosureItem& item = cl_.item(i);
            if (signed_bit(bits, item.left) || signed_bit(bits, item.right)) {
                bits |= McsBits{1} << i;
            }
        }
        mcs_bits_.push_back(bits);
    }
}

void Universe::build_order() {
    const std::size_t n = mcs_bits_.size();
    // For each MCS: its positive modal bits, and the modal items whose
    // operand it satisfies (signed).
    std::vector<McsBits> fbits(n), pbits(n), witf(n), witp(n);
    for (std::size_t m = 0; m < n; ++m) {
        fbits[m] = mcs_bits_[m] & future_mask_;
        pbits[m] = mcs_bits_[m] & past_mask_;
        McsBits wf = 0;
        McsBits wp = 0;
        for (std::size_t i = 0; i < cl_.size(); ++i) {
            const ClosureItem& item = cl_.item(i);
            if (item.kind == Kind::Future &&
                signed_bit(mcs_bits_[m], item.left)) {
                wf |= McsBits{1} << i;
            }
            if (item.kind == Kind::Past &&
                signed_bit(mcs_bits_[m], item.left)) {
                wp |= McsBits{1} << i;
            }
        }
        witf[m] = wf;
        witp[m] = wp;
    }
    // order(m, n): everything n demands of its past is present in m
    // (operand or obligation of an F-item in n forces the F-item in m), and
    // dually everything m demands of its future is present in n.
    order_words_ = (n + 63) / 64;
    order_.assign(n * order_words_, 0);
    reflexive_.assign(n, 0);
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t o = 0; o < n; ++o) {
            const bool fut = ((witf[o] | fbits[o]) & ~fbits[m]) == 0;
            const bool pst = ((witp[m] | pbits[m]) & ~pbits[o]) == 0;
            if (fut && pst) {
                order_[m * order_words_ + o / 64] |= std::uint64_t{1}
                                                     << (o % 64);
            }
        }
        reflexive_[m] = static_cast<std::uint8_t>(order_rel(
            static_cast<McsId>(m), static_cast<McsId>(m)));
    }
    // Per-MCS defect lists: every positive modal bit is an obligation.
    mcs_future_defects_.assign(n, {});
    mcs_past_defects_.assign(n, {});
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t i = 0; i < cl_.size(); ++i) {
            if ((fbits[m] >> i) & 1) {
                mcs_future_defects_[m].push_back(
                    static_cast<std::uint32_t>(i));
            }
            if ((pbits[m] >> i) & 1) {
                mcs_past_defects_[m].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }
}

void Universe::run_prune() {
    // Iteratively drop MCSs owning an obligation no surviving MCS receives.
    // A reflexive MCS receives its own modal obligations, so only
    // irreflexive MCSs are ever dropped and clusters are unaffected.
    const std::size_t n = mcs_bits_.size();
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t m = 0; m < n; ++m) {
            if (!alive_[m]) continue;
            bool ok = true;
            for (std::uint32_t i : mcs_future_defects_[m]) {
                const SignedRef operand = cl_.item(i).left;
                bool received = false;
                for (std::size_t o = 0; o < n && !received; ++o) {
                    if (!alive_[o]) continue;
                    if (!order_rel(static_cast<McsId>(m),
                                   static_cast<McsId>(o))) {
                        continue;
                    }
                    received = signed_bit(mcs_bits_[o], operand) ||
                               ((mcs_bits_[o] >> i) & 1);
                }
                if (!received) {
                    ok = false;
                    break;
                }
            }
            for (std::size_t d = 0; ok && d < mcs_past_defects_[m].size();
                 ++d) {
                const std::uint32_t i = mcs_past_defects_[m][d];
                const SignedRef operand = cl_.item(i).left;
                bool received = false;
                for (std::size_t o = 0; o < n && !received; ++o) {
                    if (!alive_[o]) continue;
                    if (!order_rel(static_cast<McsId>(o),
                                   static_cast<McsId>(m))) {
                        continue;
                    }
                    received = signed_bit(mcs_bits_[o], operand) ||
                               ((mcs_bits_[o] >> i) & 1);
                }
                if (!received) ok = false;
            }
            if (!ok) {
                alive_[m] = 0;
                changed = true;
            }
        }
    }
}

void Universe::build_clusters() {
    const std::size_t n = mcs_bits_.size();
    cluster_of_.assign(n, kNoCluster);
    for (std::size_t m = 0; m < n; ++m) {
        if (!reflexive_[m] || !alive_[m] || cluster_of_[m] != kNoCluster) {
            continue;
        }
        Cluster c;
        for (std::size_t o = m; o < n; ++o) {
            if (!reflexive_[o] || !alive_[o]) continue;
            if (order_rel(static_cast<McsId>(m), static_cast<McsId>(o)) &&
                order_rel(static_cast<McsId>(o), static_cast<McsId>(m))) {
                cluster_of_[o] = static_cast<std::uint32_t>(clusters_.size());
                c.members.push_back(static_cast<McsId>(o));
            }
        }
        c.union_bits = 0;
        c.inter_bits = ~McsBits{0};
        for (McsId member : c.members) {
            c.union_bits |= mcs_bits_[member];
            c.inter_bits &= mcs_bits_[member];
        }
        clusters_.push_back(std::move(c));
    }
    const std::size_t cn = clusters_.size();
    cluster_le_.assign(cn * cn, 0);
    for (std::size_t c = 0; c < cn; ++c) {
        for (std::size_t d = 0; d < cn; ++d) {
            cluster_le_[c * cn + d] = static_cast<std::uint8_t>(
                order_rel(clusters_[c].rep(), clusters_[d].rep()));
        }
    }
    // Cluster defect lists: modal bits are shared across a cluster's
    // members, so the representative's bits name the obligations; an
    // obligation is a defect when its operand escapes the member union.
    cluster_future_defects_.assign(cn, {});
    cluster_past_defects_.assign(cn, {});
    for (std::size_t c = 0; c < cn; ++c) {
        const McsBits rep_bits = mcs_bits_[clusters_[c].rep()];
        for (std::size_t i = 0; i < cl_.size(); ++i) {
            if (!((rep_bits >> i) & 1)) continue;
            const ClosureItem& item = cl_.item(i);
            if (item.kind != Kind::Future && item.kind != Kind::Past) {
                continue;
            }
            if (union_has(static_cast<ClusterId>(c), item.left)) continue;
            if (item.kind == Kind::Future) {
                cluster_future_defects_[c].push_back(
                    static_cast<std::uint32_t>(i));
            } else {
                cluster_past_defects_[c].push_back(
                    static_cast<std::uint32_t>(i));
            }
        }
    }
}

// ----------------------------------------------------------------------------
// queries
// ----------------------------------------------------------------------------

std::optional<McsId> Universe::find_mcs(McsBits bits) const {
    for (std::size_t m = 0; m < mcs_bits_.size(); ++m) {
        if (mcs_bits_[m] == bits) return static_cast<McsId>(m);
    }
    return std::nullopt;
}

bool Universe::node_leq(Node a, Node b) const {
    if (a.is_mcs() && b.is_mcs()) {
        return a.id == b.id || order_rel(a.id, b.id);
    }
    if (a.is_mcs()) return order_rel(a.id, clusters_[b.id].rep());
    if (b.is_mcs()) return order_rel(clusters_[a.id].rep(), b.id);
    return cluster_le(a.id, b.id);
}

const std::vector<std::uint32_t>& Universe::future_defects(Node a) const {
    return a.is_mcs() ? mcs_future_defects_[a.id]
                      : cluster_future_defects_[a.id];
}

const std::vector<std::uint32_t>& Universe::past_defects(Node a) const {
    return a.is_mcs() ? mcs_past_defects_[a.id] : cluster_past_defects_[a.id];
}

bool Universe::passes_up(std::uint32_t f_item, Node a, Node b) const {
    assert([&] {
        const std::vector<std::uint32_t>& d = future_defects(a);
        return std::find(d.begin(), d.end(), f_item) != d.end();
    }());
    if (!node_leq(a, b)) return false;
    return node_has(b, cl_.item(f_item).left) ||
           node_has(b, SignedRef{f_item, false});
}

bool Universe::passes_down(std::uint32_t p_item, Node a, Node b) const {
    assert([&] {
        const std::vector<std::uint32_t>& d = past_defects(a);
        return std::find(d.begin(), d.end(), p_item) != d.end();
    }());
    if (!node_leq(b, a)) return false;
    return node_has(b, cl_.item(p_item).left) ||
           node_has(b, SignedRef{p_item, false});
}

// ----------------------------------------------------------------------------
// traces
// ----------------------------------------------------------------------------

bool Universe::validate_trace(const Trace& t) const {
    if (t.seq.empty() || t.seq.size() % 2 == 0) return false;
    const std::size_t k = t.seq.size() / 2;
    for (std::size_t i = 0; i <= k; ++i) {
        if (t.cluster_at(i) >= clusters_.size()) return false;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const McsId m = t.mcs_at(i);
        if (m >= mcs_bits_.size() || !alive_[m]) return false;
    }
    for (std::size_t i = 0; i < k; ++i) {
        const ClusterId lo = t.cluster_at(i);
        const ClusterId hi = t.cluster_at(i + 1);
        const McsId m = t.mcs_at(i);
        if (!cluster_lt(lo, hi)) return false;
        if (!node_leq(Node::cluster(lo), Node::mcs(m))) return false;
        if (!node_leq(Node::mcs(m), Node::cluster(hi))) return false;
    }
    return true;
}

std::vector<TraceDefect> Universe::trace_defects(const Trace& t) const {
    std::vector<TraceDefect> out;
    const std::size_t len = t.seq.size();
    for (std::size_t pos = 0; pos < len; ++pos) {
        const Node here = t.node_at(pos);
        for (std::uint32_t i : future_defects(here)) {
            if (pos + 1 == len || !passes_up(i, here, t.node_at(pos + 1))) {
                out.push_back(TraceDefect{
                    i, true, static_cast<std::uint32_t>(pos)});
            }
        }
        for (std::uint32_t i : past_defects(here)) {
            if (pos == 0 || !passes_down(i, here, t.node_at(pos - 1))) {
                out.push_back(TraceDefect{
                    i, false, static_cast<std::uint32_t>(pos)});
            }
        }
    }
    return out;
}

std::optional<Trace> Universe::concat_traces(const Trace& t, McsId m,
                                             const Trace& t2) const {
    if (m >= mcs_bits_.size() || !alive_[m]) return std::nullopt;
    const ClusterId left = t.final_cluster();
    const ClusterId right = t2.initial_cluster();
    if (!node_leq(Node::cluster(left), Node::mcs(m))) return std::nullopt;
    if (!node_leq(Node::mcs(m), Node::cluster(right))) return std::nullopt;
    Trace out = t;
    if (left == right) {
        // m lies both above and below the shared cluster, hence inside it:
        // the traces are merged and m is dropped.
        out.seq.insert(out.seq.end(), t2.seq.begin() + 1, t2.seq.end());
        return out;
    }
    if (!cluster_lt(left, right)) return std::nullopt;
    out.seq.push_back(m);
    out.seq.insert(out.seq.end(), t2.seq.begin(), t2.seq.end());
    return out;
}

// ----------------------------------------------------------------------------
// cluster graph
// ----------------------------------------------------------------------------

std::uint32_t Universe::chain_height(ClusterId lo, ClusterId hi) const {
    assert(cluster_le(lo, hi));
    if (lo == hi) return 0;
    const std::size_t cn = clusters_.size();
    // The strict cluster order is transitively closed, so the number of
    // strict predecessors is a topological key.
    std::vector<std::uint32_t> pred_count(cn, 0);
    for (std::size_t c = 0; c < cn; ++c) {
        for (std::size_t d = 0; d < cn; ++d) {
            if (c != d && cluster_le_[c * cn + d]) ++pred_count[d];
        }
    }
    std::vector<ClusterId> topo(cn);
    for (std::size_t c = 0; c < cn; ++c) topo[c] = static_cast<ClusterId>(c);
    std::sort(topo.begin(), topo.end(), [&](ClusterId a, ClusterId b) {
        if (pred_count[a] != pred_count[b]) {
            return pred_count[a] < pred_count[b];
        }
        return a < b;
    });
    constexpr std::int64_t kUnreachable = -1;
    std::vector<std::int64_t> dist(cn, kUnreachable);
    dist[lo] = 0;
    for (ClusterId d : topo) {
        if (d == lo || !cluster_lt(lo, d)) continue;
        std::int64_t best = kUnreachable;
        for (std::size_t c = 0; c < cn; ++c) {
            if (dist[c] == kUnreachable || !cluster_lt(static_cast<ClusterId>(c), d)) {
                continue;
            }
            best = std::max(best, dist[c] + 1);
        }
        dist[d] = best;
    }
    assert(dist[hi] != kUnreachable);
    return static_cast<std::uint32_t>(dist[hi]);
}

// ----------------------------------------------------------------------------
// debug dump
// ----------------------------------------------------------------------------

std::string Universe::dump_json() const {
    nlohmann::json doc;
    doc["formula"] = print(formula_);
    nlohmann::json items = nlohmann::json::array();
    for (std::size_t i = 0; i < cl_.size(); ++i) {
        items.push_back(cl_.item_string(static_cast<std::uint32_t>(i)));
    }
    doc["items"] = std::move(items);
    nlohmann::json mcs = nlohmann::json::array();
    std::string refl(mcs_bits_.size(), '0');
    std::string live(mcs_bits_.size(), '0');
    for (std::size_t m = 0; m < mcs_bits_.size(); ++m) {
        mcs.push_back(bits_to_string(mcs_bits_[m], cl_.size()));
        if (reflexive_[m]) refl[m] = '1';
        if (alive_[m]) live[m] = '1';
    }
    doc["mcs"] = std::move(mcs);
    doc["reflexive"] = refl;
    doc["alive"] = live;
    nlohmann::json clusters = nlohmann::json::array();
    for (const Cluster& c : clusters_) {
        clusters.push_back(c.members);
    }
    doc["clusters"] = std::move(clusters);
    nlohmann::json order = nlohmann::json::array();
    for (std::size_t m = 0; m < mcs_bits_.size(); ++m) {
        std::string row(mcs_bits_.size(), '0');
        for (std::size_t o = 0; o < mcs_bits_.size(); ++o) {
            if (order_rel(static_cast<McsId>(m), static_cast<McsId>(o))) {
                row[o] = '1';
            }
        }
        order.push_back(row);
    }
    doc["order"] = std::move(order);
    return doc.dump(2);
}

}  // namespace mtl
