// ============================================================================
// kripke.cpp — finite structure construction, evaluation, relativization
// ============================================================================

#include "mtl/kripke.hpp"

#include <json.hpp>

#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mtl {

namespace {

void check_point_names(const std::vector<std::string>& points) {
    std::unordered_set<std::string> seen;
    for (const auto& p : points) {
        if (p.empty()) {
            throw std::invalid_argument("kripke: empty point name");
        }
        if (!seen.insert(p).second) {
            throw std::invalid_argument("kripke: duplicate point name '" + p + "'");
        }
    }
}

}  // namespace

KripkeStructure KripkeStructure::create(
    std::vector<std::string> points,
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::map<std::string, std::vector<std::string>>& valuation) {
    check_point_names(points);
    KripkeStructure s;
    s.points_ = std::move(points);
    const std::size_t n = s.points_.size();
    s.rel_.assign(n * n, 0);
    for (const auto& [a, b] : edges) {
        s.rel_[s.index_of(a) * n + s.index_of(b)] = 1;
    }
    for (const auto& [prop, where] : valuation) {
        if (prop.empty()) {
            throw std::invalid_argument("kripke: empty proposition name");
        }
        std::vector<std::uint8_t> bits(n, 0);
        for (const auto& name : where) {
            bits[s.index_of(name)] = 1;
        }
        s.valuation_.emplace(prop, std::move(bits));
    }
    return s;
}

KripkeStructure KripkeStructure::canonical(const FinitePoset& poset) {
    KripkeStructure s;
    s.points_ = poset.points();
    const std::size_t n = s.points_.size();
    s.rel_.assign(n * n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (poset.related(a, b)) s.rel_[a * n + b] = 1;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint8_t> bits(n, 0);
        bits[i] = 1;
        s.valuation_.emplace(s.points_[i], std::move(bits));
    }
    return s;
}

std::size_t KripkeStructure::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i] == name) return i;
    }
    throw std::invalid_argument("kripke: unknown point '" + name + "'");
}

bool KripkeStructure::contains_point(const std::string& name) const {
    for (const auto& p : points_) {
        if (p == name) return true;
    }
    return false;
}

bool KripkeStructure::prop_true_at(const std::string& prop, std::size_t x) const {
    auto it = valuation_.find(prop);
    if (it == valuation_.end()) return false;  // undeclared propositions: false
    return it->second[x] != 0;
}

std::vector<std::uint8_t> KripkeStructure::eval_all(const FormulaPtr& f) const {
    assert(is_normalized(f));
    const std::size_t n = points_.size();
    // Memoized per AST node; shared subtrees evaluate once.
    std::unordered_map<const Formula*, std::vector<std::uint8_t>> memo;

    auto rec = [&](auto&& self, const FormulaPtr& g) -> const std::vector<std::uint8_t>& {
        auto it = memo.find(g.get());
        if (it != memo.end()) return it->second;
        std::vector<std::uint8_t> bits(n, 0);
        switch (g->kind) {
            case Kind::Prop: {
                auto vit = valuation_.find(g->name);
                if (vit != valuation_.end()) bits = vit->second;
                break;
            }
            case Kind::Neg: {
                const auto& c = self(self, g->left);
                for (std::size_t i = 0; i < n; ++i) bits[i] = !c[i];
                break;
            }
            case Kind::Or: {
                const auto& l = self(self, g->left);
                const auto& r = self(self, g->right);
                for (std::size_t i = 0; i < n; ++i) bits[i] = l[i] || r[i];
                break;
            }
            case Kind::Future: {
                const auto& c = self(self, g->left);
                for (std::size_t x = 0; x < n; ++x) {
                    for (std::size_t y = 0; y < n; ++y) {
                        if (rel_[x * n + y] && c[y]) {
                            bits[x] = 1;
                            break;
                        }
                    }
                }
                break;
            }
            case Kind::Past: {
                const auto& c = self(self, g->left);
                for (std::size_t x = 0; x < n; ++x) {
                    for (std::size_t y = 0; y < n; ++y) {
                        if (rel_[y * n + x] && c[y]) {
                            bits[x] = 1;
                            break;
                        }
                    }
                }
                break;
            }
        }
        return memo.emplace(g.get(), std::move(bits)).first->second;
    };

    return rec(rec, f);
}

bool KripkeStructure::eval(const FormulaPtr& f, std::size_t x) const {
    if (x >= points_.size()) {
        throw std::invalid_argument("kripke: point index out of range");
    }
    return eval_all(f)[x] != 0;
}

KripkeStructure KripkeStructure::relativized(const std::string& prop) const {
    auto vit = valuation_.find(prop);
    if (vit == valuation_.end()) {
        throw std::invalid_argument("kripke: relativizing to undeclared '" +
                                    prop + "'");
    }
    const std::vector<std::uint8_t>& keep = vit->second;
    KripkeStructure sub;
    std::vector<std::size_t> old_index;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (keep[i]) {
            sub.points_.push_back(points_[i]);
            old_index.push_back(i);
        }
    }
    const std::size_t m = sub.points_.size();
    sub.rel_.assign(m * m, 0);
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
            sub.rel_[a * m + b] =
                rel_[old_index[a] * points_.size() + old_index[b]];
        }
    }
    for (const auto& [name, bits] : valuation_) {
        std::vector<std::uint8_t> rbits(m, 0);
        for (std::size_t a = 0; a < m; ++a) rbits[a] = bits[old_index[a]];
        sub.valuation_.emplace(name, std::move(rbits));
    }
    return sub;
}

std::string KripkeStructure::to_json() const {
    nlohmann::ordered_json j;
    j["points"] = points_;
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < points_.size(); ++a) {
        for (std::size_t b = 0; b < points_.size(); ++b) {
            if (related(a, b)) edges.push_back({points_[a], points_[b]});
        }
    }
    j["edges"] = std::move(edges);
    nlohmann::ordered_json val = nlohmann::ordered_json::object();
    for (const auto& [name, bits] : valuation_) {
        nlohmann::ordered_json where = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < points_.size(); ++i) {
            if (bits[i]) where.push_back(points_[i]);
        }
        val[name] = std::move(where);
    }
    j["valuation"] = std::move(val);
    return j.dump();
}

KripkeStructure KripkeStructure::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("kripke: bad JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("points") || !j["points"].is_array()) {
        throw std::invalid_argument(
            "kripke: expected {\"points\":[...], \"edges\":[...], "
            "\"valuation\":{...}}");
    }
    std::vector<std::string> points;
    for (const auto& p : j["points"]) {
        if (!p.is_string()) {
            throw std::invalid_argument("kripke: point names must be strings");
        }
        points.push_back(p.get<std::string>());
    }
    std::vector<std::pair<std::string, std::string>> edges;
    if (j.contains("edges")) {
        if (!j["edges"].is_array()) {
            throw std::invalid_argument("kripke: edges must be an array");
        }
        for (const auto& e : j["edges"]) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
                !e[1].is_string()) {
                throw std::invalid_argument(
                    "kripke: each edge must be a [from, to] pair");
            }
            edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
        }
    }
    std::map<std::string, std::vector<std::string>> valuation;
    if (j.contains("valuation")) {
        if (!j["valuation"].is_object()) {
            throw std::invalid_argument("kripke: valuation must be an object");
        }
        for (const auto& [name, where] : j["valuation"].items()) {
            if (!where.is_array()) {
                throw std::invalid_argument(
                    "kripke: valuation entries must be point arrays");
            }
            std::vector<std::string> pts;
            for (const auto& w : where) {
                if (!w.is_string()) {
                    throw std::invalid_argument(
                        "kripke: valuation points must be strings");
                }
                pts.push_back(w.get<std::string>());
            }
            valuation.emplace(name, std::move(pts));
        }
    }
    return create(std::move(points), edges, valuation);
}

BuiltinFrames builtin_frames() {
    return BuiltinFrames{p1_poset(), p2_poset(), square_poset()};
}

}  // namespace mtl
