// ============================================================================
// poset.cpp — FinitePoset construction, validation, JSON I/O, fixtures
// ============================================================================

#include "mtl/poset.hpp"

#include <json.hpp>

#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mtl {

namespace {

void check_point_names(const std::vector<std::string>& points) {
    std::unordered_set<std::string> seen;
    for (const auto& p : points) {
        if (p.empty()) {
            throw std::invalid_argument("poset: empty point name");
        }
        if (!seen.insert(p).second) {
            throw std::invalid_argument("poset: duplicate point name '" + p + "'");
        }
    }
}

}  // namespace

bool FinitePoset::contains(const std::string& name) const {
    for (const auto& p : points_) {
        if (p == name) return true;
    }
    return false;
}

std::size_t FinitePoset::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i] == name) return i;
    }
    throw std::invalid_argument("poset: unknown point '" + name + "'");
}

void FinitePoset::check_transitive() const {
    const std::size_t n = points_.size();
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (!related(a, b)) continue;
            for (std::size_t c = 0; c < n; ++c) {
                if (related(b, c) && !related(a, c)) {
                    throw std::invalid_argument(
                        "poset: relation not transitive: " + points_[a] + " < " +
                        points_[b] + " < " + points_[c] + " but not " + points_[a] +
                        " < " + points_[c]);
                }
            }
        }
    }
}

FinitePoset FinitePoset::from_edges(
    std::vector<std::string> points,
    const std::vector<std::pair<std::string, std::string>>& edges) {
    check_point_names(points);
    FinitePoset ps;
    ps.points_ = std::move(points);
    ps.rel_.assign(ps.points_.size() * ps.points_.size(), 0);
    for (const auto& [a, b] : edges) {
        ps.rel_[ps.index_of(a) * ps.points_.size() + ps.index_of(b)] = 1;
    }
    ps.check_transitive();
    return ps;
}

FinitePoset FinitePoset::from_covering_edges(
    std::vector<std::string> points,
    const std::vector<std::pair<std::string, std::string>>& edges) {
    check_point_names(points);
    FinitePoset ps;
    ps.points_ = std::move(points);
    const std::size_t n = ps.points_.size();
    ps.rel_.assign(n * n, 0);
    for (const auto& [a, b] : edges) {
        ps.rel_[ps.index_of(a) * n + ps.index_of(b)] = 1;
    }
    // Warshall closure. Reflexive loops are not introduced: a < a only arises
    // from a declared loop or a cycle through it.
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t a = 0; a < n; ++a) {
            if (!ps.rel_[a * n + k]) continue;
            for (std::size_t b = 0; b < n; ++b) {
                if (ps.rel_[k * n + b]) ps.rel_[a * n + b] = 1;
            }
        }
    }
    ps.check_transitive();
    return ps;
}

std::string FinitePoset::to_json() const {
    nlohmann::ordered_json j;
    j["points"] = points_;
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < points_.size(); ++a) {
        for (std::size_t b = 0; b < points_.size(); ++b) {
            if (related(a, b)) {
                edges.push_back({points_[a], points_[b]});
            }
        }
    }
    j["edges"] = std::move(edges);
    return j.dump();
}

FinitePoset FinitePoset::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("poset: bad JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("points") || !j.contains("edges") ||
        !j["points"].is_array() || !j["edges"].is_array()) {
        throw std::invalid_argument(
            "poset: expected {\"points\": [...], \"edges\": [[a,b], ...]}");
    }
    std::vector<std::string> points;
    for (const auto& p : j["points"]) {
        if (!p.is_string()) {
            throw std::invalid_argument("poset: point names must be strings");
        }
        points.push_back(p.get<std::string>());
    }
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
            throw std::invalid_argument("poset: each edge must be a [from, to] pair");
        }
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
    // from_edges validates transitive closedness of the serialized relation.
    return from_edges(std::move(points), edges);
}

// ============================================================================
// Fixtures
// ============================================================================

FinitePoset p1_poset() {
    std::vector<std::string> points = {"u",   "p0m", "p0p", "p1m", "p1p",
                                       "p2m", "p2p", "p3m", "p3p", "s"};
    std::vector<std::pair<std::string, std::string>> cover;
    for (int i = 0; i < 4; ++i) {
        const std::string m = "p" + std::to_string(i) + "m";
        const std::string p = "p" + std::to_string(i) + "p";
        cover.emplace_back("u", m);
        cover.emplace_back(m, p);
        cover.emplace_back(p, "s");
    }
    return FinitePoset::from_covering_edges(std::move(points), cover);
}

FinitePoset p2_poset() {
    std::vector<std::string> points = {"u", "p0", "p1", "q0", "q1", "q2", "s"};
    std::vector<std::pair<std::string, std::string>> cover;
    for (int i = 0; i < 2; ++i) {
        const std::string p = "p" + std::to_string(i);
        cover.emplace_back("u", p);
        for (int j = 0; j < 3; ++j) {
            cover.emplace_back(p, "q" + std::to_string(j));
        }
    }
    for (int j = 0; j < 3; ++j) {
        cover.emplace_back("q" + std::to_string(j), "s");
    }
    return FinitePoset::from_covering_edges(std::move(points), cover);
}

FinitePoset square_poset() {
    std::vector<std::string> points = {"b",  "eS", "eW", "beta",  "d1", "d2",
                                       "l",  "r",  "alpha", "eN", "eE", "t"};
    std::vector<std::pair<std::string, std::string>> cover = {
        {"b", "eW"},    {"b", "eS"},                  // bottom corner
        {"eW", "beta"}, {"eW", "l"},                  // west edge
        {"eS", "beta"}, {"eS", "r"},                  // south edge
        {"beta", "d1"}, {"beta", "d2"},               // lower interior
        {"d1", "alpha"}, {"d2", "alpha"},             // diagonal halves
        {"alpha", "eN"}, {"alpha", "eE"},             // upper interior
        {"l", "eN"},    {"r", "eE"},                  // side corners
        {"eN", "t"},    {"eE", "t"},                  // top corner
        // reflexive loops on the open edges and the interior regions
        {"eS", "eS"}, {"eW", "eW"}, {"eN", "eN"}, {"eE", "eE"},
        {"alpha", "alpha"}, {"beta", "beta"},
    };
    return FinitePoset::from_covering_edges(std::move(points), cover);
}

}  // namespace mtl
