#pragma once
// Metric multigraphs: vertices carrying a delta coupling (real strength,
// 0 = standard/Kirchhoff) or a Dirichlet pin, edges carrying positive
// lengths. Loops and parallel edges are allowed everywhere.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qgt/errors.hpp"

namespace qgt {

using VertexId = std::string;
using EdgeId = std::string;

// ===== core types ===========================================================

struct VertexCondition {
    enum class Kind { Delta, Dirichlet };

    Kind kind = Kind::Delta;
    double strength = 0.0;  // meaningful only when kind == Delta

    static VertexCondition delta(double s) { return {Kind::Delta, s}; }
    static VertexCondition dirichlet() { return {Kind::Dirichlet, 0.0}; }
    bool is_dirichlet() const { return kind == Kind::Dirichlet; }

    friend bool operator==(const VertexCondition&, const VertexCondition&) = default;
};

struct Vertex {
    VertexId id;
    VertexCondition condition;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
    EdgeId id;
    VertexId tail;
    VertexId head;
    double length = 1.0;

    bool is_loop() const { return tail == head; }

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct MetricGraph {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;

    std::optional<std::size_t> vertex_index(const VertexId& id) const {
        for (std::size_t i = 0; i < vertices.size(); ++i)
            if (vertices[i].id == id) return i;
        return std::nullopt;
    }
    std::optional<std::size_t> edge_index(const EdgeId& id) const {
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (edges[i].id == id) return i;
        return std::nullopt;
    }
    const Vertex& vertex(const VertexId& id) const {
        auto i = vertex_index(id);
        if (!i) throw Error("unknown vertex '" + id + "'");
        return vertices[*i];
    }
    Vertex& vertex(const VertexId& id) {
        auto i = vertex_index(id);
        if (!i) throw Error("unknown vertex '" + id + "'");
        return vertices[*i];
    }
    const Edge& edge(const EdgeId& id) const {
        auto i = edge_index(id);
        if (!i) throw Error("unknown edge '" + id + "'");
        return edges[*i];
    }
    Edge& edge(const EdgeId& id) {
        auto i = edge_index(id);
        if (!i) throw Error("unknown edge '" + id + "'");
        return edges[*i];
    }

    friend bool operator==(const MetricGraph&, const MetricGraph&) = default;
};

/// One endpoint slot of an edge as seen from a vertex.
struct IncidentEnd {
    std::size_t edge = 0;  // index into MetricGraph::edges
    bool at_head = false;

    friend bool operator==(const IncidentEnd&, const IncidentEnd&) = default;
};

/// Incident edge ends per vertex index. A loop shows up twice at its vertex.
inline std::vector<std::vector<IncidentEnd>> incidence(const MetricGraph& g) {
    std::vector<std::vector<IncidentEnd>> inc(g.vertices.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        auto t = g.vertex_index(g.edges[e].tail);
        auto h = g.vertex_index(g.edges[e].head);
        if (t) inc[*t].push_back({e, false});
        if (h) inc[*h].push_back({e, true});
    }
    return inc;
}

// ===== validation ===========================================================

struct Violation {
    std::string code;    // stable machine-readable identifier
    std::string detail;  // human-readable context

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Collect every violated structural invariant. An empty result means the
/// graph is well formed (it may still be disconnected).
inline std::vector<Violation> validate(const MetricGraph& g) {
    std::vector<Violation> out;
    if (g.vertices.empty()) out.push_back({"empty-vertex-set", "graph has no vertices"});
    if (g.edges.empty()) out.push_back({"empty-edge-set", "graph has no edges"});

    std::map<VertexId, int> vseen;
    for (const auto& v : g.vertices) {
        if (++vseen[v.id] == 2)
            out.push_back({"duplicate-vertex-id", "vertex id '" + v.id + "' appears more than once"});
        if (!v.condition.is_dirichlet() && !std::isfinite(v.condition.strength))
            out.push_back({"non-finite-strength", "vertex '" + v.id + "' has non-finite strength"});
    }
    std::map<EdgeId, int> eseen;
    for (const auto& e : g.edges) {
        if (++eseen[e.id] == 2)
            out.push_back({"duplicate-edge-id", "edge id '" + e.id + "' appears more than once"});
        if (!std::isfinite(e.length))
            out.push_back({"non-finite-length", "edge '" + e.id + "' has non-finite length"});
        else if (e.length <= 0.0)
            out.push_back({"non-positive-length", "edge '" + e.id + "' has non-positive length"});
        for (const VertexId* end : {&e.tail, &e.head})
            if (!g.vertex_index(*end))
                out.push_back({"unknown-endpoint",
                               "edge '" + e.id + "' references missing vertex '" + *end + "'"});
    }
    return out;
}

/// Throw InvalidGraph carrying the first violation, if any.
inline void require_valid(const MetricGraph& g) {
    auto v = validate(g);
    if (!v.empty()) throw InvalidGraph(v.front().code + ": " + v.front().detail);
}

// ===== connectivity =========================================================

namespace detail {

class Dsu {
  public:
    explicit Dsu(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

  private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Connectivity of the underlying metric space. With exclude_dirichlet the
/// Dirichlet vertices are treated as removed points: edge ends rejoin each
/// other only at surviving vertices, the edges themselves survive as
/// segments, and a cycle through a single Dirichlet vertex stays connected.
inline bool is_connected(const MetricGraph& g, bool exclude_dirichlet = false) {
    if (!exclude_dirichlet) {
        if (g.vertices.empty()) return true;
        detail::Dsu dsu(g.vertices.size());
        for (const auto& e : g.edges) {
            auto t = g.vertex_index(e.tail);
            auto h = g.vertex_index(e.head);
            if (t && h) dsu.unite(*t, *h);
        }
        auto root = dsu.find(0);
        for (std::size_t i = 1; i < g.vertices.size(); ++i)
            if (dsu.find(i) != root) return false;
        return true;
    }
    // Punctured view: one node per surviving vertex, one node per edge.
    const std::size_t nv = g.vertices.size();
    detail::Dsu dsu(nv + g.edges.size());
    std::vector<bool> alive(nv + g.edges.size(), false);
    for (std::size_t i = 0; i < nv; ++i)
        alive[i] = !g.vertices[i].condition.is_dirichlet();
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        alive[nv + e] = true;
        for (const VertexId* end : {&g.edges[e].tail, &g.edges[e].head}) {
            auto vi = g.vertex_index(*end);
            if (vi && !g.vertices[*vi].condition.is_dirichlet()) dsu.unite(nv + e, *vi);
        }
    }
    // Dirichlet vertices with no incident edge vanish entirely; every other
    // live node must share one component.
    std::optional<std::size_t> root;
    for (std::size_t i = 0; i < alive.size(); ++i) {
        if (!alive[i]) continue;  // isolated free vertices still count as components
        auto r = dsu.find(i);
        if (!root) root = r;
        else if (*root != r) return false;
    }
    return true;
}

/// Connectivity in the sense the differential operators need: punctured as
/// soon as the graph carries any Dirichlet vertex, plain otherwise.
inline bool torsion_connected(const MetricGraph& g) {
    bool any_dirichlet = std::any_of(g.vertices.begin(), g.vertices.end(),
                                     [](const Vertex& v) { return v.condition.is_dirichlet(); });
    return is_connected(g, any_dirichlet);
}

namespace detail {

// Connectivity of the metric space after removing the open interior of one
// edge. Endpoints stay behind, so a stranded endpoint counts as a component.
inline bool connected_without_edge(const MetricGraph& g, std::size_t skip) {
    if (g.vertices.empty()) return true;
    Dsu dsu(g.vertices.size());
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (e == skip) continue;
        auto t = g.vertex_index(g.edges[e].tail);
        auto h = g.vertex_index(g.edges[e].head);
        if (t && h) dsu.unite(*t, *h);
    }
    auto root = dsu.find(0);
    for (std::size_t i = 1; i < g.vertices.size(); ++i)
        if (dsu.find(i) != root) return false;
    return true;
}

}  // namespace detail

/// True when every pair of points is joined by two paths with disjoint edge
/// interiors; equivalently the graph is connected and has no bridge. Loops
/// and parallel copies are never bridges.
inline bool is_doubly_connected(const MetricGraph& g) {
    if (g.edges.empty() || !is_connected(g)) return false;
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        if (g.edges[e].is_loop()) continue;
        if (!detail::connected_without_edge(g, e)) return false;
    }
    return true;
}

// ===== summary ==============================================================

struct GraphSummary {
    std::size_t vertex_count = 0;
    std::size_t edge_count = 0;
    std::size_t dirichlet_count = 0;
    std::size_t loop_count = 0;
    double total_length = 0.0;
    double total_strength = 0.0;                // sum over delta vertices
    std::map<VertexId, double> ell_degree;      // sum of incident lengths, loops twice
    std::map<VertexId, std::size_t> end_degree; // count of incident edge ends
};

inline GraphSummary summarize(const MetricGraph& g) {
    GraphSummary s;
    s.vertex_count = g.vertices.size();
    s.edge_count = g.edges.size();
    for (const auto& v : g.vertices) {
        if (v.condition.is_dirichlet()) ++s.dirichlet_count;
        else s.total_strength += v.condition.strength;
        s.ell_degree[v.id] = 0.0;
        s.end_degree[v.id] = 0;
    }
    for (const auto& e : g.edges) {
        s.total_length += e.length;
        if (e.is_loop()) ++s.loop_count;
        for (const VertexId* end : {&e.tail, &e.head}) {
            auto it = s.ell_degree.find(*end);
            if (it != s.ell_degree.end()) {
                it->second += e.length;
                ++s.end_degree[*end];
            }
        }
    }
    return s;
}

inline double total_length(const MetricGraph& g) {
    double t = 0.0;
    for (const auto& e : g.edges) t += e.length;
    return t;
}

}  // namespace qgt
