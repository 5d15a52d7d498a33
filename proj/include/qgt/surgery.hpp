#pragma once
// Graph surgeries: length changes, simultaneous scaling, gluing and cutting
// of vertices, inserting a graph at a vertex, unfolding pendant edges, and
// strength replacement. Every operation validates its input, leaves the
// argument untouched, and returns a fresh graph, so before/after pairs
// coexist for monotonicity checks.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qgt/graph.hpp"

namespace qgt {

// ===== operation payloads ===================================================

struct Lengthen {
    EdgeId edge;
    double new_length = 0.0;
};

/// Lengths scale by t, delta strengths by 1/t.
struct Scale {
    double t = 1.0;
};

/// Merge v2 into v1 (or into new_id when given); strengths add.
struct Glue {
    VertexId v1;
    VertexId v2;
    VertexId new_id;  // empty keeps v1's id
};

/// An edge end named by edge id, the serializable cousin of IncidentEnd.
struct EdgeEnd {
    EdgeId edge;
    bool at_head = false;

    friend bool operator==(const EdgeEnd&, const EdgeEnd&) = default;
};

/// One side of a vertex cut: the replacement vertex, its strength share, and
/// the incident edge ends it receives.
struct CutPart {
    VertexId id;
    double strength = 0.0;
    std::vector<EdgeEnd> ends;
};

/// Split a vertex in two. The parts must partition its incident ends and
/// their strengths must sum to the original one.
struct Cut {
    VertexId at;
    CutPart first;
    CutPart second;
};

/// Replace a vertex by a whole graph: every incident edge is re-attached to
/// the inserted vertex named by the attachment map (loops keep both ends on
/// the mapped vertex). The inserted graph may be a single edgeless vertex.
struct Insert {
    VertexId at;
    MetricGraph graph;
    std::map<EdgeId, VertexId> attachment;
};

enum class TipRule { Zero, Sum };

/// Replace pendant edges at a common base by one pendant of the summed
/// length. The new tip's strength is 0 (Zero) or the old tips' sum (Sum).
struct Unfold {
    VertexId at;
    std::vector<EdgeId> pendants;
    TipRule rule = TipRule::Zero;
};

struct SetStrength {
    VertexId vertex;
    double strength = 0.0;
};

using Surgery = std::variant<Lengthen, Scale, Glue, Cut, Insert, Unfold, SetStrength>;

// ===== helpers ==============================================================

namespace detail {

inline std::string fresh_id(const std::string& base, const std::set<std::string>& used) {
    if (!used.count(base)) return base;
    for (int k = 2;; ++k) {
        std::string candidate = base + "-" + std::to_string(k);
        if (!used.count(candidate)) return candidate;
    }
}

inline void require_result_valid(const MetricGraph& g, const char* op) {
    auto violations = validate(g);
    if (!violations.empty())
        throw Error(std::string(op) + " produced an invalid graph: " + violations.front().detail);
}

}  // namespace detail

// ===== operations ===========================================================

inline MetricGraph apply(const MetricGraph& g, const Lengthen& s) {
    require_valid(g);
    const auto& e = g.edge(s.edge);
    if (!(s.new_length > e.length))
        throw NotLonger("new length " + std::to_string(s.new_length) +
                        " does not exceed the current length of edge '" + s.edge + "'");
    MetricGraph out = g;
    out.edges[*out.edge_index(s.edge)].length = s.new_length;
    return out;
}

inline MetricGraph apply(const MetricGraph& g, const Scale& s) {
    require_valid(g);
    if (!(s.t > 0.0) || !std::isfinite(s.t))
        throw NonPositiveScale("scale factor must be positive and finite");
    MetricGraph out = g;
    for (auto& e : out.edges) e.length *= s.t;
    for (auto& v : out.vertices)
        if (!v.condition.is_dirichlet()) v.condition.strength /= s.t;
    return out;
}

inline MetricGraph apply(const MetricGraph& g, const Glue& s) {
    require_valid(g);
    if (s.v1 == s.v2) throw SameVertex("cannot glue a vertex to itself");
    const auto& a = g.vertex(s.v1);
    const auto& b = g.vertex(s.v2);
    if (a.condition.is_dirichlet() || b.condition.is_dirichlet())
        throw DirichletUnsupported("gluing Dirichlet vertices is not supported");
    const VertexId merged = s.new_id.empty() ? s.v1 : s.new_id;

    MetricGraph out;
    for (const auto& v : g.vertices) {
        if (v.id == s.v2) continue;
        if (v.id == s.v1)
            out.vertices.push_back(
                {merged, VertexCondition::delta(a.condition.strength + b.condition.strength)});
        else
            out.vertices.push_back(v);
    }
    for (auto e : g.edges) {
        if (e.tail == s.v1 || e.tail == s.v2) e.tail = merged;
        if (e.head == s.v1 || e.head == s.v2) e.head = merged;
        out.edges.push_back(e);
    }
    detail::require_result_valid(out, "glue");
    return out;
}

inline MetricGraph apply(const MetricGraph& g, const Cut& s) {
    require_valid(g);
    const auto& v0 = g.vertex(s.at);
    if (v0.condition.is_dirichlet())
        throw DirichletUnsupported("cutting a Dirichlet vertex is not supported");
    if (s.first.ends.empty() || s.second.ends.empty())
        throw Error("cut must place at least one edge end on each side");
    if (s.first.id == s.second.id) throw Error("cut parts need distinct identifiers");

    const double total = s.first.strength + s.second.strength;
    const double scale =
        1.0 + std::abs(v0.condition.strength) + std::abs(s.first.strength) +
        std::abs(s.second.strength);
    if (std::abs(total - v0.condition.strength) > 1e-12 * scale)
        throw StrengthMismatch("part strengths sum to " + std::to_string(total) +
                               ", the vertex carries " +
                               std::to_string(v0.condition.strength));

    // every incident end of the vertex must be claimed exactly once
    std::map<std::pair<EdgeId, bool>, VertexId> claim;
    for (const auto* part : {&s.first, &s.second})
        for (const auto& end : part->ends) {
            const auto& e = g.edge(end.edge);
            if ((end.at_head ? e.head : e.tail) != s.at)
                throw Error("edge end '" + end.edge + "' is not incident to '" + s.at + "'");
            if (!claim.emplace(std::make_pair(end.edge, end.at_head), part->id).second)
                throw Error("edge end '" + end.edge + "' is claimed twice");
        }
    const auto ends = incidence(g);
    for (const auto& end : ends[*g.vertex_index(s.at)])
        if (!claim.count({g.edges[end.edge].id, end.at_head}))
            throw Error("edge end '" + g.edges[end.edge].id + "' at '" + s.at +
                        "' is not assigned");

    MetricGraph out;
    for (const auto& v : g.vertices)
        if (v.id != s.at) out.vertices.push_back(v);
    out.vertices.push_back({s.first.id, VertexCondition::delta(s.first.strength)});
    out.vertices.push_back({s.second.id, VertexCondition::delta(s.second.strength)});
    for (auto e : g.edges) {
        if (e.tail == s.at) e.tail = claim.at({e.id, false});
        if (e.head == s.at) e.head = claim.at({e.id, true});
        out.edges.push_back(e);
    }
    detail::require_result_valid(out, "cut");
    if (!torsion_connected(out)) throw Disconnects("cut disconnects the graph");
    return out;
}

inline MetricGraph apply(const MetricGraph& g, const Insert& s) {
    require_valid(g);
    const auto& v0 = g.vertex(s.at);
    if (v0.condition.is_dirichlet())
        throw DirichletUnsupported("inserting at a Dirichlet vertex is not supported");
    auto violations = validate(s.graph);
    violations.erase(std::remove_if(violations.begin(), violations.end(),
                                    [](const Violation& v) { return v.code == "empty-edge-set"; }),
                     violations.end());
    if (!violations.empty())
        throw BadAttachment("inserted graph is invalid: " + violations.front().detail);

    // identifier disjointness; the replaced vertex id may be reused
    std::set<std::string> host_vertices, host_edges;
    for (const auto& v : g.vertices)
        if (v.id != s.at) host_vertices.insert(v.id);
    for (const auto& e : g.edges) host_edges.insert(e.id);
    for (const auto& v : s.graph.vertices)
        if (host_vertices.count(v.id))
            throw BadAttachment("inserted vertex id '" + v.id + "' collides with the host");
    for (const auto& e : s.graph.edges)
        if (host_edges.count(e.id))
            throw BadAttachment("inserted edge id '" + e.id + "' collides with the host");

    // the attachment must cover exactly the incident edges of the vertex
    std::set<EdgeId> incident;
    for (const auto& e : g.edges)
        if (e.tail == s.at || e.head == s.at) incident.insert(e.id);
    for (const auto& [eid, target] : s.attachment) {
        if (!incident.count(eid))
            throw BadAttachment("edge '" + eid + "' is not incident to '" + s.at + "'");
        if (!s.graph.vertex_index(target))
            throw BadAttachment("attachment target '" + target + "' is not an inserted vertex");
    }
    for (const auto& eid : incident)
        if (!s.attachment.count(eid))
            throw BadAttachment("edge '" + eid + "' at '" + s.at + "' has no attachment");

    MetricGraph out;
    for (const auto& v : g.vertices)
        if (v.id != s.at) out.vertices.push_back(v);
    for (const auto& v : s.graph.vertices) out.vertices.push_back(v);
    for (auto e : g.edges) {
        if (e.tail == s.at) e.tail = s.attachment.at(e.id);
        if (e.head == s.at) e.head = s.attachment.at(e.id);
        out.edges.push_back(e);
    }
    for (const auto& e : s.graph.edges) out.edges.push_back(e);
    detail::require_result_valid(out, "insert");
    if (!torsion_connected(out))
        throw BadAttachment("insertion leaves the graph disconnected");
    return out;
}

/// Whether the insertion satisfies the monotonicity hypothesis: only delta
/// vertices inside, nonnegative strengths, total at most the replaced
/// vertex's strength.
inline bool insert_hypothesis(const MetricGraph& g, const Insert& s) {
    const auto& v0 = g.vertex(s.at);
    if (v0.condition.is_dirichlet()) return false;
    double total = 0.0;
    for (const auto& v : s.graph.vertices) {
        if (v.condition.is_dirichlet()) return false;
        if (v.condition.strength < 0.0) return false;
        total += v.condition.strength;
    }
    return total <= v0.condition.strength;
}

inline MetricGraph apply(const MetricGraph& g, const Unfold& s) {
    require_valid(g);
    g.vertex(s.at);
    if (s.pendants.empty()) throw Error("unfold needs at least one pendant edge");
    std::set<EdgeId> listed(s.pendants.begin(), s.pendants.end());
    if (listed.size() != s.pendants.size()) throw Error("pendant edge listed twice");

    auto ends = incidence(g);
    std::set<VertexId> tips;
    double total_length = 0.0, tip_strength_sum = 0.0;
    for (const auto& eid : s.pendants) {
        const auto& e = g.edge(eid);
        if (e.is_loop()) throw NotPendant("edge '" + eid + "' is a loop, not a pendant");
        VertexId tip;
        if (e.tail == s.at) tip = e.head;
        else if (e.head == s.at) tip = e.tail;
        else throw NotPendant("edge '" + eid + "' is not incident to '" + s.at + "'");
        if (ends[*g.vertex_index(tip)].size() != 1)
            throw NotPendant("vertex '" + tip + "' of edge '" + eid + "' is not degree one");
        const auto& tv = g.vertex(tip);
        if (tv.condition.is_dirichlet())
            throw DirichletUnsupported("unfolding a Dirichlet tip is not supported");
        tips.insert(tip);
        total_length += e.length;
        tip_strength_sum += tv.condition.strength;
    }

    std::set<std::string> used_vertices, used_edges;
    for (const auto& v : g.vertices)
        if (!tips.count(v.id)) used_vertices.insert(v.id);
    for (const auto& e : g.edges)
        if (!listed.count(e.id)) used_edges.insert(e.id);
    const VertexId tip_id = detail::fresh_id("tip", used_vertices);
    const EdgeId edge_id = detail::fresh_id("pendant", used_edges);

    MetricGraph out;
    for (const auto& v : g.vertices)
        if (!tips.count(v.id)) out.vertices.push_back(v);
    out.vertices.push_back(
        {tip_id, VertexCondition::delta(s.rule == TipRule::Sum ? tip_strength_sum : 0.0)});
    for (const auto& e : g.edges)
        if (!listed.count(e.id)) out.edges.push_back(e);
    out.edges.push_back({edge_id, s.at, tip_id, total_length});
    detail::require_result_valid(out, "unfold");
    return out;
}

inline MetricGraph apply(const MetricGraph& g, const SetStrength& s) {
    require_valid(g);
    const auto& v = g.vertex(s.vertex);
    if (v.condition.is_dirichlet())
        throw DirichletUnsupported("cannot set a strength on a Dirichlet vertex");
    if (!std::isfinite(s.strength)) throw Error("strength must be finite");
    MetricGraph out = g;
    out.vertices[*out.vertex_index(s.vertex)].condition = VertexCondition::delta(s.strength);
    return out;
}

inline MetricGraph apply(const MetricGraph& g, const Surgery& s) {
    return std::visit([&](const auto& op) { return apply(g, op); }, s);
}

}  // namespace qgt
