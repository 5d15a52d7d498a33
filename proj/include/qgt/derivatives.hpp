#pragma once
// Exact first derivatives of torsional rigidity with respect to edge lengths
// and vertex strengths, plus a central-difference cross check. The length
// derivative is a boundary expression of the torsion function that is
// constant along the edge; the strength derivative is minus the squared
// vertex value.

#include <cmath>
#include <cstddef>
#include <map>
#include <string>

#include "qgt/graph.hpp"
#include "qgt/torsion.hpp"

namespace qgt {

/// First derivatives of rigidity, keyed by id. Dirichlet vertices carry no
/// strength entry: their condition has no strength parameter to move.
struct Gradient {
    std::map<EdgeId, double> d_by_length;      // units length^2
    std::map<VertexId, double> d_by_strength;  // units length^3
};

namespace detail {

inline const EdgeParabola& parabola(const TorsionFunction& tf, const EdgeId& id) {
    for (const auto& p : tf.edges)
        if (p.id == id) return p;
    throw Error("no torsion data for edge '" + id + "'");
}

}  // namespace detail

/// d(rigidity)/d(length of `edge`) = 2 u(x0) + u'(x0)^2 at any point x0 of
/// the edge. Evaluations at both endpoints and the midpoint must agree; a
/// disagreement would mean the solve produced something other than a torsion
/// function.
inline double dT_dlength(const MetricGraph& g, const TorsionFunction& tf, const EdgeId& edge) {
    const auto& e = g.edge(edge);
    const auto& p = detail::parabola(tf, edge);
    auto shape = [&](double x) {
        const double du = p.derivative(x);
        return 2.0 * p.value(x) + du * du;
    };
    const double at_tail = shape(0.0);
    for (double x : {0.5 * e.length, e.length})
        if (std::abs(shape(x) - at_tail) > 1e-10 * (1.0 + std::abs(at_tail)))
            throw Error("length derivative is not point independent on edge '" + edge + "'");
    return at_tail;
}

/// d(rigidity)/d(strength of `v`) = -g(v)^2.
inline double dT_dstrength(const MetricGraph& g, const TorsionFunction& tf, const VertexId& v) {
    if (g.vertex(v).condition.is_dirichlet())
        throw DirichletUnsupported("no strength derivative at a Dirichlet vertex");
    const double gv = tf.vertex_values.at(v);
    return -gv * gv;
}

inline double dT_dlength(const MetricGraph& g, const EdgeId& edge) {
    return dT_dlength(g, solve_torsion(g), edge);
}

inline double dT_dstrength(const MetricGraph& g, const VertexId& v) {
    return dT_dstrength(g, solve_torsion(g), v);
}

/// Both derivative maps from a single torsion solve.
inline Gradient gradient(const MetricGraph& g) {
    const auto tf = solve_torsion(g);
    Gradient out;
    for (const auto& e : g.edges) out.d_by_length[e.id] = dT_dlength(g, tf, e.id);
    for (const auto& v : g.vertices)
        if (!v.condition.is_dirichlet()) out.d_by_strength[v.id] = dT_dstrength(g, tf, v.id);
    return out;
}

/// Central differences of rigidity, one parameter at a time. The step is
/// scaled per parameter to balance truncation against cancellation.
inline Gradient fd_gradient(const MetricGraph& g, double rel_step = 1e-5) {
    Gradient out;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        const double h = rel_step * (1.0 + std::abs(g.edges[i].length));
        MetricGraph up = g, down = g;
        up.edges[i].length += h;
        down.edges[i].length -= h;
        out.d_by_length[g.edges[i].id] = (rigidity(up) - rigidity(down)) / (2.0 * h);
    }
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        if (g.vertices[i].condition.is_dirichlet()) continue;
        const double a = g.vertices[i].condition.strength;
        const double h = rel_step * (1.0 + std::abs(a));
        MetricGraph up = g, down = g;
        up.vertices[i].condition = VertexCondition::delta(a + h);
        down.vertices[i].condition = VertexCondition::delta(a - h);
        out.d_by_strength[g.vertices[i].id] = (rigidity(up) - rigidity(down)) / (2.0 * h);
    }
    return out;
}

}  // namespace qgt
