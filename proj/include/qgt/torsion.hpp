#pragma once
// Torsion functions on metric graphs. The solution of -u'' = 1 with delta
// couplings (derivatives into the edges summing to strength * value) and
// Dirichlet pins is edgewise -x^2/2 + b x + a, so it is determined by its
// vertex values g, which solve the symmetric system
//
//   A g = d,   A[v][v] = sum_{non-loop ends at v} 1/l_e + alpha_v,
//              A[v][w] = -sum_{edges joining v,w} 1/l_e,
//   d[v]     = (ell-degree of v, loops twice) / 2.
//
// Loops drop out of A entirely and only feed the right hand side. Dirichlet
// vertices are eliminated: their value is 0 and their rows disappear while
// 1/l_e stays on the free neighbour's diagonal.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qgt/graph.hpp"
#include "qgt/linalg.hpp"

namespace qgt {

// ===== discrete vertex system ===============================================

struct DiscreteLaplacian {
    std::vector<VertexId> vertex_order;  // free (delta) vertices, graph order
    SymMatrix a;                         // symmetric factored form
    std::vector<double> d;               // half ell-degrees, also the rhs
};

/// Build the vertex system. Requires a valid graph, connected after
/// puncturing the Dirichlet vertices.
inline DiscreteLaplacian assemble_system(const MetricGraph& g) {
    require_valid(g);
    if (!torsion_connected(g)) throw NotConnected("graph is not connected");

    DiscreteLaplacian sys;
    constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::vector<std::size_t> free_index(g.vertices.size(), npos);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        if (g.vertices[i].condition.is_dirichlet()) continue;
        free_index[i] = sys.vertex_order.size();
        sys.vertex_order.push_back(g.vertices[i].id);
    }
    const std::size_t n = sys.vertex_order.size();
    sys.a = SymMatrix(n);
    sys.d.assign(n, 0.0);

    for (const auto& e : g.edges) {
        const std::size_t t = free_index[*g.vertex_index(e.tail)];
        const std::size_t h = free_index[*g.vertex_index(e.head)];
        if (e.is_loop()) {
            if (t != npos) sys.d[t] += e.length;  // both ends, each length/2
            continue;
        }
        const double invl = 1.0 / e.length;
        if (t != npos) {
            sys.d[t] += e.length / 2.0;
            sys.a.add(t, t, invl);
        }
        if (h != npos) {
            sys.d[h] += e.length / 2.0;
            sys.a.add(h, h, invl);
        }
        if (t != npos && h != npos) sys.a.add(t, h, -invl);
    }
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        if (free_index[i] != npos)
            sys.a.add(free_index[i], free_index[i], g.vertices[i].condition.strength);
    return sys;
}

// ===== torsion function =====================================================

/// Edgewise parabola -x^2/2 + b x + a with x measured from the tail.
struct EdgeParabola {
    EdgeId id;
    double a = 0.0;
    double b = 0.0;

    double value(double x) const { return -0.5 * x * x + b * x + a; }
    double derivative(double x) const { return -x + b; }
};

struct TorsionFunction {
    std::map<VertexId, double> vertex_values;  // every vertex; Dirichlet pinned to 0
    std::vector<EdgeParabola> edges;           // graph edge order
};

/// Solve the vertex system and reconstruct the edge parabolas. Throws
/// NoTorsion when the system is singular at the zero tolerance.
inline TorsionFunction solve_torsion(const MetricGraph& g) {
    auto sys = assemble_system(g);
    if (inertia(sys.a).n_zero > 0)
        throw NoTorsion("vertex system is singular: no torsion function");
    auto values = solve_sym(sys.a, sys.d);

    TorsionFunction tf;
    for (const auto& v : g.vertices) tf.vertex_values[v.id] = 0.0;
    for (std::size_t i = 0; i < sys.vertex_order.size(); ++i)
        tf.vertex_values[sys.vertex_order[i]] = values[i];
    for (const auto& e : g.edges) {
        EdgeParabola p;
        p.id = e.id;
        p.a = tf.vertex_values.at(e.tail);
        p.b = (tf.vertex_values.at(e.head) - p.a) / e.length + e.length / 2.0;
        tf.edges.push_back(p);
    }
    return tf;
}

/// Torsional rigidity (the integral of the torsion function), edgewise
/// l^3/12 + l (g_tail + g_head)/2.
inline double rigidity(const MetricGraph& g, const TorsionFunction& tf) {
    double total = 0.0;
    for (const auto& e : g.edges) {
        const double gt = tf.vertex_values.at(e.tail);
        const double gh = tf.vertex_values.at(e.head);
        total += e.length * e.length * e.length / 12.0 + e.length * (gt + gh) / 2.0;
    }
    return total;
}

inline double rigidity(const MetricGraph& g) { return rigidity(g, solve_torsion(g)); }

/// Defect of the coupling condition at each free vertex: derivatives into
/// the edges minus strength times value. Zero (to solver accuracy) on
/// genuine torsion functions.
inline std::map<VertexId, double> check_vertex_residuals(const MetricGraph& g,
                                                         const TorsionFunction& tf) {
    std::map<VertexId, double> res;
    for (const auto& v : g.vertices)
        if (!v.condition.is_dirichlet()) res[v.id] = 0.0;
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
        const auto& e = g.edges[ei];
        const auto& p = tf.edges[ei];
        auto it = res.find(e.tail);
        if (it != res.end()) it->second += p.derivative(0.0);       // into the edge
        it = res.find(e.head);
        if (it != res.end()) it->second += -p.derivative(e.length); // into the edge
    }
    for (const auto& v : g.vertices)
        if (!v.condition.is_dirichlet())
            res[v.id] -= v.condition.strength * tf.vertex_values.at(v.id);
    return res;
}

// ===== test functions and the shape quotient ================================

/// Piecewise quadratic c2 x^2 + c1 x + c0 per edge, x measured from the tail.
struct TestFunction {
    std::map<EdgeId, std::array<double, 3>> coeffs;  // {c0, c1, c2}

    static double value(const std::array<double, 3>& c, double x) {
        return (c[2] * x + c[1]) * x + c[0];
    }
};

inline TestFunction to_test_function(const TorsionFunction& tf) {
    TestFunction u;
    for (const auto& p : tf.edges) u.coeffs[p.id] = {p.a, p.b, -0.5};
    return u;
}

namespace detail {

/// Vertex traces of a piecewise quadratic; throws unless the function is
/// continuous at every vertex and vanishes at Dirichlet ones.
inline std::map<VertexId, double> vertex_traces(const MetricGraph& g, const TestFunction& u) {
    double scale = 0.0;
    for (const auto& [id, c] : u.coeffs)
        scale = std::max({scale, std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
    const double tol = 1e-8 * (1.0 + scale);

    std::map<VertexId, double> trace;
    for (const auto& e : g.edges) {
        auto it = u.coeffs.find(e.id);
        if (it == u.coeffs.end()) throw Error("test function misses edge '" + e.id + "'");
        const auto& c = it->second;
        const double at_tail = TestFunction::value(c, 0.0);
        const double at_head = TestFunction::value(c, e.length);
        for (const auto& [vid, val] : {std::pair{e.tail, at_tail}, std::pair{e.head, at_head}}) {
            auto [pos, fresh] = trace.try_emplace(vid, val);
            if (!fresh && std::abs(pos->second - val) > tol)
                throw Error("test function is discontinuous at vertex '" + vid + "'");
        }
    }
    for (const auto& v : g.vertices)
        if (v.condition.is_dirichlet()) {
            auto it = trace.find(v.id);
            if (it != trace.end() && std::abs(it->second) > tol)
                throw Error("test function does not vanish at Dirichlet vertex '" + v.id + "'");
        }
    return trace;
}

/// Integral of |c2 x^2 + c1 x + c0| over [0, l], splitting at interior roots.
/// Discriminants within 1e-14 of zero (relatively) count as tangencies.
inline double abs_quadratic_integral(const std::array<double, 3>& c, double l) {
    const double c0 = c[0], c1 = c[1], c2 = c[2];
    auto anti = [&](double x) { return ((c2 / 3.0 * x + c1 / 2.0) * x + c0) * x; };
    std::vector<double> cuts{0.0};
    const double mag = std::max({std::abs(c0), std::abs(c1) * l, std::abs(c2) * l * l});
    if (std::abs(c2) * l * l > 1e-14 * (1.0 + mag)) {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        const double disc_floor = 1e-14 * std::max({c1 * c1, std::abs(4.0 * c2 * c0), 1e-300});
        if (disc > disc_floor) {
            const double sq = std::sqrt(disc);
            // stable pairing: the larger-magnitude root first
            const double q = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
            double r1 = q / c2;
            double r2 = (q != 0.0) ? c0 / q : -c1 / c2 - r1;
            if (r1 > r2) std::swap(r1, r2);
            for (double r : {r1, r2})
                if (r > 0.0 && r < l) cuts.push_back(r);
        }
    } else if (std::abs(c1) * l > 1e-14 * (1.0 + mag)) {
        const double r = -c0 / c1;
        if (r > 0.0 && r < l) cuts.push_back(r);
    }
    cuts.push_back(l);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        total += std::abs(anti(cuts[i + 1]) - anti(cuts[i]));
    return total;
}

}  // namespace detail

/// Quadratic form sum_e int (u')^2 + sum_v alpha_v u(v)^2 of a continuous
/// piecewise quadratic vanishing at Dirichlet vertices.
inline double form_energy(const MetricGraph& g, const TestFunction& u) {
    require_valid(g);
    auto trace = detail::vertex_traces(g, u);
    double total = 0.0;
    for (const auto& e : g.edges) {
        const auto& c = u.coeffs.at(e.id);
        const double l = e.length;
        total += (4.0 * c[2] * c[2] * l * l / 3.0 + 2.0 * c[2] * c[1] * l + c[1] * c[1]) * l;
    }
    for (const auto& v : g.vertices) {
        if (v.condition.is_dirichlet()) continue;
        auto it = trace.find(v.id);
        const double val = (it == trace.end()) ? 0.0 : it->second;
        total += v.condition.strength * val * val;
    }
    return total;
}

/// Shape quotient (int |u|)^2 / form_energy(u). The torsion function
/// maximizes it among admissible test functions, with value equal to the
/// torsional rigidity. Throws DegenerateForm unless the form is positive.
inline double polya_quotient(const MetricGraph& g, const TestFunction& u) {
    const double h = form_energy(g, u);
    double mass = 0.0;
    for (const auto& e : g.edges)
        mass += detail::abs_quadratic_integral(u.coeffs.at(e.id), e.length);
    if (!(h > 1e-300)) throw DegenerateForm("quadratic form is not positive on the test function");
    return mass * mass / h;
}

// ===== positivity classification ============================================

enum class TorsionClass { Positive, ExistsNotPositive, NoTorsion };

inline const char* to_string(TorsionClass c) {
    switch (c) {
        case TorsionClass::Positive: return "positive";
        case TorsionClass::ExistsNotPositive: return "exists-not-positive";
        case TorsionClass::NoTorsion: return "no-torsion";
    }
    return "?";
}

/// Auditable positivity verdict. Two independent routes feed it: the sign
/// counts of the vertex form (definiteness of A) and the signs of the solved
/// vertex values, which agree away from the borderline band.
struct PositivityVerdict {
    TorsionClass classification = TorsionClass::NoTorsion;
    double spectrum_min = std::numeric_limits<double>::quiet_NaN();  // of (A, diag(d))
    double zero_tolerance = 0.0;
    Inertia form_inertia;
    double vertex_min = std::numeric_limits<double>::quiet_NaN();
    bool borderline = false;
    bool routes_agree = true;
};

inline PositivityVerdict classify_positivity(const MetricGraph& g) {
    auto sys = assemble_system(g);
    PositivityVerdict v;
    const std::size_t n = sys.vertex_order.size();
    if (n == 0) {
        // fully pinned graph: every edge carries the positive bubble
        v.classification = TorsionClass::Positive;
        return v;
    }
    v.zero_tolerance = 1e-10 * sys.a.inf_norm();
    v.form_inertia = inertia(sys.a, v.zero_tolerance);
    v.spectrum_min = eig_gen_sym(sys.a, diagonal_matrix(sys.d), 1).values.front();
    v.borderline = std::abs(v.spectrum_min) <= 10.0 * v.zero_tolerance;

    if (v.form_inertia.n_zero > 0) {
        v.classification = TorsionClass::NoTorsion;
        return v;
    }
    auto values = solve_sym(sys.a, sys.d);
    v.vertex_min = *std::min_element(values.begin(), values.end());
    const bool definite_route = v.form_inertia.n_negative == 0;
    const bool sign_route = v.vertex_min > 0.0;
    v.routes_agree = definite_route == sign_route;
    v.classification = definite_route ? TorsionClass::Positive : TorsionClass::ExistsNotPositive;
    return v;
}

}  // namespace qgt
