#pragma once
// Independent reference computations the test suites check the library
// against. Everything here is deliberately written from first principles
// (hand-solved 2x2 systems, closed antiderivatives, plain bisection) and
// shares no code with the library kernels it cross-checks.

#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "qgt/graph.hpp"

namespace oracle {

// ===== closed forms =========================================================

/// Torsional rigidity of a single edge with delta strengths (a0, a1),
/// via the hand-solved 2x2 vertex system rather than any library kernel.
inline double interval_rigidity(double L, double a0, double a1) {
    const double c = 1.0 / L;
    const double d00 = c + a0, d11 = c + a1;
    const double det = d00 * d11 - c * c;
    const double r = L / 2.0;
    const double g0 = (r * d11 + r * c) / det;
    const double g1 = (r * c + r * d00) / det;
    return L * L * L / 12.0 + L * (g0 + g1) / 2.0;
}

/// Rigidity of an edge with strength a0 at one end and 0 at the other.
inline double interval_rigidity_one_end(double L, double a0) {
    return L * L * L / 3.0 + L * L / a0;
}

/// Rigidity of a flower: loops of the given lengths at one vertex of
/// strength alpha.
inline double flower_rigidity(const std::vector<double>& lengths, double alpha) {
    double sum3 = 0.0, sum1 = 0.0;
    for (double l : lengths) {
        sum3 += l * l * l;
        sum1 += l;
    }
    return sum3 / 12.0 + sum1 * sum1 / alpha;
}

/// Vertex value of the torsion function on a flower.
inline double flower_vertex_value(const std::vector<double>& lengths, double alpha) {
    double sum1 = 0.0;
    for (double l : lengths) sum1 += l;
    return sum1 / alpha;
}

/// Exact integral of a parabola -x^2/2 + b x + a over [0, L]; used to
/// cross-check the edgewise rigidity formula by direct quadrature.
inline double parabola_integral(double L, double a, double b) {
    return -L * L * L / 6.0 + b * L * L / 2.0 + a * L;
}

/// Root of k tan(k) = 1 on (0, pi/2), by plain bisection. Determines the
/// smallest eigenvalue k^2 of the unit interval with strengths (1, 0).
inline double k_tan_k_root() {
    double lo = 1e-9, hi = 1.5707963267948966 - 1e-12;
    auto f = [](double k) { return k * std::tan(k) - 1.0; };
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// ===== random graphs ========================================================

struct RandomGraphConfig {
    int min_vertices = 1;
    int max_vertices = 8;
    int max_edges = 12;
    double length_lo = 0.5;
    double length_hi = 2.0;
    double strength_lo = 0.1;
    double strength_hi = 5.0;
    bool signed_strengths = false;   // draw strengths from [-3, 5] instead
    bool bridgeless = false;         // start from a cycle, add only chords/loops
};

/// Connected random multigraph: random spanning tree plus extra edges, loops
/// and parallel edges included. With bridgeless set, a cycle backbone plus
/// arbitrary extra edges (adding edges never creates a bridge).
inline qgt::MetricGraph random_graph(std::mt19937_64& rng, const RandomGraphConfig& cfg = {}) {
    using qgt::MetricGraph;
    using qgt::VertexCondition;
    std::uniform_int_distribution<int> nv_dist(cfg.min_vertices, cfg.max_vertices);
    int nv = nv_dist(rng);
    if (cfg.bridgeless && nv < 1) nv = 1;
    std::uniform_real_distribution<double> len(cfg.length_lo, cfg.length_hi);
    std::uniform_real_distribution<double> alpha(
        cfg.signed_strengths ? -3.0 : cfg.strength_lo,
        cfg.signed_strengths ? 5.0 : cfg.strength_hi);

    MetricGraph g;
    for (int i = 0; i < nv; ++i)
        g.vertices.push_back({"v" + std::to_string(i), VertexCondition::delta(alpha(rng))});

    int ne = 0;
    auto add_edge = [&](int a, int b) {
        g.edges.push_back({"e" + std::to_string(ne), "v" + std::to_string(a),
                           "v" + std::to_string(b), len(rng)});
        ++ne;
    };
    if (cfg.bridgeless) {
        // cycle backbone through all vertices (a loop when nv == 1,
        // a pair of parallel edges when nv == 2)
        for (int i = 0; i < nv; ++i) add_edge(i, (i + 1) % nv);
    } else {
        for (int i = 1; i < nv; ++i) {
            std::uniform_int_distribution<int> anchor(0, i - 1);
            add_edge(anchor(rng), i);
        }
        if (nv == 1) add_edge(0, 0);  // lone vertex needs at least a loop
    }
    int max_extra = cfg.max_edges - ne;
    if (max_extra > 0) {
        std::uniform_int_distribution<int> extra_dist(0, max_extra);
        int extra = extra_dist(rng);
        std::uniform_int_distribution<int> pick(0, nv - 1);
        for (int k = 0; k < extra; ++k) add_edge(pick(rng), pick(rng));
    }
    return g;
}

/// Force a usable strength profile: clamp strengths to [0, inf) and make
/// sure at least one vertex keeps a strictly positive one.
inline void make_nonnegative_strengths(qgt::MetricGraph& g, std::mt19937_64& rng) {
    bool any_positive = false;
    for (auto& v : g.vertices) {
        if (v.condition.is_dirichlet()) continue;
        if (v.condition.strength < 0.0) v.condition.strength = 0.0;
        if (v.condition.strength > 0.0) any_positive = true;
    }
    if (!any_positive && !g.vertices.empty()) {
        std::uniform_real_distribution<double> s(0.5, 3.0);
        g.vertices.front().condition = qgt::VertexCondition::delta(s(rng));
    }
}

// ===== finite differences ===================================================

/// Central difference of a scalar functional of one graph parameter.
template <class Eval, class Set>
double central_difference(const qgt::MetricGraph& g, double base, double step,
                          Set&& set_param, Eval&& eval) {
    qgt::MetricGraph plus = g, minus = g;
    set_param(plus, base + step);
    set_param(minus, base - step);
    return (eval(plus) - eval(minus)) / (2.0 * step);
}

}  // namespace oracle
