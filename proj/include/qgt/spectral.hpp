#pragma once
// First eigenvalue of the Laplacian on a metric graph with delta couplings
// and Dirichlet pins. Piecewise-linear finite elements on an equispaced
// per-edge mesh give a matrix pencil (K, M); the smallest eigenvalue is
// located by spectral counting (signs of the LDL^T pivots of K - lambda M,
// with the interior chain of every edge eliminated in O(1) memory before a
// dense factorization of the small vertex block) plus bisection, and then
// sharpened by Richardson extrapolation over nested mesh levels. An
// independent one-dimensional secular equation covers the single interval.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "qgt/graph.hpp"
#include "qgt/linalg.hpp"

namespace qgt {

// ===== meshes ===============================================================

/// Equispaced subdivision counts, aligned with the edge list of the graph.
struct Mesh {
    std::vector<std::size_t> cells;
};

/// Mesh with cell width at most h0 and at least four cells per edge.
inline Mesh build_mesh(const MetricGraph& g, double h0) {
    require_valid(g);
    if (!(h0 > 0.0)) throw Error("mesh width must be positive");
    Mesh mesh;
    for (const auto& e : g.edges) {
        const auto wanted = static_cast<std::size_t>(std::ceil(e.length / h0));
        mesh.cells.push_back(std::max<std::size_t>(4, wanted));
    }
    return mesh;
}

inline Mesh refine(const Mesh& mesh) {
    Mesh fine;
    for (auto m : mesh.cells) fine.cells.push_back(2 * m);
    return fine;
}

/// Unknowns of the pencil: free vertices plus interior nodes.
inline std::size_t dof_count(const MetricGraph& g, const Mesh& mesh) {
    if (mesh.cells.size() != g.edges.size()) throw Error("mesh does not match the edge list");
    std::size_t n = 0;
    for (const auto& v : g.vertices)
        if (!v.condition.is_dirichlet()) ++n;
    for (auto m : mesh.cells) n += m - 1;
    return n;
}

// ===== dense assembly =======================================================

/// Dense stiffness/mass pair. Unknowns are ordered free vertices first (graph
/// order), then the interior nodes of each edge from tail to head.
struct FemPair {
    std::vector<VertexId> vertex_order;
    SymMatrix stiffness;
    SymMatrix mass;
};

inline FemPair assemble_fem(const MetricGraph& g, const Mesh& mesh) {
    require_valid(g);
    if (mesh.cells.size() != g.edges.size()) throw Error("mesh does not match the edge list");
    constexpr std::size_t npos = static_cast<std::size_t>(-1);

    FemPair fem;
    std::vector<std::size_t> free_index(g.vertices.size(), npos);
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
        if (g.vertices[i].condition.is_dirichlet()) continue;
        free_index[i] = fem.vertex_order.size();
        fem.vertex_order.push_back(g.vertices[i].id);
    }
    const std::size_t n = dof_count(g, mesh);
    fem.stiffness = SymMatrix(n);
    fem.mass = SymMatrix(n);

    std::size_t interior_base = fem.vertex_order.size();
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
        const auto& e = g.edges[ei];
        const std::size_t m = mesh.cells[ei];
        if (m == 0) throw Error("mesh cell count must be positive");
        const double h = e.length / static_cast<double>(m);
        const std::size_t t = free_index[*g.vertex_index(e.tail)];
        const std::size_t hd = free_index[*g.vertex_index(e.head)];
        auto node_dof = [&](std::size_t j) {
            if (j == 0) return t;
            if (j == m) return hd;
            return interior_base + j - 1;
        };
        for (std::size_t j = 0; j < m; ++j) {
            const std::size_t p = node_dof(j), q = node_dof(j + 1);
            if (p != npos) {
                fem.stiffness.add(p, p, 1.0 / h);
                fem.mass.add(p, p, h / 3.0);
            }
            if (q != npos) {
                fem.stiffness.add(q, q, 1.0 / h);
                fem.mass.add(q, q, h / 3.0);
            }
            if (p != npos && q != npos) {
                if (p == q) {  // one-cell loop folds onto a single unknown
                    fem.stiffness.add(p, p, -2.0 / h);
                    fem.mass.add(p, p, 2.0 * h / 6.0);
                } else {
                    fem.stiffness.add(p, q, -1.0 / h);
                    fem.mass.add(p, q, h / 6.0);
                }
            }
        }
        interior_base += m - 1;
    }
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        if (free_index[i] != npos)
            fem.stiffness.add(free_index[i], free_index[i], g.vertices[i].condition.strength);
    return fem;
}

// ===== spectral counting ====================================================

/// Number of pencil eigenvalues below lambda on the given mesh, without ever
/// forming the full matrices: each edge's interior chain is eliminated with a
/// running pivot and its two boundary couplings, leaving a Schur complement
/// on the free-vertex block whose sign counts a dense factorization supplies.
inline std::size_t count_below(const MetricGraph& g, const Mesh& mesh, double lambda) {
    if (mesh.cells.size() != g.edges.size()) throw Error("mesh does not match the edge list");
    constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::vector<std::size_t> free_index(g.vertices.size(), npos);
    std::size_t nfree = 0;
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        if (!g.vertices[i].condition.is_dirichlet()) free_index[i] = nfree++;

    SymMatrix s(nfree);
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        if (free_index[i] != npos)
            s.add(free_index[i], free_index[i], g.vertices[i].condition.strength);

    std::size_t negatives = 0;
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
        const auto& e = g.edges[ei];
        const std::size_t m = mesh.cells[ei];
        if (m == 0) throw Error("mesh cell count must be positive");
        const double h = e.length / static_cast<double>(m);
        const double diag = 2.0 / h - lambda * 2.0 * h / 3.0;       // interior node
        const double off = -1.0 / h - lambda * h / 6.0;             // chain coupling
        const double end = 1.0 / h - lambda * h / 3.0;              // per incident end
        const std::size_t t = free_index[*g.vertex_index(e.tail)];
        const std::size_t hd = free_index[*g.vertex_index(e.head)];
        if (t != npos) s.add(t, t, end);
        if (hd != npos) s.add(hd, hd, end);

        const std::size_t interior = m - 1;
        if (interior == 0) {  // single cell couples the endpoints directly
            if (t != npos && hd != npos) {
                if (t == hd) s.add(t, t, 2.0 * off);
                else s.add(t, hd, off);
            }
            continue;
        }
        const double floor = 1e-300 + 1e-30 * (std::abs(diag) + std::abs(off));
        double piv = diag;
        double ct = (t != npos) ? off : 0.0;  // running coupling to the tail unknown
        double ch = 0.0;                      // and to the head unknown
        for (std::size_t j = 1; j <= interior; ++j) {
            if (j == interior && hd != npos) ch += off;
            if (std::abs(piv) < floor) piv = (piv < 0.0) ? -floor : floor;
            if (piv < 0.0) ++negatives;
            const double inv = 1.0 / piv;
            if (t != npos && t == hd) {
                s.add(t, t, -(ct + ch) * (ct + ch) * inv);
            } else {
                if (t != npos) s.add(t, t, -ct * ct * inv);
                if (hd != npos) s.add(hd, hd, -ch * ch * inv);
                if (t != npos && hd != npos) s.add(t, hd, -ct * ch * inv);
            }
            if (j < interior) {
                const double next_ct = (t != npos) ? -off * ct * inv : 0.0;
                piv = diag - off * off * inv;
                ct = next_ct;
            }
        }
    }
    if (nfree > 0) negatives += inertia(s, 1e-14 * (1.0 + s.inf_norm())).n_negative;
    return negatives;
}

/// Smallest pencil eigenvalue on a fixed mesh, found by count bisection.
inline double fem_lambda1(const MetricGraph& g, const Mesh& mesh) {
    require_valid(g);
    if (!torsion_connected(g)) throw NotConnected("graph is not connected");
    if (dof_count(g, mesh) == 0) throw Error("mesh has no unknowns");

    double lo, hi;
    if (count_below(g, mesh, 0.0) > 0) {
        hi = 0.0;
        lo = -1.0;
        int guard = 0;
        while (count_below(g, mesh, lo) > 0) {
            lo *= 2.0;
            if (++guard > 60) throw NoConvergence("could not bracket the lowest eigenvalue");
        }
    } else {
        lo = 0.0;
        hi = 1.0;
        int guard = 0;
        while (count_below(g, mesh, hi) == 0) {
            hi *= 2.0;
            if (++guard > 60) throw NoConvergence("could not bracket the lowest eigenvalue");
        }
    }
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi));
         ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (count_below(g, mesh, mid) > 0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

// ===== mesh ladder ==========================================================

struct SpectralLevel {
    std::size_t dofs = 0;
    double lambda = 0.0;
};

struct SpectralResult {
    double lambda = std::numeric_limits<double>::quiet_NaN();          // extrapolated
    double error_estimate = std::numeric_limits<double>::quiet_NaN();  // |extrapolated - finest|
    double observed_order = std::numeric_limits<double>::quiet_NaN();  // from the last three levels
    std::vector<SpectralLevel> levels;
};

struct SpectralOptions {
    double h0 = 0.0;  // initial cell width; 0 picks total length / 64
    std::size_t dof_cap = 200000;
    std::size_t max_levels = 16;
};

/// Refine until the extrapolation error estimate meets the target accuracy.
/// Throws BudgetExceeded when that would take more unknowns than the cap.
inline SpectralResult lambda1(const MetricGraph& g, double target, SpectralOptions opts = {}) {
    require_valid(g);
    if (!torsion_connected(g)) throw NotConnected("graph is not connected");
    if (!(target > 0.0)) throw Error("target accuracy must be positive");
    const double h0 = (opts.h0 > 0.0) ? opts.h0 : total_length(g) / 64.0;

    SpectralResult r;
    Mesh mesh = build_mesh(g, h0);
    while (true) {
        const std::size_t dofs = dof_count(g, mesh);
        if (dofs > opts.dof_cap)
            throw BudgetExceeded("refinement to " + std::to_string(dofs) +
                                 " unknowns exceeds the cap of " + std::to_string(opts.dof_cap));
        r.levels.push_back({dofs, fem_lambda1(g, mesh)});
        const std::size_t k = r.levels.size();
        if (k >= 2) {
            const double fine = r.levels[k - 1].lambda;
            const double coarse = r.levels[k - 2].lambda;
            r.lambda = fine + (fine - coarse) / 3.0;
            r.error_estimate = std::abs(r.lambda - fine);
            if (k >= 3) {
                const double d1 = r.levels[k - 3].lambda - coarse;
                const double d2 = coarse - fine;
                if (d1 > 0.0 && d2 > 0.0) r.observed_order = std::log2(d1 / d2);
            }
            if (r.error_estimate <= target) return r;
        }
        if (r.levels.size() >= opts.max_levels)
            throw BudgetExceeded("no convergence within " + std::to_string(opts.max_levels) +
                                 " mesh levels");
        mesh = refine(mesh);
    }
}

// ===== one-dimensional secular route ========================================

/// Smallest eigenvalue of a single interval with delta strengths a0 and a1,
/// from the transcendental characteristic equation. Throws NegativeGroundState
/// whenever the bottom of the spectrum is negative; a coarse counting probe
/// guards the cases the leading coefficient cannot see.
inline double secular_lambda1_interval(double length, double a0, double a1) {
    if (!(length > 0.0) || !std::isfinite(length)) throw Error("length must be positive");
    if (!std::isfinite(a0) || !std::isfinite(a1)) throw Error("strengths must be finite");

    MetricGraph g;
    g.vertices = {{"v0", VertexCondition::delta(a0)}, {"v1", VertexCondition::delta(a1)}};
    g.edges = {{"e0", "v0", "v1", length}};
    if (count_below(g, build_mesh(g, length / 64.0), 0.0) > 0)
        throw NegativeGroundState("bottom of the spectrum is negative");

    const double s0 = a0 + a1 + a0 * a1 * length;
    const double scale = std::abs(a0) + std::abs(a1) + std::abs(a0 * a1) * length;
    if (std::abs(s0) <= 1e-12 * (1.0 + scale)) return 0.0;
    if (s0 < 0.0) throw NegativeGroundState("bottom of the spectrum is negative");

    const double kmax = std::acos(-1.0) / length;
    auto phi = [&](double k) {
        return (a0 + a1) * std::cos(k * length) +
               (a0 * a1 - k * k) * std::sin(k * length) / k;
    };
    const double k1 = bisect_root(phi, 1e-8 * kmax, kmax, 1e-13 * kmax);
    return k1 * k1;
}

}  // namespace qgt
