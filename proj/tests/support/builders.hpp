#pragma once
// Small graph constructors shared by the test suites.

#include <string>
#include <vector>

#include "qgt/graph.hpp"

namespace testsupport {

using qgt::MetricGraph;
using qgt::VertexCondition;

/// Single edge of the given length, delta strengths a0 (tail) and a1 (head),
/// either end optionally pinned instead.
inline MetricGraph interval(double length, double a0, double a1, bool dirichlet_head = false,
                            bool dirichlet_tail = false) {
    MetricGraph g;
    g.vertices = {
        {"v0", dirichlet_tail ? VertexCondition::dirichlet() : VertexCondition::delta(a0)},
        {"v1", dirichlet_head ? VertexCondition::dirichlet() : VertexCondition::delta(a1)}};
    g.edges = {{"e0", "v0", "v1", length}};
    return g;
}

/// Path of edges e0..e_{n-1} through vertices v0..vn. conditions.size() must
/// be lengths.size() + 1.
inline MetricGraph path(const std::vector<double>& lengths,
                        const std::vector<VertexCondition>& conditions) {
    MetricGraph g;
    for (std::size_t i = 0; i < conditions.size(); ++i)
        g.vertices.push_back({"v" + std::to_string(i), conditions[i]});
    for (std::size_t i = 0; i < lengths.size(); ++i)
        g.edges.push_back({"e" + std::to_string(i), "v" + std::to_string(i),
                           "v" + std::to_string(i + 1), lengths[i]});
    return g;
}

inline MetricGraph path(const std::vector<double>& lengths, const std::vector<double>& strengths) {
    std::vector<VertexCondition> conds;
    for (double s : strengths) conds.push_back(VertexCondition::delta(s));
    return path(lengths, conds);
}

/// All loops at a single vertex of the given strength.
inline MetricGraph flower(const std::vector<double>& lengths, double alpha) {
    MetricGraph g;
    g.vertices = {{"v0", VertexCondition::delta(alpha)}};
    for (std::size_t i = 0; i < lengths.size(); ++i)
        g.edges.push_back({"e" + std::to_string(i), "v0", "v0", lengths[i]});
    return g;
}

/// Circle made of two parallel edges between two vertices.
inline MetricGraph circle2(double l0, double l1, double a0, double a1) {
    MetricGraph g;
    g.vertices = {{"v0", VertexCondition::delta(a0)}, {"v1", VertexCondition::delta(a1)}};
    g.edges = {{"e0", "v0", "v1", l0}, {"e1", "v0", "v1", l1}};
    return g;
}

}  // namespace testsupport
