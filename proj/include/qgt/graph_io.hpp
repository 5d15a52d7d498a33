#pragma once
// Canonical JSON format for metric graphs.
//
//   {
//     "vertices": [
//       {"id": "v0", "condition": {"delta": 1.5}},
//       {"id": "v1", "condition": "dirichlet"}
//     ],
//     "edges": [
//       {"id": "e0", "tail": "v0", "head": "v1", "length": 1.0}
//     ]
//   }
//
// Parsing is strict: unknown keys, wrong types, non-finite numbers and
// non-positive lengths are rejected with ParseError. serialize_graph() is
// the canonical form (fixed key order, two-space indent, trailing newline),
// so load . serialize is byte-identical on canonical files.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qgt/errors.hpp"
#include "qgt/graph.hpp"

namespace qgt {

namespace detail {

inline void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> keys,
                         const std::string& what) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) { known = true; break; }
        if (!known) throw ParseError(what + ": unknown key '" + it.key() + "'");
    }
    for (const char* k : keys)
        if (!obj.contains(k)) throw ParseError(what + ": missing key '" + k + "'");
}

inline double finite_number(const nlohmann::json& j, const std::string& what) {
    if (!j.is_number()) throw ParseError(what + ": expected a number");
    double x = j.get<double>();
    if (!std::isfinite(x)) throw ParseError(what + ": non-finite number");
    return x;
}

}  // namespace detail

inline VertexCondition condition_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "dirichlet") return VertexCondition::dirichlet();
        throw ParseError("condition: unknown keyword '" + j.get<std::string>() + "'");
    }
    if (j.is_object()) {
        detail::require_keys(j, {"delta"}, "condition");
        return VertexCondition::delta(detail::finite_number(j.at("delta"), "condition.delta"));
    }
    throw ParseError("condition: expected \"dirichlet\" or {\"delta\": <number>}");
}

inline nlohmann::ordered_json condition_to_json(const VertexCondition& c) {
    if (c.is_dirichlet()) return "dirichlet";
    return nlohmann::ordered_json{{"delta", c.strength}};
}

inline MetricGraph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("graph: expected a JSON object");
    detail::require_keys(j, {"vertices", "edges"}, "graph");
    if (!j.at("vertices").is_array()) throw ParseError("graph.vertices: expected an array");
    if (!j.at("edges").is_array()) throw ParseError("graph.edges: expected an array");

    MetricGraph g;
    for (const auto& jv : j.at("vertices")) {
        if (!jv.is_object()) throw ParseError("vertex: expected an object");
        detail::require_keys(jv, {"id", "condition"}, "vertex");
        if (!jv.at("id").is_string()) throw ParseError("vertex.id: expected a string");
        g.vertices.push_back({jv.at("id").get<std::string>(),
                              condition_from_json(jv.at("condition"))});
    }
    for (const auto& je : j.at("edges")) {
        if (!je.is_object()) throw ParseError("edge: expected an object");
        detail::require_keys(je, {"id", "tail", "head", "length"}, "edge");
        for (const char* k : {"id", "tail", "head"})
            if (!je.at(k).is_string()) throw ParseError(std::string("edge.") + k + ": expected a string");
        Edge e;
        e.id = je.at("id").get<std::string>();
        e.tail = je.at("tail").get<std::string>();
        e.head = je.at("head").get<std::string>();
        e.length = detail::finite_number(je.at("length"), "edge.length");
        g.edges.push_back(e);
    }
    auto violations = validate(g);
    if (!violations.empty()) {
        std::string msg = "graph invalid:";
        for (const auto& v : violations) msg += " [" + v.code + "] " + v.detail + ";";
        throw ParseError(msg);
    }
    return g;
}

inline nlohmann::ordered_json graph_to_json(const MetricGraph& g) {
    nlohmann::ordered_json j;
    j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : g.vertices)
        j["vertices"].push_back({{"id", v.id}, {"condition", condition_to_json(v.condition)}});
    j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back(
            {{"id", e.id}, {"tail", e.tail}, {"head", e.head}, {"length", e.length}});
    return j;
}

/// Canonical serialization: fixed key order, two-space indent, one trailing
/// newline. Round trip on canonical files is byte-identical.
inline std::string serialize_graph(const MetricGraph& g) {
    return graph_to_json(g).dump(2) + "\n";
}

inline MetricGraph parse_graph(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return graph_from_json(j);
}

inline MetricGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

inline void save_graph(const MetricGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << serialize_graph(g);
}

}  // namespace qgt
