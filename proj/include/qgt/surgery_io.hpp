#pragma once
// JSON format for surgery specifications, one object per operation:
//
//   {"op": "lengthen", "edge": "e0", "new_length": 2.0}
//   {"op": "scale", "t": 2.0}
//   {"op": "glue", "v1": "v0", "v2": "v1"}            // optional "new_id"
//   {"op": "cut", "at": "v0", "into": [
//       {"id": "a", "strength": 1.0, "ends": [{"edge": "e0", "end": "tail"}]},
//       {"id": "b", "strength": 1.0, "ends": [{"edge": "e0", "end": "head"}]}]}
//   {"op": "insert", "at": "v1", "graph": {...}, "attachment": {"e0": "w0"}}
//   {"op": "unfold", "at": "v0", "pendants": ["e1", "e2"], "rule": "zero"}
//   {"op": "set-strength", "vertex": "v0", "strength": 2.0}
//
// Parsing is strict in the same sense as the graph format.

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qgt/graph_io.hpp"
#include "qgt/surgery.hpp"

namespace qgt {

namespace detail {

inline void require_keys_with_optional(const nlohmann::json& obj,
                                       std::initializer_list<const char*> required,
                                       std::initializer_list<const char*> optional,
                                       const std::string& what) {
    if (!obj.is_object()) throw ParseError(what + " must be an object");
    for (const char* k : required)
        if (!obj.contains(k)) throw ParseError(what + " is missing key '" + std::string(k) + "'");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool known = false;
        for (const char* k : required) known = known || key == k;
        for (const char* k : optional) known = known || key == k;
        if (!known) throw ParseError(what + " has unknown key '" + key + "'");
    }
}

inline std::string json_string(const nlohmann::json& j, const std::string& what) {
    if (!j.is_string()) throw ParseError(what + " must be a string");
    return j.get<std::string>();
}

inline EdgeEnd end_from_json(const nlohmann::json& j) {
    require_keys(j, {"edge", "end"}, "edge end");
    const std::string side = json_string(j.at("end"), "edge end side");
    if (side != "tail" && side != "head")
        throw ParseError("edge end side must be \"tail\" or \"head\"");
    return {json_string(j.at("edge"), "edge end id"), side == "head"};
}

inline CutPart cut_part_from_json(const nlohmann::json& j) {
    require_keys(j, {"id", "strength", "ends"}, "cut part");
    CutPart part;
    part.id = json_string(j.at("id"), "cut part id");
    part.strength = finite_number(j.at("strength"), "cut part strength");
    if (!j.at("ends").is_array()) throw ParseError("cut part ends must be an array");
    for (const auto& je : j.at("ends")) part.ends.push_back(end_from_json(je));
    return part;
}

}  // namespace detail

inline Surgery surgery_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("surgery must be an object");
    if (!j.contains("op")) throw ParseError("surgery is missing key 'op'");
    const std::string op = detail::json_string(j.at("op"), "surgery op");

    if (op == "lengthen") {
        detail::require_keys(j, {"op", "edge", "new_length"}, "lengthen");
        return Lengthen{detail::json_string(j.at("edge"), "edge id"),
                        detail::finite_number(j.at("new_length"), "new_length")};
    }
    if (op == "scale") {
        detail::require_keys(j, {"op", "t"}, "scale");
        return Scale{detail::finite_number(j.at("t"), "scale factor")};
    }
    if (op == "glue") {
        detail::require_keys_with_optional(j, {"op", "v1", "v2"}, {"new_id"}, "glue");
        Glue s;
        s.v1 = detail::json_string(j.at("v1"), "glue v1");
        s.v2 = detail::json_string(j.at("v2"), "glue v2");
        if (j.contains("new_id")) s.new_id = detail::json_string(j.at("new_id"), "glue new_id");
        return s;
    }
    if (op == "cut") {
        detail::require_keys(j, {"op", "at", "into"}, "cut");
        const auto& into = j.at("into");
        if (!into.is_array() || into.size() != 2)
            throw ParseError("cut 'into' must be an array of exactly two parts");
        Cut s;
        s.at = detail::json_string(j.at("at"), "cut vertex");
        s.first = detail::cut_part_from_json(into[0]);
        s.second = detail::cut_part_from_json(into[1]);
        return s;
    }
    if (op == "insert") {
        detail::require_keys(j, {"op", "at", "graph", "attachment"}, "insert");
        Insert s;
        s.at = detail::json_string(j.at("at"), "insert vertex");
        s.graph = graph_from_json(j.at("graph"));
        if (!j.at("attachment").is_object()) throw ParseError("attachment must be an object");
        for (const auto& [eid, target] : j.at("attachment").items())
            s.attachment[eid] = detail::json_string(target, "attachment target");
        return s;
    }
    if (op == "unfold") {
        detail::require_keys(j, {"op", "at", "pendants", "rule"}, "unfold");
        Unfold s;
        s.at = detail::json_string(j.at("at"), "unfold vertex");
        if (!j.at("pendants").is_array()) throw ParseError("pendants must be an array");
        for (const auto& je : j.at("pendants"))
            s.pendants.push_back(detail::json_string(je, "pendant edge id"));
        const std::string rule = detail::json_string(j.at("rule"), "unfold rule");
        if (rule == "zero") s.rule = TipRule::Zero;
        else if (rule == "sum") s.rule = TipRule::Sum;
        else throw ParseError("unfold rule must be \"zero\" or \"sum\"");
        return s;
    }
    if (op == "set-strength") {
        detail::require_keys(j, {"op", "vertex", "strength"}, "set-strength");
        return SetStrength{detail::json_string(j.at("vertex"), "vertex id"),
                           detail::finite_number(j.at("strength"), "strength")};
    }
    throw ParseError("unknown surgery op '" + op + "'");
}

inline nlohmann::ordered_json surgery_to_json(const Surgery& s) {
    using nlohmann::ordered_json;
    return std::visit(
        [](const auto& op) -> ordered_json {
            using T = std::decay_t<decltype(op)>;
            ordered_json j;
            if constexpr (std::is_same_v<T, Lengthen>) {
                j["op"] = "lengthen";
                j["edge"] = op.edge;
                j["new_length"] = op.new_length;
            } else if constexpr (std::is_same_v<T, Scale>) {
                j["op"] = "scale";
                j["t"] = op.t;
            } else if constexpr (std::is_same_v<T, Glue>) {
                j["op"] = "glue";
                j["v1"] = op.v1;
                j["v2"] = op.v2;
                if (!op.new_id.empty()) j["new_id"] = op.new_id;
            } else if constexpr (std::is_same_v<T, Cut>) {
                j["op"] = "cut";
                j["at"] = op.at;
                auto part = [](const CutPart& p) {
                    ordered_json jp;
                    jp["id"] = p.id;
                    jp["strength"] = p.strength;
                    jp["ends"] = ordered_json::array();
                    for (const auto& end : p.ends)
                        jp["ends"].push_back(
                            {{"edge", end.edge}, {"end", end.at_head ? "head" : "tail"}});
                    return jp;
                };
                j["into"] = ordered_json::array({part(op.first), part(op.second)});
            } else if constexpr (std::is_same_v<T, Insert>) {
                j["op"] = "insert";
                j["at"] = op.at;
                j["graph"] = graph_to_json(op.graph);
                j["attachment"] = ordered_json::object();
                for (const auto& [eid, target] : op.attachment) j["attachment"][eid] = target;
            } else if constexpr (std::is_same_v<T, Unfold>) {
                j["op"] = "unfold";
                j["at"] = op.at;
                j["pendants"] = op.pendants;
                j["rule"] = (op.rule == TipRule::Zero) ? "zero" : "sum";
            } else if constexpr (std::is_same_v<T, SetStrength>) {
                j["op"] = "set-strength";
                j["vertex"] = op.vertex;
                j["strength"] = op.strength;
            }
            return j;
        },
        s);
}

inline Surgery parse_surgery(const std::string& text) {
    try {
        return surgery_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("invalid surgery JSON: ") + ex.what());
    }
}

inline std::string serialize_surgery(const Surgery& s) { return surgery_to_json(s).dump(2) + "\n"; }

inline Surgery load_surgery(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_surgery(buffer.str());
}

}  // namespace qgt
