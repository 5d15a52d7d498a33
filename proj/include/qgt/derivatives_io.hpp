#pragma once
// JSON form of a rigidity gradient:
//
//   {
//     "d_by_length": {"e0": 3.0},
//     "d_by_strength": {"v0": -1.0, "v1": -2.25}
//   }

#include <string>

#include <json.hpp>

#include "qgt/derivatives.hpp"

namespace qgt {

inline nlohmann::ordered_json gradient_to_json(const Gradient& grad) {
    nlohmann::ordered_json j;
    j["d_by_length"] = nlohmann::ordered_json::object();
    for (const auto& [id, value] : grad.d_by_length) j["d_by_length"][id] = value;
    j["d_by_strength"] = nlohmann::ordered_json::object();
    for (const auto& [id, value] : grad.d_by_strength) j["d_by_strength"][id] = value;
    return j;
}

inline std::string serialize_gradient(const Gradient& grad) {
    return gradient_to_json(grad).dump(2) + "\n";
}

}  // namespace qgt
