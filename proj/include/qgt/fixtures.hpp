#pragma once

// ============================================================================
// Named example graphs with frozen expected values.
//
// Fixtures live on disk as canonical graph files next to a manifest
// (expectations.json) that records, for each fixture, the quantities it is
// expected to reproduce, the value, and a short origin tag naming the method
// that produced the frozen value ("closed-form", "elimination", "bisection",
// "construction", "limit").
// ============================================================================

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgt/errors.hpp"
#include "qgt/graph_io.hpp"

namespace qgt {

struct Fixture {
    std::string name;
    MetricGraph graph;
    nlohmann::ordered_json expectations;  // array of expectation objects
    std::string notes;
};

/// Directory holding the fixture files: the QGT_FIXTURES_DIR environment
/// variable when set, otherwise the compiled-in default.
inline std::string fixtures_dir() {
    if (const char* env = std::getenv("QGT_FIXTURES_DIR"); env && *env) return env;
#ifdef QGT_DEFAULT_FIXTURES_DIR
    return QGT_DEFAULT_FIXTURES_DIR;
#else
    return "fixtures";
#endif
}

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace detail

/// The parsed manifest: fixture name -> {graph, notes, expectations}.
inline nlohmann::ordered_json fixtures_manifest() {
    const auto text = detail::read_file(fixtures_dir() + "/expectations.json");
    nlohmann::ordered_json manifest;
    try {
        manifest = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("fixture manifest: ") + e.what());
    }
    if (!manifest.is_object()) throw ParseError("fixture manifest: expected an object");
    return manifest;
}

/// All fixture names, in manifest order.
inline std::vector<std::string> fixture_names() {
    std::vector<std::string> names;
    const auto manifest = fixtures_manifest();
    for (const auto& [name, entry] : manifest.items()) {
        (void)entry;
        names.push_back(name);
    }
    return names;
}

/// Load one fixture by name; the graph is validated on load.
inline Fixture load_fixture(const std::string& name) {
    const auto manifest = fixtures_manifest();
    if (!manifest.contains(name)) throw UnknownFixture("unknown fixture '" + name + "'");
    const auto& entry = manifest.at(name);
    Fixture fixture;
    fixture.name = name;
    fixture.graph = load_graph(fixtures_dir() + "/" + entry.at("graph").get<std::string>());
    require_valid(fixture.graph);
    fixture.expectations = entry.at("expectations");
    fixture.notes = entry.at("notes").get<std::string>();
    return fixture;
}

}  // namespace qgt
