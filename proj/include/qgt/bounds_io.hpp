#pragma once
// JSON and CSV forms of bound records and the Kohler-Jobin explorer table.

#include <cstdio>
#include <string>

#include <json.hpp>

#include "qgt/bounds.hpp"

namespace qgt {

namespace detail {

inline std::string csv_number(double x) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", x);
    return buffer;
}

}  // namespace detail

inline nlohmann::ordered_json bound_record_to_json(const BoundRecord& r) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["margin"] = r.margin;
    j["tolerance"] = r.tolerance;
    j["hypothesis_ok"] = r.hypothesis_ok;
    j["equality_case"] = r.equality_case;
    j["pass"] = r.passes();
    return j;
}

inline nlohmann::ordered_json bounds_report_to_json(const BoundsReport& report) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : report.records) j.push_back(bound_record_to_json(r));
    return j;
}

inline std::string bounds_report_to_csv(const BoundsReport& report) {
    std::string out = "name,lhs,rhs,margin,tolerance,hypothesis_ok,equality_case,pass\n";
    for (const auto& r : report.records) {
        out += r.name + ',' + detail::csv_number(r.lhs) + ',' + detail::csv_number(r.rhs) + ',' +
               detail::csv_number(r.margin) + ',' + detail::csv_number(r.tolerance) + ',' +
               (r.hypothesis_ok ? "true" : "false") + ',' +
               (r.equality_case ? "true" : "false") + ',' + (r.passes() ? "true" : "false") + '\n';
    }
    return out;
}

inline nlohmann::ordered_json kohler_jobin_to_json(const std::vector<KohlerJobinRow>& rows) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json r;
        r["length"] = row.length;
        r["alpha"] = row.alpha;
        r["lambda1"] = row.lambda;
        r["rigidity"] = row.rigidity;
        r["product"] = row.product;
        r["proxy"] = row.proxy;
        r["proxy_below"] = row.proxy_below;
        r["long_interval_bound"] = row.long_interval_bound;
        j.push_back(r);
    }
    return j;
}

inline std::string kohler_jobin_to_csv(const std::vector<KohlerJobinRow>& rows) {
    std::string out = "length,alpha,lambda1,rigidity,product,proxy,proxy_below,long_interval_bound\n";
    for (const auto& row : rows) {
        out += detail::csv_number(row.length) + ',' + detail::csv_number(row.alpha) + ',' +
               detail::csv_number(row.lambda) + ',' + detail::csv_number(row.rigidity) + ',' +
               detail::csv_number(row.product) + ',' + detail::csv_number(row.proxy) + ',' +
               (row.proxy_below ? "true" : "false") + ',' +
               (row.long_interval_bound ? "true" : "false") + '\n';
    }
    return out;
}

}  // namespace qgt
