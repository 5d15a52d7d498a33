#pragma once
// Closed-form bounds on torsional rigidity, each evaluated against solver
// output and reported with an explicit margin: the flower lower bound, the
// Saint-Venant upper bound, its doubly-connected refinement, the eigenvalue
// product bound, and an exploratory table for Kohler-Jobin-type quantities
// on intervals.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "qgt/graph.hpp"
#include "qgt/spectral.hpp"
#include "qgt/torsion.hpp"

namespace qgt {

/// One inequality, oriented so margin = rhs - lhs and margin >= -tolerance
/// means pass. A record with hypothesis_ok == false is informational only.
struct BoundRecord {
    std::string name;
    double lhs = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    double margin = std::numeric_limits<double>::quiet_NaN();
    double tolerance = 0.0;
    bool hypothesis_ok = true;
    bool equality_case = false;

    bool passes() const { return !hypothesis_ok || margin >= -tolerance; }
};

namespace detail {

inline BoundRecord make_record(std::string name, double lhs, double rhs) {
    BoundRecord r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tolerance = 1e-9 * std::max(std::abs(lhs), std::abs(rhs));
    r.equality_case = std::abs(r.margin) <= r.tolerance;
    return r;
}

/// Total strength |alpha|_1 after checking the shared hypothesis of the
/// closed-form bounds: connected, delta conditions only, all strengths
/// nonnegative with at least one positive.
inline double require_bound_hypothesis(const MetricGraph& g, const char* who) {
    require_valid(g);
    if (!is_connected(g)) throw HypothesisViolated(std::string(who) + " needs a connected graph");
    double total = 0.0;
    bool positive = false;
    for (const auto& v : g.vertices) {
        if (v.condition.is_dirichlet())
            throw HypothesisViolated(std::string(who) + " covers delta conditions only");
        if (v.condition.strength < 0.0)
            throw HypothesisViolated(std::string(who) + " needs nonnegative strengths");
        if (v.condition.strength > 0.0) positive = true;
        total += v.condition.strength;
    }
    if (!positive)
        throw HypothesisViolated(std::string(who) + " needs at least one positive strength");
    return total;
}

}  // namespace detail

/// T >= |G|^3/(12 E^2) + |G|^2/|alpha|_1, with equality exactly for
/// equilateral flowers (all length at one vertex, split into E equal loops).
inline BoundRecord flower_lower_bound(const MetricGraph& g) {
    const double total_alpha = detail::require_bound_hypothesis(g, "flower lower bound");
    const double size = total_length(g);
    const double edges = static_cast<double>(g.edges.size());
    const double bound = size * size * size / (12.0 * edges * edges) + size * size / total_alpha;
    return detail::make_record("flower-lower", bound, rigidity(g));
}

/// T <= |G|^3/3 + |G|^2/|alpha|_1, with equality exactly for a path carrying
/// all strength at one end.
inline BoundRecord saint_venant_bound(const MetricGraph& g) {
    const double total_alpha = detail::require_bound_hypothesis(g, "Saint-Venant bound");
    const double size = total_length(g);
    const double bound = size * size * size / 3.0 + size * size / total_alpha;
    return detail::make_record("saint-venant", rigidity(g), bound);
}

/// For doubly connected graphs the Saint-Venant constant improves fourfold:
/// T <= |G|^3/12 + |G|^2/|alpha|_1, twice the rigidity of a half-length path
/// with half the strength at one end, saturated by a circle with all
/// strength at one point.
inline BoundRecord doubly_connected_bound(const MetricGraph& g) {
    const double total_alpha = detail::require_bound_hypothesis(g, "doubly-connected bound");
    if (!is_doubly_connected(g))
        throw NotDoublyConnected("the doubly-connected bound needs a bridgeless graph");
    const double size = total_length(g);
    const double bound = size * size * size / 12.0 + size * size / total_alpha;
    return detail::make_record("doubly-connected", rigidity(g), bound);
}

/// lambda_1 * T < |G|. The eigenvalue is computed numerically, so the
/// verdict is only reported when the margin clears ten times the eigenvalue
/// error estimate scaled by T. The accuracy target escalates until the
/// verdict is unambiguous; when even the refinement budget cannot separate
/// margin from error, InconclusiveAccuracy.
inline BoundRecord eigenvalue_product_bound(const MetricGraph& g, double lambda_target = 1e-6,
                                            SpectralOptions opts = {}) {
    detail::require_bound_hypothesis(g, "eigenvalue product bound");
    const double t = rigidity(g);
    double target = lambda_target;
    double last_error = std::numeric_limits<double>::quiet_NaN();
    for (int attempt = 0; attempt < 3; ++attempt) {
        SpectralResult spectrum;
        try {
            spectrum = lambda1(g, target, opts);
        } catch (const BudgetExceeded&) {
            break;
        }
        auto record =
            detail::make_record("eigenvalue-product", spectrum.lambda * t, total_length(g));
        if (std::abs(record.margin) > 10.0 * spectrum.error_estimate * t) return record;
        last_error = spectrum.error_estimate;
        target *= 1e-3;
    }
    char text[64];
    std::snprintf(text, sizeof text, "%.3g", last_error);
    throw InconclusiveAccuracy(std::string("eigenvalue error ") + text +
                               " is too large to decide the product bound");
}

// ===== Kohler-Jobin exploration =============================================

/// One interval configuration: Neumann at one end, strength alpha at the
/// other. The product lambda_1 T^{2/3} is compared against the closed-form
/// proxy built from the eigenvalue lower bound
/// lambda_1 >= pi^2 alpha / (L (pi^2 + 4 alpha L)).
struct KohlerJobinRow {
    double length = 0.0;
    double alpha = 0.0;
    double lambda = 0.0;     // exact first eigenvalue, via the secular equation
    double rigidity = 0.0;   // L^3/3 + L^2/alpha
    double product = 0.0;    // lambda * rigidity^{2/3}
    double proxy = 0.0;      // eigenvalue lower bound * rigidity^{2/3}
    bool proxy_below = false;          // proxy <= product
    bool long_interval_bound = false;  // L >= 1: product >= pi^2 a/(9^{1/3}(pi^2+4a))
};

/// Exploratory only: no inequality is asserted, the table records what the
/// candidate quantities do on interval graphs.
inline std::vector<KohlerJobinRow> kohler_jobin_explorer(const std::vector<double>& lengths,
                                                         const std::vector<double>& alphas) {
    const double pi = std::acos(-1.0);
    std::vector<KohlerJobinRow> rows;
    for (double length : lengths)
        for (double alpha : alphas) {
            if (!(length > 0.0)) throw Error("explorer lengths must be positive");
            if (!(alpha > 0.0)) throw Error("explorer strengths must be positive");
            KohlerJobinRow row;
            row.length = length;
            row.alpha = alpha;
            row.lambda = secular_lambda1_interval(length, alpha, 0.0);
            row.rigidity = length * length * length / 3.0 + length * length / alpha;
            const double t23 = std::pow(row.rigidity, 2.0 / 3.0);
            row.product = row.lambda * t23;
            row.proxy = pi * pi * alpha / (length * (pi * pi + 4.0 * alpha * length)) * t23;
            row.proxy_below = row.proxy <= row.product + 1e-9 * (1.0 + std::abs(row.product));
            const double constrained = pi * pi * alpha / (std::cbrt(9.0) * (pi * pi + 4.0 * alpha));
            row.long_interval_bound =
                length < 1.0 || row.product >= constrained - 1e-9 * (1.0 + constrained);
            rows.push_back(row);
        }
    return rows;
}

// ===== aggregate report =====================================================

struct BoundsReport {
    std::vector<BoundRecord> records;
};

/// Every graph bound in one report. Hypothesis failures become informational
/// records instead of errors; accuracy failures still propagate.
inline BoundsReport bounds_report(const MetricGraph& g, double lambda_target = 1e-6,
                                  SpectralOptions opts = {}) {
    BoundsReport report;
    auto run = [&](const char* name, auto&& op) {
        try {
            report.records.push_back(op());
        } catch (const HypothesisViolated&) {
            BoundRecord r;
            r.name = name;
            r.hypothesis_ok = false;
            report.records.push_back(r);
        } catch (const NotDoublyConnected&) {
            BoundRecord r;
            r.name = name;
            r.hypothesis_ok = false;
            report.records.push_back(r);
        }
    };
    run("flower-lower", [&] { return flower_lower_bound(g); });
    run("saint-venant", [&] { return saint_venant_bound(g); });
    run("doubly-connected", [&] { return doubly_connected_bound(g); });
    run("eigenvalue-product", [&] { return eigenvalue_product_bound(g, lambda_target, opts); });
    return report;
}

}  // namespace qgt
