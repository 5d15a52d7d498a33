// ============================================================================
// qgt: command line front end.
//
// Subcommands load a graph file, run one library operation, and print JSON or
// CSV to standard output. Exit codes: 0 success, 2 validation or precondition
// failure, 3 disconnected graph or singular torsion system, 4 accuracy budget
// exhausted, 1 anything else.
// ============================================================================

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgt/bounds.hpp"
#include "qgt/bounds_io.hpp"
#include "qgt/derivatives.hpp"
#include "qgt/derivatives_io.hpp"
#include "qgt/errors.hpp"
#include "qgt/fixtures.hpp"
#include "qgt/graph_io.hpp"
#include "qgt/spectral.hpp"
#include "qgt/surgery.hpp"
#include "qgt/surgery_io.hpp"
#include "qgt/torsion.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qgt;

/// Bad flag values and other problems the caller can fix.
struct CliError : Error {
    using Error::Error;
};

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const NotConnected*>(&e)) return 3;
    if (dynamic_cast<const NoTorsion*>(&e)) return 3;
    if (dynamic_cast<const BudgetExceeded*>(&e)) return 4;
    if (dynamic_cast<const InconclusiveAccuracy*>(&e)) return 4;
    if (dynamic_cast<const ParseError*>(&e)) return 2;
    if (dynamic_cast<const InvalidGraph*>(&e)) return 2;
    if (dynamic_cast<const UnknownFixture*>(&e)) return 2;
    if (dynamic_cast<const NotLonger*>(&e)) return 2;
    if (dynamic_cast<const NonPositiveScale*>(&e)) return 2;
    if (dynamic_cast<const SameVertex*>(&e)) return 2;
    if (dynamic_cast<const DirichletUnsupported*>(&e)) return 2;
    if (dynamic_cast<const Disconnects*>(&e)) return 2;
    if (dynamic_cast<const StrengthMismatch*>(&e)) return 2;
    if (dynamic_cast<const BadAttachment*>(&e)) return 2;
    if (dynamic_cast<const NotPendant*>(&e)) return 2;
    if (dynamic_cast<const HypothesisViolated*>(&e)) return 2;
    if (dynamic_cast<const NotDoublyConnected*>(&e)) return 2;
    if (dynamic_cast<const NegativeGroundState*>(&e)) return 2;
    if (dynamic_cast<const CliError*>(&e)) return 2;
    return 1;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw CliError(what + ": cannot parse '" + item + "' as a number");
        }
    }
    if (values.empty()) throw CliError(what + ": empty list");
    return values;
}

MetricGraph load_input_graph(const std::string& path) {
    auto g = load_graph(path);
    require_valid(g);
    return g;
}

void print(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------
// result serializers
// ---------------------------------------------------------------------------

ordered_json torsion_to_json(const MetricGraph& g, const TorsionFunction& tf, double t) {
    ordered_json vertex_values = ordered_json::object();
    for (const auto& v : g.vertices) vertex_values[v.id] = tf.vertex_values.at(v.id);
    ordered_json edges = ordered_json::array();
    for (const auto& p : tf.edges) edges.push_back({{"id", p.id}, {"a", p.a}, {"b", p.b}});
    return {{"vertex_values", vertex_values}, {"edges", edges}, {"rigidity", t}};
}

std::string torsion_to_csv(const MetricGraph& g, const TorsionFunction& tf, double t) {
    std::string out = "kind,id,value\n";
    for (const auto& v : g.vertices)
        out += "vertex," + csv_field(v.id) + ',' + detail::csv_number(tf.vertex_values.at(v.id)) + '\n';
    for (const auto& p : tf.edges) {
        out += "coefficient-a," + csv_field(p.id) + ',' + detail::csv_number(p.a) + '\n';
        out += "coefficient-b," + csv_field(p.id) + ',' + detail::csv_number(p.b) + '\n';
    }
    out += "rigidity,," + detail::csv_number(t) + '\n';
    return out;
}

ordered_json positivity_to_json(const PositivityVerdict& v) {
    return {{"classification", to_string(v.classification)},
            {"spectrum_min", v.spectrum_min},
            {"zero_tolerance", v.zero_tolerance},
            {"inertia",
             {{"n_negative", v.form_inertia.n_negative},
              {"n_zero", v.form_inertia.n_zero},
              {"n_positive", v.form_inertia.n_positive}}},
            {"vertex_min", v.vertex_min},
            {"borderline", v.borderline},
            {"routes_agree", v.routes_agree}};
}

std::string positivity_to_csv(const PositivityVerdict& v) {
    std::string out = "key,value\n";
    out += std::string("classification,") + to_string(v.classification) + '\n';
    out += "spectrum_min," + detail::csv_number(v.spectrum_min) + '\n';
    out += "zero_tolerance," + detail::csv_number(v.zero_tolerance) + '\n';
    out += "n_negative," + std::to_string(v.form_inertia.n_negative) + '\n';
    out += "n_zero," + std::to_string(v.form_inertia.n_zero) + '\n';
    out += "n_positive," + std::to_string(v.form_inertia.n_positive) + '\n';
    out += "vertex_min," + detail::csv_number(v.vertex_min) + '\n';
    out += std::string("borderline,") + (v.borderline ? "true" : "false") + '\n';
    out += std::string("routes_agree,") + (v.routes_agree ? "true" : "false") + '\n';
    return out;
}

ordered_json spectral_to_json(const SpectralResult& r) {
    ordered_json levels = ordered_json::array();
    for (const auto& level : r.levels)
        levels.push_back({{"dofs", level.dofs}, {"lambda", level.lambda}});
    return {{"lambda", r.lambda},
            {"error_estimate", r.error_estimate},
            {"observed_order", r.observed_order},
            {"levels", levels}};
}

std::string spectral_to_csv(const SpectralResult& r) {
    std::string out = "lambda,error_estimate,observed_order,levels\n";
    out += detail::csv_number(r.lambda) + ',' + detail::csv_number(r.error_estimate) + ',' +
           detail::csv_number(r.observed_order) + ',' + std::to_string(r.levels.size()) + '\n';
    return out;
}

// ---------------------------------------------------------------------------
// surgery comparison
// ---------------------------------------------------------------------------

struct CompareRow {
    std::string op;
    double before = 0.0;
    double after = 0.0;
    std::string claim;    // non-decreasing | non-increasing | scales-by-t-cubed | unchanged | none
    std::string verdict;  // holds | violated | no-claim
};

CompareRow compare_step(const MetricGraph& g, const Surgery& s, const MetricGraph& next) {
    CompareRow row;
    row.op = surgery_to_json(s).at("op").get<std::string>();
    row.before = rigidity(g);
    row.after = rigidity(next);

    double scale_factor = 1.0;
    row.claim = std::visit(
        [&](const auto& op) -> std::string {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, Lengthen>) {
                return "non-decreasing";
            } else if constexpr (std::is_same_v<T, Scale>) {
                scale_factor = op.t;
                return "scales-by-t-cubed";
            } else if constexpr (std::is_same_v<T, Glue>) {
                return "non-increasing";
            } else if constexpr (std::is_same_v<T, Cut>) {
                return "non-decreasing";
            } else if constexpr (std::is_same_v<T, Insert>) {
                return insert_hypothesis(g, op) ? "non-decreasing" : "none";
            } else if constexpr (std::is_same_v<T, Unfold>) {
                return op.rule == TipRule::Zero ? "non-decreasing" : "none";
            } else {
                static_assert(std::is_same_v<T, SetStrength>);
                const double old_strength = g.vertex(op.vertex).condition.strength;
                if (op.strength > old_strength) return "non-increasing";
                if (op.strength < old_strength) return "non-decreasing";
                return "unchanged";
            }
        },
        s);

    const double tol = 1e-9 * std::max({1.0, std::abs(row.before), std::abs(row.after)});
    if (row.claim == "none") {
        row.verdict = "no-claim";
    } else if (row.claim == "non-decreasing") {
        row.verdict = row.after >= row.before - tol ? "holds" : "violated";
    } else if (row.claim == "non-increasing") {
        row.verdict = row.after <= row.before + tol ? "holds" : "violated";
    } else if (row.claim == "unchanged") {
        row.verdict = std::abs(row.after - row.before) <= tol ? "holds" : "violated";
    } else {
        const double want = scale_factor * scale_factor * scale_factor * row.before;
        row.verdict = std::abs(row.after - want) <= 1e-9 * std::max(1.0, std::abs(want))
                          ? "holds"
                          : "violated";
    }
    return row;
}

std::vector<Surgery> load_surgeries(const std::string& path) {
    const auto text = qgt::detail::read_file(path);
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("surgery spec: ") + e.what());
    }
    std::vector<Surgery> ops;
    if (parsed.is_array()) {
        for (const auto& element : parsed) ops.push_back(parse_surgery(element.dump()));
    } else {
        ops.push_back(parse_surgery(text));
    }
    if (ops.empty()) throw ParseError("surgery spec: empty list");
    return ops;
}

// ---------------------------------------------------------------------------
// sweeps
// ---------------------------------------------------------------------------

struct SweepSpec {
    std::string target;  // "length" | "strength"
    std::string id;
    double from = 0.0;
    double to = 0.0;
    std::size_t steps = 0;
    bool log_spacing = false;
    std::vector<std::string> quantities;
};

void validate_sweep(const MetricGraph& g, const SweepSpec& spec) {
    if (spec.target != "length" && spec.target != "strength")
        throw CliError("sweep target must be 'length' or 'strength'");
    if (spec.steps < 2 || spec.steps > 1000000)
        throw CliError("sweep steps must lie in [2, 1e6]");
    if (!(spec.from < spec.to)) throw CliError("sweep requires from < to");
    if (spec.log_spacing && spec.from <= 0.0)
        throw CliError("log spacing requires a positive starting value");
    if (spec.target == "length") {
        if (spec.from <= 0.0) throw CliError("edge lengths must stay positive");
        bool found = false;
        for (const auto& e : g.edges) found = found || e.id == spec.id;
        if (!found) throw CliError("unknown edge '" + spec.id + "'");
    } else {
        if (!g.vertex_index(spec.id)) throw CliError("unknown vertex '" + spec.id + "'");
        if (g.vertex(spec.id).condition.is_dirichlet())
            throw CliError("cannot sweep the strength of a Dirichlet vertex");
    }
    for (const auto& q : spec.quantities)
        if (q != "T" && q != "lambda1" && q != "product" && q != "dT" && q != "positivity")
            throw CliError("unknown sweep quantity '" + q +
                           "' (choose from T, lambda1, product, dT, positivity)");
    if (spec.quantities.empty()) throw CliError("no sweep quantities requested");
}

double sweep_value(const SweepSpec& spec, std::size_t i) {
    const double s = static_cast<double>(i) / static_cast<double>(spec.steps - 1);
    if (spec.log_spacing) return spec.from * std::pow(spec.to / spec.from, s);
    return spec.from + s * (spec.to - spec.from);
}

ordered_json sweep_row(const MetricGraph& base, const SweepSpec& spec, std::size_t i) {
    const double value = sweep_value(spec, i);
    MetricGraph g = base;
    if (spec.target == "length") {
        for (auto& e : g.edges)
            if (e.id == spec.id) e.length = value;
    } else {
        g.vertex(spec.id).condition = VertexCondition::delta(value);
    }

    ordered_json row = {{"index", i}, {"value", value}};
    std::optional<double> t;
    std::optional<SpectralResult> spectrum;
    auto rigidity_of = [&] {
        if (!t) t = rigidity(g);
        return *t;
    };
    auto spectrum_of = [&] {
        if (!spectrum) spectrum = lambda1(g, 1e-6);
        return *spectrum;
    };
    for (const auto& q : spec.quantities) {
        if (q == "T") {
            row["T"] = rigidity_of();
        } else if (q == "lambda1") {
            row["lambda1"] = spectrum_of().lambda;
        } else if (q == "product") {
            row["product"] = spectrum_of().lambda * rigidity_of();
        } else if (q == "dT") {
            row["dT"] = spec.target == "length" ? dT_dlength(g, spec.id)
                                                : dT_dstrength(g, spec.id);
        } else {
            row["positivity"] = to_string(classify_positivity(g).classification);
        }
    }
    return row;
}

/// Rows are independent, so they are evaluated concurrently; the output order
/// is still by row index.
std::vector<ordered_json> run_sweep(const MetricGraph& base, const SweepSpec& spec) {
    std::vector<ordered_json> rows(spec.steps);
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::min<std::size_t>(spec.steps, 8));
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < spec.steps; i += workers) {
                try {
                    rows[i] = sweep_row(base, spec, i);
                } catch (...) {
                    std::lock_guard<std::mutex> hold(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& worker : pool) worker.join();
    if (first_error) std::rethrow_exception(first_error);
    return rows;
}

std::string sweep_to_csv(const SweepSpec& spec, const std::vector<ordered_json>& rows) {
    std::string out = "index,value";
    for (const auto& q : spec.quantities) out += ',' + q;
    out += '\n';
    for (const auto& row : rows) {
        out += std::to_string(row.at("index").get<std::size_t>()) + ',' +
               detail::csv_number(row.at("value").get<double>());
        for (const auto& q : spec.quantities) {
            const auto& cell = row.at(q);
            out += ',';
            out += cell.is_string() ? cell.get<std::string>()
                                    : detail::csv_number(cell.get<double>());
        }
        out += '\n';
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metric graph torsion toolbox"};
    app.require_subcommand(1);

    std::string graph_file;
    std::string output;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("graph", graph_file, "graph JSON file")->required();
        cmd->add_option("--output", output, "output format (default json; csv for sweep and kj)")
            ->check(CLI::IsMember({"json", "csv"}));
        return cmd;
    };

    auto* cmd_torsion = add_common(app.add_subcommand("torsion", "solve the torsion problem"));
    auto* cmd_positivity =
        add_common(app.add_subcommand("positivity", "classify torsion positivity"));

    double target_error = 1e-6;
    auto* cmd_lambda1 = add_common(app.add_subcommand("lambda1", "first eigenvalue"));
    cmd_lambda1->add_option("--target-error", target_error, "accuracy target")
        ->check(CLI::PositiveNumber);

    auto* cmd_bounds = add_common(app.add_subcommand("bounds", "evaluate the sharp bounds"));

    bool fd_check = false;
    auto* cmd_gradient = add_common(app.add_subcommand("gradient", "rigidity derivatives"));
    cmd_gradient->add_flag("--fd-check", fd_check, "append a finite difference comparison");

    std::string surgery_file;
    bool compare = false;
    auto* cmd_surgery =
        add_common(app.add_subcommand("surgery", "apply surgeries from a spec file"));
    cmd_surgery->add_option("spec", surgery_file, "surgery spec JSON file")->required();
    cmd_surgery->add_flag("--compare", compare,
                          "report rigidity before and after each step with the claimed direction");

    SweepSpec sweep;
    std::string quantities_flag = "T";
    auto* cmd_sweep = add_common(app.add_subcommand("sweep", "sweep one parameter"));
    cmd_sweep->add_option("--target", sweep.target, "length | strength")->required();
    cmd_sweep->add_option("--id", sweep.id, "edge or vertex id")->required();
    cmd_sweep->add_option("--from", sweep.from, "first value")->required();
    cmd_sweep->add_option("--to", sweep.to, "last value")->required();
    cmd_sweep->add_option("--steps", sweep.steps, "number of rows")->required();
    cmd_sweep->add_flag("--log", sweep.log_spacing, "geometric spacing");
    cmd_sweep->add_option("--quantities", quantities_flag,
                          "comma list from T,lambda1,product,dT,positivity");

    std::string lengths_flag, alphas_flag;
    auto* cmd_kj = app.add_subcommand("kj", "interval eigenvalue-rigidity product table");
    cmd_kj->add_option("--lengths", lengths_flag, "comma list of interval lengths")->required();
    cmd_kj->add_option("--alphas", alphas_flag, "comma list of strengths")->required();
    cmd_kj->add_option("--output", output, "output format (default csv)")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (output.empty())
        output = cmd_sweep->parsed() || cmd_kj->parsed() ? "csv" : "json";

    try {
        if (cmd_torsion->parsed()) {
            const auto g = load_input_graph(graph_file);
            const auto tf = solve_torsion(g);
            const double t = rigidity(g, tf);
            if (output == "json")
                print(torsion_to_json(g, tf, t));
            else
                std::cout << torsion_to_csv(g, tf, t);
        } else if (cmd_positivity->parsed()) {
            const auto v = classify_positivity(load_input_graph(graph_file));
            if (output == "json")
                print(positivity_to_json(v));
            else
                std::cout << positivity_to_csv(v);
        } else if (cmd_lambda1->parsed()) {
            const auto r = lambda1(load_input_graph(graph_file), target_error);
            if (output == "json")
                print(spectral_to_json(r));
            else
                std::cout << spectral_to_csv(r);
        } else if (cmd_bounds->parsed()) {
            const auto report = bounds_report(load_input_graph(graph_file));
            if (output == "json")
                print(bounds_report_to_json(report));
            else
                std::cout << bounds_report_to_csv(report);
        } else if (cmd_gradient->parsed()) {
            const auto g = load_input_graph(graph_file);
            const auto grad = gradient(g);
            ordered_json fd_rows = ordered_json::array();
            if (fd_check) {
                const auto fd = fd_gradient(g);
                auto push = [&](const char* kind, const std::string& id, double analytic,
                                double approx) {
                    fd_rows.push_back({{"kind", kind},
                                       {"id", id},
                                       {"analytic", analytic},
                                       {"fd", approx},
                                       {"abs_diff", std::abs(analytic - approx)}});
                };
                for (const auto& [id, value] : grad.d_by_length)
                    push("length", id, value, fd.d_by_length.at(id));
                for (const auto& [id, value] : grad.d_by_strength)
                    push("strength", id, value, fd.d_by_strength.at(id));
            }
            if (output == "json") {
                if (fd_check)
                    print({{"gradient", gradient_to_json(grad)}, {"fd_check", fd_rows}});
                else
                    print(gradient_to_json(grad));
            } else {
                std::string out = fd_check ? "kind,id,analytic,fd,abs_diff\n" : "kind,id,value\n";
                if (fd_check) {
                    for (const auto& row : fd_rows)
                        out += row.at("kind").get<std::string>() + ',' +
                               csv_field(row.at("id").get<std::string>()) + ',' +
                               detail::csv_number(row.at("analytic").get<double>()) + ',' +
                               detail::csv_number(row.at("fd").get<double>()) + ',' +
                               detail::csv_number(row.at("abs_diff").get<double>()) + '\n';
                } else {
                    for (const auto& [id, value] : grad.d_by_length)
                        out += "length," + csv_field(id) + ',' + detail::csv_number(value) + '\n';
                    for (const auto& [id, value] : grad.d_by_strength)
                        out += "strength," + csv_field(id) + ',' + detail::csv_number(value) + '\n';
                }
                std::cout << out;
            }
        } else if (cmd_surgery->parsed()) {
            auto g = load_input_graph(graph_file);
            const auto ops = load_surgeries(surgery_file);
            std::vector<CompareRow> trace;
            for (const auto& op : ops) {
                auto next = qgt::apply(g, op);
                if (compare) trace.push_back(compare_step(g, op, next));
                g = std::move(next);
            }
            if (!compare) {
                std::cout << serialize_graph(g);
            } else if (output == "json") {
                ordered_json steps = ordered_json::array();
                for (const auto& row : trace)
                    steps.push_back({{"op", row.op},
                                     {"rigidity_before", row.before},
                                     {"rigidity_after", row.after},
                                     {"claim", row.claim},
                                     {"verdict", row.verdict}});
                print(steps);
            } else {
                std::string out = "op,rigidity_before,rigidity_after,claim,verdict\n";
                for (const auto& row : trace)
                    out += row.op + ',' + detail::csv_number(row.before) + ',' +
                           detail::csv_number(row.after) + ',' + row.claim + ',' + row.verdict +
                           '\n';
                std::cout << out;
            }
        } else if (cmd_sweep->parsed()) {
            const auto g = load_input_graph(graph_file);
            sweep.quantities.clear();
            std::stringstream stream(quantities_flag);
            std::string q;
            while (std::getline(stream, q, ','))
                if (!q.empty()) sweep.quantities.push_back(q);
            validate_sweep(g, sweep);
            const auto rows = run_sweep(g, sweep);
            if (output == "json") {
                ordered_json j = ordered_json::array();
                for (const auto& row : rows) j.push_back(row);
                print(j);
            } else {
                std::cout << sweep_to_csv(sweep, rows);
            }
        } else if (cmd_kj->parsed()) {
            const auto lengths = parse_list(lengths_flag, "--lengths");
            const auto alphas = parse_list(alphas_flag, "--alphas");
            for (double v : lengths)
                if (!(v > 0.0)) throw CliError("--lengths: values must be positive");
            for (double v : alphas)
                if (!(v > 0.0)) throw CliError("--alphas: values must be positive");
            const auto rows = kohler_jobin_explorer(lengths, alphas);
            if (output == "json")
                print(kohler_jobin_to_json(rows));
            else
                std::cout << kohler_jobin_to_csv(rows);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}
