// Command-line front end; `run` is the whole program minus process setup.
#ifndef RTREE_COVER_TOOLS_CLI_HPP
#define RTREE_COVER_TOOLS_CLI_HPP

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "check_suites.hpp"
#include "rtree_cover/rtree_cover.hpp"

namespace rtree_cover::cli {

/// Bad invocation or unreadable input; maps to exit code 1.
class usage_error : public error {
public:
    using error::error;
};

namespace detail {

struct GraphSource {
    std::string file;
    std::size_t rose = 0;
    std::size_t hawaiian = 0;

    void attach(CLI::App* cmd) {
        auto* f = cmd->add_option("--graph", file, "graph file (JSON)");
        auto* r = cmd->add_option("--rose", rose, "use the rose of N unit circles a, b, ...");
        auto* h = cmd->add_option("--hawaiian", hawaiian, "use circles C1..CN of lengths 1/i");
        f->excludes(r)->excludes(h);
        r->excludes(h);
    }

    GraphRef load() const {
        if (!file.empty()) return share(read_graph_file(file));
        if (rose > 0) return share(build_unit_rose(rose));
        if (hawaiian > 0) return share(build_hawaiian_truncation(hawaiian));
        throw usage_error("one of --graph, --rose or --hawaiian is required");
    }
};

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw usage_error("empty entry in list '" + text + "'");
        out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) throw usage_error("empty list");
    return out;
}

inline std::uint64_t parse_count(const std::string& text) {
    if (text.empty() || !rtree_cover::detail::all_digits(text) || text.size() > 18) {
        throw usage_error("'" + text + "' is not a nonnegative integer");
    }
    return std::stoull(text);
}

inline TreePoint point_arg(const GraphRef& g, const std::string& expr) { return TreePoint::of(parse_path(g, expr)); }

} // namespace detail

/// Runs the tool; returns 0 on pass, 2 on a property violation, 1 on bad
/// usage or input. Reports go to `out` (or to --out), messages to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact covering R-trees of finite metric graphs", "rtree-cover"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_file;
    app.add_option("--out", out_file, "write the result to FILE instead of stdout");

    detail::GraphSource graph;
    std::string path, p1, p2, at, param, params, format = "json", table_file, suite = "all", morphism_file, target_file,
                                                 z_list;
    std::vector<std::string> elements;
    bool raw = false;
    std::size_t n = 100, budget = 64, resolution = 0, random_size = 0;
    std::optional<std::uint64_t> seed;
    std::uint64_t m = 0;

    auto* normalize_cmd = app.add_subcommand("normalize", "print the normal form of a path");
    graph.attach(normalize_cmd);
    normalize_cmd->add_option("--path", path, "path expression")->required();

    auto* concat_cmd = app.add_subcommand("concat", "concatenate two paths, cancelling at the junction");
    graph.attach(concat_cmd);
    concat_cmd->add_option("--p1", p1, "first path")->required();
    concat_cmd->add_option("--p2", p2, "second path")->required();
    concat_cmd->add_flag("--raw", raw, "plain concatenation without cancellation");

    auto* invert_cmd = app.add_subcommand("invert", "print the reversed path");
    graph.attach(invert_cmd);
    invert_cmd->add_option("--path", path, "path expression")->required();

    auto* dist_cmd = app.add_subcommand("dist", "distance between two points of the covering tree");
    graph.attach(dist_cmd);
    dist_cmd->add_option("--p1", p1, "first point (path from the basepoint)")->required();
    dist_cmd->add_option("--p2", p2, "second point")->required();

    auto* gromov_cmd = app.add_subcommand("gromov", "Gromov product of two points");
    graph.attach(gromov_cmd);
    gromov_cmd->add_option("--p1", p1, "first point")->required();
    gromov_cmd->add_option("--p2", p2, "second point")->required();
    gromov_cmd->add_option("--at", at, "reference point (default: the base)");

    auto* geodesic_cmd = app.add_subcommand("geodesic", "point at distance s along the geodesic from p1 to p2");
    graph.attach(geodesic_cmd);
    geodesic_cmd->add_option("--p1", p1, "start point")->required();
    geodesic_cmd->add_option("--p2", p2, "end point")->required();
    geodesic_cmd->add_option("--s", param, "arclength parameter (rational)")->required();

    auto* lift_cmd = app.add_subcommand("lift", "sample the lift of a path to the covering tree");
    graph.attach(lift_cmd);
    lift_cmd->add_option("--path", path, "path from the basepoint")->required();
    lift_cmd->add_option("--params", params, "comma-separated parameters (default: step boundaries)");
    lift_cmd->add_option("--resolution", resolution, "also sample at k*L/N for k = 0..N");

    auto* check_cmd = app.add_subcommand("check", "run randomized verification suites");
    graph.attach(check_cmd);
    check_cmd->add_option("--suite", suite, "metric, hyperbolic, four-point, group, lyndon, submetry, lift, minimality, all or url");
    check_cmd->add_option("--n", n, "instances per suite")->check(CLI::PositiveNumber);
    check_cmd->add_option("--seed", seed, "random seed")->required();
    check_cmd->add_option("--budget", budget, "candidate lift budget for lift and url suites");
    check_cmd->add_option("--morphism", morphism_file, "morphism file for the url suite");
    check_cmd->add_option("--target", target_file, "target graph file for the url suite");

    auto* build_cmd = app.add_subcommand("build-tree", "build the tree of a length function table");
    graph.attach(build_cmd);
    build_cmd->add_option("--table", table_file, "table file (JSON)");
    build_cmd->add_option("--element", elements, "loop expression (repeatable)");
    build_cmd->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));

    auto* cross_cmd = app.add_subcommand("cross-validate", "compare built tree distances with quotient lengths");
    graph.attach(cross_cmd);
    cross_cmd->add_option("--table", table_file, "table file (JSON)");
    cross_cmd->add_option("--element", elements, "loop expression (repeatable)");
    cross_cmd->add_option("--random", random_size, "use the identity plus N random loops");
    cross_cmd->add_option("--seed", seed, "random seed for --random");

    auto* zastrow_cmd = app.add_subcommand("encode-zastrow", "sign sequence of a positive integer sequence");
    zastrow_cmd->add_option("--z", z_list, "comma-separated positive integers")->required();
    zastrow_cmd->add_option("--m", m, "prefix length")->required()->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 20));

    auto* export_cmd = app.add_subcommand("export", "write a graph as JSON or DOT");
    graph.attach(export_cmd);
    export_cmd->add_option("--format", format, "json or dot")->check(CLI::IsMember({"json", "dot"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::input_error);
    }

    std::ostringstream result;
    int code = static_cast<int>(ExitCode::pass);
    const auto emit_json = [&](const json& j) { result << j.dump(2) << "\n"; };
    const auto report_code = [](bool passed) { return static_cast<int>(passed ? ExitCode::pass : ExitCode::violation); };

    try {
        if (*normalize_cmd) {
            result << format_path(normalize(parse_path(graph.load(), path))) << "\n";
        } else if (*concat_cmd) {
            const auto g = graph.load();
            const auto a = parse_path(g, p1);
            const auto b = parse_path(g, p2);
            result << format_path(raw ? concat(a, b) : concat_cancel(a, b)) << "\n";
        } else if (*invert_cmd) {
            result << format_path(inverse(parse_path(graph.load(), path))) << "\n";
        } else if (*dist_cmd) {
            const auto g = graph.load();
            result << to_string(dbar(detail::point_arg(g, p1), detail::point_arg(g, p2))) << "\n";
        } else if (*gromov_cmd) {
            const auto g = graph.load();
            const auto a = detail::point_arg(g, p1);
            const auto b = detail::point_arg(g, p2);
            const auto value = at.empty() ? gromov_product(a, b) : gromov_product_at(detail::point_arg(g, at), a, b);
            result << to_string(value) << "\n";
        } else if (*geodesic_cmd) {
            const auto g = graph.load();
            result << format_point(geodesic_param(detail::point_arg(g, p1), detail::point_arg(g, p2), parse_rational(param))) << "\n";
        } else if (*lift_cmd) {
            const auto c = parse_path(graph.load(), path);
            std::optional<std::vector<Rational>> chosen;
            if (!params.empty() || resolution > 0) {
                chosen.emplace();
                if (!params.empty()) {
                    for (const auto& s : detail::split_list(params)) chosen->push_back(parse_rational(s));
                }
                const Rational total = length(c);
                for (std::size_t k = 0; resolution > 0 && k <= resolution; ++k) {
                    chosen->push_back(total * Rational(static_cast<long>(k)) / Rational(static_cast<long>(resolution)));
                }
            }
            const auto lifted = lift_path(c, chosen);
            bool projects = true, lipschitz = true;
            for (std::size_t i = 0; i < lifted.params.size(); ++i) {
                projects = projects && endpoint_map(lifted.points[i]) == point_at(c, lifted.params[i]);
                for (std::size_t j = i + 1; j < lifted.params.size(); ++j) {
                    lipschitz = lipschitz && dbar(lifted.points[i], lifted.points[j]) <= lifted.params[j] - lifted.params[i];
                }
            }
            emit_json(lift_to_json(lifted, {{"projects", projects}, {"lipschitz", lipschitz}}));
            code = report_code(projects && lipschitz);
        } else if (*check_cmd) {
            SuiteOptions o{n, *seed, budget};
            std::vector<CheckReport> reports;
            if (suite == "url") {
                if (morphism_file.empty() || target_file.empty()) throw usage_error("the url suite needs --morphism and --target");
                const auto target = share(read_graph_file(target_file));
                reports.push_back(url_suite(morphism_from_json(read_json_file(morphism_file), graph.load(), target), o));
            } else {
                try {
                    reports = run_suites(graph.load(), suite, o);
                } catch (const error& e) {
                    if (std::string(e.what()).rfind("unknown suite", 0) == 0) throw usage_error(e.what());
                    throw;
                }
            }
            bool passed = true;
            json list = json::array();
            for (const auto& r : reports) {
                passed = passed && r.passed();
                list.push_back(r.to_json());
            }
            emit_json({{"suite", suite}, {"seed", *seed}, {"n", n}, {"passed", passed}, {"reports", std::move(list)}});
            code = report_code(passed);
        } else if (*build_cmd || *cross_cmd) {
            const bool cross = cross_cmd->parsed();
            const auto g = graph.load();
            std::optional<LyndonTable> table;
            if (!table_file.empty()) {
                if (!elements.empty() || random_size > 0) throw usage_error("--table excludes --element and --random");
                table = table_from_json(read_json_file(table_file), g);
            } else if (!elements.empty()) {
                if (random_size > 0) throw usage_error("--element excludes --random");
                std::vector<LoopElement> es;
                for (const auto& e : elements) es.push_back(LoopElement::of(parse_path(g, e)));
                table = LyndonTable::from_elements(std::move(es));
            } else if (cross && random_size > 0) {
                if (!seed) throw usage_error("--random needs --seed");
                PathSampler s(g, *seed);
                std::vector<LoopElement> es{LoopElement::identity(g)};
                while (es.size() < random_size + 1) {
                    LoopElement e(s.random_loop());
                    if (std::find(es.begin(), es.end(), e) == es.end()) es.push_back(e);
                }
                table = LyndonTable::from_elements(std::move(es));
            } else {
                throw usage_error(cross ? "one of --table, --element or --random is required" : "one of --table or --element is required");
            }
            if (cross) {
                const auto r = cross_validate(*table);
                emit_json(r.to_json());
                code = report_code(r.passed());
            } else {
                try {
                    const auto t = build_tree(*table);
                    if (format == "dot") {
                        result << to_dot(t);
                    } else {
                        emit_json(to_json(t));
                    }
                } catch (const realizability_error& e) {
                    CheckReport r{"build-tree", 1, {}};
                    r.fail(e.witness(), e.what());
                    emit_json(r.to_json());
                    code = report_code(false);
                }
            }
        } else if (*zastrow_cmd) {
            std::vector<std::uint64_t> z;
            for (const auto& s : detail::split_list(z_list)) z.push_back(detail::parse_count(s));
            emit_json({{"z", z}, {"m", m}, {"positions", zastrow_positions(z, m)}, {"encoding", zastrow_encode(z, m)}});
        } else if (*export_cmd) {
            const auto g = graph.load();
            if (format == "dot") {
                result << graph_to_dot(*g);
            } else {
                emit_json(graph_to_json(*g));
            }
        }
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::input_error);
    }

    if (out_file.empty()) {
        out << result.str();
    } else {
        std::ofstream file(out_file, std::ios::binary);
        if (!(file << result.str())) {
            err << "error: cannot write '" << out_file << "'\n";
            return static_cast<int>(ExitCode::input_error);
        }
    }
    return code;
}

} // namespace rtree_cover::cli

#endif // RTREE_COVER_TOOLS_CLI_HPP
