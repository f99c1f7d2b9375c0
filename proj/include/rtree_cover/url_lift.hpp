#ifndef RTREE_COVER_URL_LIFT_HPP
#define RTREE_COVER_URL_LIFT_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtree_cover/covering_tree.hpp"
#include "rtree_cover/error.hpp"
#include "rtree_cover/loop_group.hpp"
#include "rtree_cover/report.hpp"
#include "rtree_cover/rho_path.hpp"

namespace rtree_cover {

/// The lift of a path into the covering tree, evaluated at finitely many
/// arclength parameters.
struct SampledLift {
    RhoPath source;
    std::vector<Rational> params;
    std::vector<TreePoint> points;

    const TreePoint& final_point() const { return points.back(); }
};

/// Point of the lift at parameter s: the normalized prefix of length s.
inline TreePoint lift_point(const RhoPath& c, const Rational& s) { return TreePoint::of(prefix(c, s)); }

/// Step boundaries plus every parameter where the running reduction switches
/// between cancelling and extending. Between two consecutive values the lift
/// runs along a single geodesic of the tree.
inline std::vector<Rational> default_lift_params(const RhoPath& c) {
    std::vector<Rational> out{Rational(0)};
    std::vector<Step> stack;
    Rational at(0);
    for (const auto& s : c.steps()) {
        const Rational len = s.length();
        const Rational cancelled = detail::push_reduced(stack, s);
        if (cancelled > 0 && cancelled < len) out.push_back(at + cancelled);
        at += len;
        out.push_back(at);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Samples the lift at `params` (sorted, duplicates dropped); the default set
/// is used when none are given.
inline SampledLift lift_path(const RhoPath& c, std::optional<std::vector<Rational>> params = std::nullopt) {
    if (c.start() != c.graph().basepoint()) throw path_error("lifted path must start at the basepoint");
    std::vector<Rational> ps = params ? std::move(*params) : default_lift_params(c);
    const Rational total = length(c);
    for (const auto& s : ps) {
        if (s < 0 || s > total) throw path_error("lift parameter " + to_string(s) + " outside [0, " + to_string(total) + "]");
    }
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    SampledLift out{c, std::move(ps), {}};
    out.points.reserve(out.params.size());
    for (const auto& s : out.params) out.points.push_back(lift_point(c, s));
    return out;
}

enum class LiftStatus { agree, disagree, not_a_lift };

inline const char* status_name(LiftStatus s) {
    switch (s) {
    case LiftStatus::agree: return "agree";
    case LiftStatus::disagree: return "disagree";
    case LiftStatus::not_a_lift: return "not-a-lift";
    }
    return "?";
}

struct UniquenessReport {
    LiftStatus status = LiftStatus::agree;
    std::optional<Rational> parameter;  ///< first offending sample
    CheckReport report;
};

/// Compares a claimed lift of c with the prefix-normalization lift. A claim
/// that does not project onto c, or does not start at the base, is rejected
/// as not a lift before any comparison.
inline UniquenessReport check_lift_uniqueness(const RhoPath& c, const SampledLift& alternative) {
    if (alternative.params.size() != alternative.points.size()) throw error("lift has mismatched parameters and points");
    UniquenessReport out;
    out.report.check = "lift-uniqueness";
    const Rational total = length(c);
    const auto base = TreePoint::base(c.graph_ref());
    for (std::size_t i = 0; i < alternative.params.size(); ++i) {
        const auto& s = alternative.params[i];
        const auto& p = alternative.points[i];
        ++out.report.instances;
        const bool projects = s >= 0 && s <= total && same_graph(p.path(), c) && endpoint_map(p) == point_at(c, s);
        if (!projects || (s == 0 && p != base)) {
            out.status = LiftStatus::not_a_lift;
            out.parameter = s;
            out.report.fail({to_string(s), format_point(p)}, "not a lift of the path");
            return out;
        }
    }
    for (std::size_t i = 0; i < alternative.params.size(); ++i) {
        const auto& s = alternative.params[i];
        if (alternative.points[i] != lift_point(c, s)) {
            out.status = LiftStatus::disagree;
            out.parameter = s;
            out.report.fail({to_string(s), format_point(alternative.points[i]), format_point(lift_point(c, s))},
                            "two distinct lifts");
            return out;
        }
    }
    return out;
}

/// Serialized lift: source, samples and any attached check results.
inline nlohmann::json lift_to_json(const SampledLift& lift, nlohmann::json checks = nlohmann::json::object()) {
    nlohmann::json out;
    out["source"] = format_path(lift.source);
    auto samples = nlohmann::json::array();
    for (std::size_t i = 0; i < lift.params.size(); ++i) {
        samples.push_back({{"s", to_string(lift.params[i])}, {"point", format_point(lift.points[i])}});
    }
    out["samples"] = std::move(samples);
    out["checks"] = std::move(checks);
    return out;
}

// ---------------------------------------------------------------------------
// Unique-lifting criterion for graph morphisms

/// Every source path from the source basepoint whose image is exactly `target`
/// (step by step, in pushed-forward form). Stops once more than `budget`
/// partial candidates are alive; `truncated` is set in that case.
struct LiftEnumeration {
    std::vector<RhoPath> lifts;
    bool truncated = false;
};

inline LiftEnumeration enumerate_lifts(const GraphMorphism& m, const RhoPath& target, std::size_t budget) {
    const auto& src = *m.source();
    const auto& tgt = *m.target();
    if (!target.graph().same_space(tgt)) throw graph_error("trial path does not live in the morphism's target");
    LiftEnumeration out;
    if (target.start() != tgt.basepoint()) throw path_error("trial path must start at the target basepoint");

    struct Partial {
        GraphPoint at;
        std::vector<Step> steps;
    };
    std::vector<Partial> alive{{src.basepoint(), {}}};
    for (const auto& ts : target.steps()) {
        std::vector<Partial> next;
        for (const auto& part : alive) {
            for (std::size_t e = 0; e < src.edge_count(); ++e) {
                const auto& img = m.edge_map()[e];
                if (img.target != ts.edge) continue;
                const Rational& tl = tgt.edge(ts.edge).length;
                const auto back = [&](const Rational& o) { return Rational((img.flip ? tl - o : o) / img.scale); };
                const Step s{e, img.flip ? flip(ts.sign) : ts.sign, back(ts.from), back(ts.to)};
                if (src.point_on_edge(e, s.from) != part.at) continue;
                Partial grown = part;
                grown.steps.push_back(s);
                grown.at = src.point_on_edge(e, s.to);
                next.push_back(std::move(grown));
            }
        }
        if (next.size() > budget) {
            next.resize(budget);
            out.truncated = true;
        }
        alive = std::move(next);
    }
    for (auto& part : alive) out.lifts.emplace_back(m.source(), src.basepoint(), std::move(part.steps));
    return out;
}

struct UrlOptions {
    std::size_t budget = 64;  ///< cap on partial candidate lifts per trial
};

/// Finite instance of the unique-lifting criterion: the morphism is
/// 1-Lipschitz on probe pairs, and each trial path in the target has exactly
/// one lift from the source basepoint, of the same length.
inline CheckReport check_url_criterion(const GraphMorphism& m, const std::vector<RhoPath>& trials, UrlOptions options = {}) {
    CheckReport r{"url", 0, {}};
    const auto& src = *m.source();
    const auto& tgt = *m.target();
    const auto probes = probe_points(src);
    for (std::size_t i = 0; i < probes.size(); ++i) {
        for (std::size_t j = i + 1; j < probes.size(); ++j) {
            ++r.instances;
            const Rational before = graph_distance(src, probes[i], probes[j]);
            const Rational after = graph_distance(tgt, m.map_point(probes[i]), m.map_point(probes[j]));
            if (after > before) r.fail({src.describe(probes[i]), src.describe(probes[j])}, "not 1-Lipschitz");
        }
    }
    for (const auto& p : trials) {
        ++r.instances;
        const auto found = enumerate_lifts(m, p, options.budget);
        const auto expr = format_path(p);
        if (found.lifts.empty()) {
            r.fail({expr}, found.truncated ? "no lift within the candidate budget" : "no lift");
            continue;
        }
        if (found.lifts.size() > 1) {
            r.fail({expr, format_path(found.lifts[0]), format_path(found.lifts[1])}, "lift is not unique");
        }
        for (const auto& lift : found.lifts) {
            if (length(lift) != length(p)) {
                r.fail({expr, format_path(lift), to_string(length(lift)), to_string(length(p))}, "lift changes length");
                break;
            }
        }
    }
    return r;
}

} // namespace rtree_cover

#endif // RTREE_COVER_URL_LIFT_HPP
