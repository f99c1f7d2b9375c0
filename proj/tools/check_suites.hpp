// Randomized verification suites behind `rtree-cover check`.
#ifndef RTREE_COVER_TOOLS_CHECK_SUITES_HPP
#define RTREE_COVER_TOOLS_CHECK_SUITES_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtree_cover/rtree_cover.hpp"

namespace rtree_cover::cli {

struct SuiteOptions {
    std::size_t n = 100;
    std::uint64_t seed = 0;
    std::size_t budget = 64;
};

namespace suites {

inline std::vector<TreePoint> points(PathSampler& s, std::size_t k) {
    std::vector<TreePoint> out;
    for (std::size_t i = 0; i < k; ++i) out.emplace_back(s.random_tree_path());
    return out;
}

inline CheckReport metric(const GraphRef& g, const SuiteOptions& o) {
    PathSampler s(g, o.seed);
    CheckReport r{"metric", 0, {}};
    for (std::size_t i = 0; i < o.n; ++i) r.absorb(check_metric_axioms(points(s, 4)));
    return r;
}

inline CheckReport hyperbolic(const GraphRef& g, const SuiteOptions& o) {
    PathSampler s(g, o.seed);
    CheckReport r{"hyperbolic", 0, {}};
    for (std::size_t i = 0; i < o.n; ++i) r.absorb(check_zero_hyperbolic(points(s, 3)));
    return r;
}

inline CheckReport four_point(const GraphRef& g, const SuiteOptions& o) {
    PathSampler s(g, o.seed);
    CheckReport r{"four-point", 0, {}};
    for (std::size_t i = 0; i < o.n; ++i) r.absorb(check_four_point(points(s, 4)));
    return r;
}

/// Group laws, the action (isometric, free, compatible) and orbits = fibres.
inline CheckReport group(const GraphRef& g, const SuiteOptions& o) {
    PathSampler s(g, o.seed);
    CheckReport r{"group", 0, {}};
    const auto id = LoopElement::identity(g);
    for (std::size_t i = 0; i < o.n; ++i) {
        const LoopElement a(s.random_loop()), b(s.random_loop()), c(s.random_loop());
        const TreePoint p(s.random_tree_path()), q(s.random_tree_path());
        const std::vector<std::string> w{format_loop(a), format_loop(b), format_loop(c)};
        r.instances += 8;
        if (star(star(a, b), c) != star(a, star(b, c))) r.fail(w, "associativity");
        if (star(a, id) != a || star(id, a) != a) r.fail(w, "identity");
        if (star(a, invert(a)) != id || star(invert(a), a) != id) r.fail(w, "inverse");
        if (dbar(act(a, p), act(a, q)) != dbar(p, q)) r.fail({format_loop(a), format_point(p), format_point(q)}, "action is not isometric");
        if (act(a, p) == p && !a.is_identity()) r.fail({format_loop(a), format_point(p)}, "action is not free");
        if (act(a, act(b, p)) != act(star(a, b), p)) r.fail({format_loop(a), format_loop(b), format_point(p)}, "action is not compatible");
        const auto moved = act(b, p);
        if (fiber_transporter(p, moved) != b) r.fail({format_point(p), format_point(moved)}, "transporter differs from the acting loop");
        const bool same_fibre = endpoint_map(p) == endpoint_map(q);
        bool transported = false;
        try {
            transported = act(fiber_transporter(p, q), p) == q;
        } catch (const group_error&) {
        }
        if (same_fibre != transported) r.fail({format_point(p), format_point(q)}, "orbit and fibre disagree");
    }
    return r;
}

/// Length-function axioms on tables of at most 30 elements, plus the power
/// length formula for small exponents.
inline CheckReport lyndon(const GraphRef& g, const SuiteOptions& o) {
    PathSampler s(g, o.seed);
    CheckReport r{"lyndon", 0, {}};
    std::size_t left = o.n;
    while (left > 0) {
        const std::size_t k = left < 29 ? left : 29;
        std::vector<LoopElement> elems{LoopElement::identity(g)};
        for (std::size_t i = 0; i < k; ++i) elems.emplace_back(s.random_loop());
        r.absorb(check_lyndon_axioms(LyndonTable::from_elements(elems)));
        for (std::size_t i = 1; i < elems.size(); ++i) {
            if (elems[i].is_identity()) continue;
            for (long e : {-3L, -2L, 2L, 3L}) {
                ++r.instances;
                const auto p = power_length(elems[i], e);
                if (!p.agree()) r.fail({format_loop(elems[i]), std::to_string(e)}, "power length disagrees with the decomposition formula");
            }
        }
        left -= k;
    }
    return r;
}

inline CheckReport submetry(const GraphRef& g, const SuiteOptions& o) {
    PathSampler s(g, o.seed);
    CheckReport r{"submetry", 0, {}};
    const std::vector<Rational> radii{make_rational(1, 4), make_rational(1), make_rational(4)};
    std::size_t left = o.n;
    while (left > 0) {
        const std::size_t k = left < 10 ? left : 10;
        r.absorb(check_weak_submetry(*g, points(s, k), radii));
        left -= k;
    }
    std::vector<std::pair<TreePoint, TreePoint>> fibre_pairs;
    for (std::size_t i = 0; i < o.n; ++i) {
        const TreePoint c(s.random_tree_path());
        fibre_pairs.emplace_back(c, act(LoopElement(s.random_loop()), c));
    }
    r.absorb(check_light_map(fibre_pairs));
    return r;
}

/// Lifts of random (possibly backtracking) paths: projection, 1-Lipschitz
/// bound, rejection of a perturbed lift; identity morphism satisfies the
/// unique-lifting criterion on the same paths.
inline CheckReport lift(const GraphRef& g, const SuiteOptions& o) {
    PathSampler s(g, o.seed);
    CheckReport r{"lift", 0, {}};
    std::vector<RhoPath> trials;
    for (std::size_t i = 0; i < o.n; ++i) {
        const auto c = s.random_path(true, true);
        trials.push_back(c);
        const auto lifted = lift_path(c);
        const auto expr = format_path(c);
        for (std::size_t a = 0; a < lifted.params.size(); ++a) {
            ++r.instances;
            if (endpoint_map(lifted.points[a]) != point_at(c, lifted.params[a])) r.fail({expr, to_string(lifted.params[a])}, "lift does not project onto the path");
            for (std::size_t b = a + 1; b < lifted.params.size(); ++b) {
                ++r.instances;
                if (dbar(lifted.points[a], lifted.points[b]) > lifted.params[b] - lifted.params[a]) {
                    r.fail({expr, to_string(lifted.params[a]), to_string(lifted.params[b])}, "lift is not 1-Lipschitz");
                }
            }
        }
        ++r.instances;
        if (check_lift_uniqueness(c, lifted).status != LiftStatus::agree) r.fail({expr}, "lift disagrees with itself");
        const auto k = lifted.params.size() - 1;
        if (k > 0) {
            auto other = lifted;
            other.points[k] = act(LoopElement(s.random_nontrivial_loop()), other.points[k]);
            ++r.instances;
            if (check_lift_uniqueness(c, other).status != LiftStatus::disagree) r.fail({expr}, "perturbed lift was not told apart");
        }
    }
    r.absorb(check_url_criterion(GraphMorphism::identity(g), trials, UrlOptions{o.budget}));
    return r;
}

inline CheckReport minimality(const GraphRef& g, const SuiteOptions& o) {
    PathSampler s(g, o.seed);
    return check_minimality_span(points(s, o.n));
}

using Suite = std::function<CheckReport(const GraphRef&, const SuiteOptions&)>;

inline const std::vector<std::pair<std::string, Suite>>& registry() {
    static const std::vector<std::pair<std::string, Suite>> all{
        {"metric", metric},     {"hyperbolic", hyperbolic}, {"four-point", four_point}, {"group", group},
        {"lyndon", lyndon},     {"submetry", submetry},     {"lift", lift},             {"minimality", minimality}};
    return all;
}

} // namespace suites

/// Runs one named suite or "all"; each suite gets its own seed derived from
/// the run seed and the suite's position, so results do not depend on which
/// other suites ran.
inline std::vector<CheckReport> run_suites(const GraphRef& g, const std::string& name, const SuiteOptions& o) {
    std::vector<CheckReport> out;
    const auto& reg = suites::registry();
    for (std::size_t i = 0; i < reg.size(); ++i) {
        if (name != "all" && name != reg[i].first) continue;
        SuiteOptions local = o;
        local.seed = o.seed * 1000003u + i;
        out.push_back(reg[i].second(g, local));
    }
    if (out.empty()) throw error("unknown suite '" + name + "'");
    return out;
}

/// Unique-lifting check for a morphism, trials pushed forward from random
/// source paths.
inline CheckReport url_suite(const GraphMorphism& m, const SuiteOptions& o) {
    PathSampler s(m.source(), o.seed);
    std::vector<RhoPath> trials;
    for (std::size_t i = 0; i < o.n; ++i) trials.push_back(m.push_forward(s.random_path(true, true)));
    return check_url_criterion(m, trials, UrlOptions{o.budget});
}

} // namespace rtree_cover::cli

#endif // RTREE_COVER_TOOLS_CHECK_SUITES_HPP
