#ifndef RTREE_COVER_RANDOM_PATHS_HPP
#define RTREE_COVER_RANDOM_PATHS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "rtree_cover/metric_graph.hpp"
#include "rtree_cover/rho_path.hpp"

namespace rtree_cover {

/// Seeded generator of random paths: uniform over edge-ends with immediate
/// backtracking excluded, geometric number of steps. Deterministic for a seed.
class PathSampler {
public:
    PathSampler(GraphRef g, std::uint64_t seed, double mean_steps = 4.0)
        : graph_(std::move(g)), rng_(seed), stop_(1.0 / (1.0 + mean_steps)) {}

    std::mt19937_64& rng() { return rng_; }
    const GraphRef& graph() const { return graph_; }

    std::size_t uniform(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

    std::size_t geometric_length() { return static_cast<std::size_t>(std::geometric_distribution<int>(stop_)(rng_)); }

    /// Fraction k/d with 2 <= d <= 6 and 0 < k < d.
    Rational fraction() {
        const long d = static_cast<long>(2 + uniform(5));
        const long k = static_cast<long>(1 + uniform(static_cast<std::size_t>(d - 1)));
        return make_rational(k, d);
    }

    /// Walk of `count` full traversals from a vertex. With `allow_backtrack`
    /// every edge-end is equally likely, otherwise the reverse of the previous
    /// step is excluded (the walk stops early at a dead end).
    std::vector<Step> walk_from_vertex(std::size_t vertex, std::size_t count, std::optional<Step> previous,
                                       bool allow_backtrack = false) {
        std::vector<Step> steps;
        auto at = vertex;
        for (std::size_t i = 0; i < count; ++i) {
            std::vector<Direction> options;
            for (const auto& d : graph_->departures(at)) {
                const Step s = full_step(*graph_, d.edge, d.sign);
                if (!allow_backtrack && previous && detail::is_reversal(*previous, s)) continue;
                options.push_back(d);
            }
            if (options.empty()) break;
            const auto d = options[uniform(options.size())];
            const Step s = full_step(*graph_, d.edge, d.sign);
            steps.push_back(s);
            previous = s;
            at = far_end(*graph_, d);
        }
        return steps;
    }

    /// Random path from the basepoint, optionally ending partway along an edge.
    /// With backtracking allowed the result is generally not weakly normal.
    RhoPath random_path(bool allow_backtrack = false, bool partial_tail = true) {
        const auto& g = *graph_;
        const GraphPoint& base = g.basepoint();
        std::vector<Step> steps;
        std::size_t vertex = 0;
        std::optional<Step> previous;
        const std::size_t count = geometric_length();
        if (base.is_vertex()) {
            vertex = base.vertex();
        } else {
            if (count == 0 && partial_tail) return partial_from_interior(base);
            const Edge& e = g.edge(base.edge());
            const bool plus = uniform(2) == 0;
            Step first = plus ? Step{base.edge(), Sign::plus, base.offset(), e.length}
                              : Step{base.edge(), Sign::minus, base.offset(), Rational(0)};
            vertex = plus ? e.v : e.u;
            steps.push_back(first);
            previous = first;
        }
        auto more = walk_from_vertex(vertex, count, previous, allow_backtrack);
        steps.insert(steps.end(), more.begin(), more.end());
        if (!steps.empty()) {
            previous = steps.back();
            vertex = g.point_on_edge(steps.back().edge, steps.back().to).vertex();
        }
        if (partial_tail && uniform(2) == 0) {
            std::vector<Direction> options;
            for (const auto& d : g.departures(vertex)) {
                const Step s = full_step(g, d.edge, d.sign);
                if (!allow_backtrack && previous && detail::is_reversal(*previous, s)) continue;
                options.push_back(d);
            }
            if (!options.empty()) {
                const auto d = options[uniform(options.size())];
                const Rational& len = g.edge(d.edge).length;
                const Rational part = len * fraction();
                steps.push_back(d.sign == Sign::plus ? Step{d.edge, d.sign, Rational(0), part}
                                                     : Step{d.edge, d.sign, len, Rational(len - part)});
            }
        }
        return RhoPath(graph_, base, std::move(steps));
    }

    /// Canonical path from the basepoint: a point of the covering tree.
    RhoPath random_tree_path() { return normalize(random_path(false, true)); }

    /// Canonical loop at the basepoint (possibly the identity).
    RhoPath random_loop() {
        auto c = random_path(false, false);
        auto back = geodesic_path(graph_, c.end(), graph_->basepoint());
        return concat_cancel(normalize(c), back);
    }

    /// Canonical loop at the basepoint other than the identity.
    RhoPath random_nontrivial_loop() {
        for (;;) {
            auto l = random_loop();
            if (!l.is_constant()) return l;
        }
    }

private:
    RhoPath partial_from_interior(const GraphPoint& p) {
        const Edge& e = graph_->edge(p.edge());
        const bool plus = uniform(2) == 0;
        const Rational room = plus ? Rational(e.length - p.offset()) : p.offset();
        const Rational part = room * fraction();
        Step s = plus ? Step{p.edge(), Sign::plus, p.offset(), Rational(p.offset() + part)}
                      : Step{p.edge(), Sign::minus, p.offset(), Rational(p.offset() - part)};
        return RhoPath(graph_, p, {s});
    }

    GraphRef graph_;
    std::mt19937_64 rng_;
    double stop_;
};

} // namespace rtree_cover

#endif // RTREE_COVER_RANDOM_PATHS_HPP
