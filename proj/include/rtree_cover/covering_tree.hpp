#ifndef RTREE_COVER_COVERING_TREE_HPP
#define RTREE_COVER_COVERING_TREE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rtree_cover/error.hpp"
#include "rtree_cover/metric_graph.hpp"
#include "rtree_cover/report.hpp"
#include "rtree_cover/rho_path.hpp"

namespace rtree_cover {

/// Point of the covering tree: a canonical path from the graph's basepoint.
/// The tree itself is never materialized; every operation works pointwise.
class TreePoint {
public:
    /// Requires an already canonical path anchored at the basepoint.
    explicit TreePoint(RhoPath path) : path_(std::move(path)) {
        if (path_.start() != path_.graph().basepoint()) throw path_error("tree point must start at the basepoint");
        if (!is_canonical(path_)) throw path_error("tree point path must be in normal form");
    }

    /// Normalizes an arbitrary path from the basepoint.
    static TreePoint of(const RhoPath& path) { return TreePoint(normalize(path)); }

    /// The constant path at the basepoint.
    static TreePoint base(const GraphRef& g) { return TreePoint(RhoPath::identity(g)); }

    const RhoPath& path() const { return path_; }
    const MetricGraph& graph() const { return path_.graph(); }
    const GraphRef& graph_ref() const { return path_.graph_ref(); }
    Rational depth() const { return length(path_); }

    friend bool operator==(const TreePoint&, const TreePoint&) = default;

private:
    RhoPath path_;
};

inline std::string format_point(const TreePoint& c) { return format_path(c.path()); }

inline void require_same_base(const TreePoint& a, const TreePoint& b) {
    if (!same_graph(a.path(), b.path()) || a.path().start() != b.path().start()) {
        throw path_error("tree points have different basepoints");
    }
}

/// L(c1) + L(c2) - 2 L(c1 ^ c2).
inline Rational dbar(const TreePoint& c1, const TreePoint& c2) {
    require_same_base(c1, c2);
    const Rational shared = length(common_prefix(c1.path(), c2.path()));
    return c1.depth() + c2.depth() - 2 * shared;
}

/// Gromov product at the basepoint, from distances alone.
inline Rational gromov_product(const TreePoint& c1, const TreePoint& c2) {
    const auto base = TreePoint::base(c1.graph_ref());
    return (dbar(base, c1) + dbar(base, c2) - dbar(c1, c2)) / 2;
}

/// Gromov product based at an arbitrary point w.
inline Rational gromov_product_at(const TreePoint& w, const TreePoint& c1, const TreePoint& c2) {
    return (dbar(w, c1) + dbar(w, c2) - dbar(c1, c2)) / 2;
}

/// Arclength-parameterized geodesic from c1 to c2: retract c1 to the branch
/// point, then extend along c2.
inline TreePoint geodesic_param(const TreePoint& c1, const TreePoint& c2, const Rational& s) {
    const Rational total = dbar(c1, c2);
    if (s < 0 || s > total) throw path_error("geodesic parameter " + to_string(s) + " outside [0, " + to_string(total) + "]");
    const Rational l1 = c1.depth();
    const Rational branch = length(common_prefix(c1.path(), c2.path()));
    if (s <= l1 - branch) return TreePoint(prefix(c1.path(), l1 - s));
    return TreePoint(prefix(c2.path(), s - l1 + 2 * branch));
}

/// Terminal point in the base graph.
inline GraphPoint endpoint_map(const TreePoint& c) { return c.path().end(); }

namespace detail {

template <typename F>
std::vector<std::vector<Rational>> pairwise(const std::vector<TreePoint>& pts, F&& f) {
    std::vector<std::vector<Rational>> m(pts.size(), std::vector<Rational>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i; j < pts.size(); ++j) {
            m[i][j] = f(pts[i], pts[j]);
            m[j][i] = m[i][j];
        }
    }
    return m;
}

inline std::vector<std::string> witness(std::initializer_list<const TreePoint*> pts) {
    std::vector<std::string> out;
    for (const auto* p : pts) out.push_back(format_point(*p));
    return out;
}

} // namespace detail

/// Nonnegativity, identity of indiscernibles, symmetry and the triangle
/// inequality of dbar over all pairs and triples.
inline CheckReport check_metric_axioms(const std::vector<TreePoint>& pts) {
    CheckReport r{"metric", 0, {}};
    std::vector<std::vector<Rational>> d(pts.size(), std::vector<Rational>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = 0; j < pts.size(); ++j) d[i][j] = dbar(pts[i], pts[j]);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            ++r.instances;
            if (d[i][j] < 0) r.fail(detail::witness({&pts[i], &pts[j]}), "negative distance");
            if (d[i][j] != d[j][i]) r.fail(detail::witness({&pts[i], &pts[j]}), "asymmetric");
            if ((d[i][j] == 0) != (pts[i] == pts[j])) r.fail(detail::witness({&pts[i], &pts[j]}), "identity of indiscernibles");
            for (std::size_t k = 0; k < pts.size(); ++k) {
                ++r.instances;
                if (d[i][j] > d[i][k] + d[k][j]) r.fail(detail::witness({&pts[i], &pts[j], &pts[k]}), "triangle inequality");
            }
        }
    }
    return r;
}

/// (c1,c2) >= min{(c1,c3), (c3,c2)} at the basepoint, for every ordered triple.
inline CheckReport check_zero_hyperbolic(const std::vector<TreePoint>& pts) {
    if (pts.size() < 3) throw error("zero-hyperbolicity check needs at least 3 points");
    CheckReport r{"hyperbolic", 0, {}};
    const auto gp = detail::pairwise(pts, [](const TreePoint& a, const TreePoint& b) { return gromov_product(a, b); });
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = 0; j < pts.size(); ++j) {
            for (std::size_t k = 0; k < pts.size(); ++k) {
                ++r.instances;
                if (gp[i][j] < min_of(gp[i][k], gp[k][j])) {
                    r.fail(detail::witness({&pts[i], &pts[j], &pts[k]}), "Gromov product inequality");
                }
            }
        }
    }
    return r;
}

/// Among the three pairings of any four points, the largest pair-sum is
/// attained at least twice.
inline CheckReport check_four_point(const std::vector<TreePoint>& pts) {
    if (pts.size() < 4) throw error("four-point check needs at least 4 points");
    CheckReport r{"four-point", 0, {}};
    const auto d = detail::pairwise(pts, [](const TreePoint& a, const TreePoint& b) { return dbar(a, b); });
    const std::size_t n = pts.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t e = c + 1; e < n; ++e) {
                    ++r.instances;
                    const Rational s1 = d[a][b] + d[c][e];
                    const Rational s2 = d[a][c] + d[b][e];
                    const Rational s3 = d[a][e] + d[b][c];
                    const Rational top = max_of(s1, max_of(s2, s3));
                    const int hits = (s1 == top) + (s2 == top) + (s3 == top);
                    if (hits < 2) r.fail(detail::witness({&pts[a], &pts[b], &pts[c], &pts[e]}), "four-point condition");
                }
    return r;
}

/// Point over `target` at distance d(phi(c), target) from c: c followed by a
/// shortest path in the graph.
inline TreePoint ball_witness(const TreePoint& c, const GraphPoint& target) {
    const auto geo = geodesic_path(c.graph_ref(), endpoint_map(c), target);
    return TreePoint(concat_cancel(c.path(), geo));
}

/// Default probe set: every vertex, plus the quarter points of every edge.
inline std::vector<GraphPoint> probe_points(const MetricGraph& g) {
    std::vector<GraphPoint> out;
    for (std::size_t v = 0; v < g.vertex_count(); ++v) out.push_back(GraphPoint::at_vertex(v));
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        for (long j = 1; j <= 3; ++j) out.push_back(GraphPoint::inside_edge(e, g.edge(e).length * make_rational(j, 4)));
    }
    return out;
}

/// The endpoint map is 1-Lipschitz on sample pairs and maps every open ball
/// B(c, r) onto the open ball B(phi(c), r), witnessed by exact geodesics.
inline CheckReport check_weak_submetry(const MetricGraph& g, const std::vector<TreePoint>& samples,
                                       const std::vector<Rational>& radii,
                                       std::optional<std::vector<GraphPoint>> targets = std::nullopt) {
    if (samples.empty() || radii.empty()) throw error("weak submetry check needs samples and radii");
    CheckReport r{"submetry", 0, {}};
    for (const auto& c : samples) {
        if (!c.graph().same_space(g)) throw graph_error("sample lives in a different graph");
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = 0; j < samples.size(); ++j) {
            ++r.instances;
            if (graph_distance(g, endpoint_map(samples[i]), endpoint_map(samples[j])) > dbar(samples[i], samples[j])) {
                r.fail(detail::witness({&samples[i], &samples[j]}), "endpoint map increases distance");
            }
        }
    }
    const auto probes = targets ? *targets : probe_points(g);
    for (const auto& c : samples) {
        const auto x = endpoint_map(c);
        for (const auto& y : probes) {
            const Rational dist = graph_distance(g, x, y);
            for (const auto& radius : radii) {
                if (dist >= radius) continue;
                ++r.instances;
                const auto w = ball_witness(c, y);
                if (endpoint_map(w) != y || dbar(c, w) != dist) {
                    r.fail({format_point(c), g.describe(y), to_string(radius)}, "no ball witness");
                }
            }
        }
    }
    return r;
}

/// Sampled geodesics between distinct points of one fibre always leave the
/// fibre: no nondegenerate segment lies over a single point.
inline CheckReport check_light_map(const std::vector<std::pair<TreePoint, TreePoint>>& fibre_pairs) {
    CheckReport r{"light-map", 0, {}};
    for (const auto& [a, b] : fibre_pairs) {
        if (a == b || endpoint_map(a) != endpoint_map(b)) continue;
        ++r.instances;
        const Rational total = dbar(a, b);
        bool leaves = false;
        for (long k = 1; k < 16 && !leaves; ++k) {
            leaves = endpoint_map(geodesic_param(a, b, total * make_rational(k, 16))) != endpoint_map(a);
        }
        if (!leaves) r.fail(detail::witness({&a, &b}), "geodesic stays in one fibre");
    }
    return r;
}

/// Germs of the covering tree at c, one per direction at phi(c).
struct ValencyReport {
    std::size_t directions = 0;       ///< |directions_at(phi(c))|
    std::vector<TreePoint> representatives;
    std::optional<std::size_t> backward;  ///< representative that retracts along c, if c is not the basepoint
    bool separated = false;               ///< distinct germs: pairwise Gromov product at c is zero

    std::size_t germs() const { return representatives.size(); }
    bool passed() const { return separated && germs() == directions; }
};

inline ValencyReport valency_check(const TreePoint& c) {
    const auto& g = c.graph();
    const auto x = endpoint_map(c);
    const auto dirs = directions_at(g, x);
    Rational eps = g.edge(0).length;
    for (const auto& e : g.edges()) eps = min_of(eps, e.length);
    if (!x.is_vertex()) eps = min_of(eps, min_of(x.offset(), Rational(g.edge(x.edge()).length - x.offset())));
    eps /= 2;

    ValencyReport out;
    out.directions = dirs.size();
    for (const auto& d : dirs) {
        const Rational& len = g.edge(d.edge).length;
        const Rational from = x.is_vertex() ? (d.sign == Sign::plus ? Rational(0) : len) : x.offset();
        const Rational to = d.sign == Sign::plus ? Rational(from + eps) : Rational(from - eps);
        const RhoPath step(c.graph_ref(), x, {Step{d.edge, d.sign, from, to}});
        TreePoint rep(concat_cancel(c.path(), step));
        bool duplicate = false;
        for (const auto& seen : out.representatives) duplicate = duplicate || seen == rep;
        if (duplicate) continue;
        if (rep.depth() < c.depth()) out.backward = out.representatives.size();
        out.representatives.push_back(std::move(rep));
    }
    out.separated = true;
    const auto& reps = out.representatives;
    for (std::size_t i = 0; i < reps.size(); ++i) {
        if (dbar(c, reps[i]) != eps) out.separated = false;
        for (std::size_t j = i + 1; j < reps.size(); ++j) {
            if (gromov_product_at(c, reps[i], reps[j]) != 0) out.separated = false;
        }
    }
    return out;
}

} // namespace rtree_cover

#endif // RTREE_COVER_COVERING_TREE_HPP
