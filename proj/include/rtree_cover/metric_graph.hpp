#ifndef RTREE_COVER_METRIC_GRAPH_HPP
#define RTREE_COVER_METRIC_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rtree_cover/error.hpp"
#include "rtree_cover/rational.hpp"

namespace rtree_cover {

/// Direction of travel along an edge relative to its intrinsic orientation.
/// `plus` runs from the edge's `u` end to its `v` end.
enum class Sign { plus, minus };

inline Sign flip(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

struct Edge {
    std::string id;
    std::size_t u = 0;
    std::size_t v = 0;
    Rational length;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// A point of a metric graph: either a vertex, or a point strictly inside an
/// edge. Endpoint offsets are always represented by the vertex, so equal
/// points compare equal.
class GraphPoint {
public:
    GraphPoint() = default;

    static GraphPoint at_vertex(std::size_t vertex) {
        GraphPoint p;
        p.index_ = vertex;
        return p;
    }

    /// No range check here; MetricGraph::point_on_edge canonicalizes endpoints.
    static GraphPoint inside_edge(std::size_t edge, Rational offset) {
        GraphPoint p;
        p.index_ = edge;
        p.offset_ = std::move(offset);
        p.on_edge_ = true;
        return p;
    }

    bool is_vertex() const { return !on_edge_; }
    std::size_t vertex() const { return index_; }
    std::size_t edge() const { return index_; }
    const Rational& offset() const { return offset_; }

    friend bool operator==(const GraphPoint& a, const GraphPoint& b) {
        return a.on_edge_ == b.on_edge_ && a.index_ == b.index_ && (!a.on_edge_ || a.offset_ == b.offset_);
    }

private:
    std::size_t index_ = 0;
    Rational offset_;
    bool on_edge_ = false;
};

/// Germ of a path leaving a point: the edge it runs along and its sign.
/// At a vertex this is an edge-end incidence; a self-loop contributes both signs.
struct Direction {
    std::size_t edge = 0;
    Sign sign = Sign::plus;

    friend bool operator==(const Direction&, const Direction&) = default;
    friend auto operator<=>(const Direction& a, const Direction& b) {
        if (a.edge != b.edge) return a.edge <=> b.edge;
        return static_cast<int>(a.sign) <=> static_cast<int>(b.sign);
    }
};

/// Finite connected graph with positive rational edge lengths and a basepoint.
/// Immutable once constructed.
class MetricGraph {
public:
    MetricGraph(std::vector<std::string> vertices, std::vector<Edge> edges, GraphPoint basepoint)
        : vertices_(std::move(vertices)), edges_(std::move(edges)), basepoint_(std::move(basepoint)) {
        validate();
        adjacency_.resize(vertices_.size());
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            adjacency_[edges_[e].u].push_back({e, Sign::plus});
            adjacency_[edges_[e].v].push_back({e, Sign::minus});
        }
        check_connected();
    }

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::string& vertex_name(std::size_t v) const { return vertices_.at(v); }
    const Edge& edge(std::size_t e) const { return edges_.at(e); }
    const GraphPoint& basepoint() const { return basepoint_; }

    std::optional<std::size_t> find_vertex(const std::string& name) const {
        auto it = vertex_index_.find(name);
        if (it == vertex_index_.end()) return std::nullopt;
        return it->second;
    }

    std::optional<std::size_t> find_edge(const std::string& id) const {
        auto it = edge_index_.find(id);
        if (it == edge_index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t vertex_index(const std::string& name) const {
        if (auto v = find_vertex(name)) return *v;
        throw graph_error("unknown vertex '" + name + "'");
    }

    std::size_t edge_index(const std::string& id) const {
        if (auto e = find_edge(id)) return *e;
        throw graph_error("unknown edge '" + id + "'");
    }

    /// Edge-ends at a vertex, as departing directions.
    const std::vector<Direction>& departures(std::size_t vertex) const { return adjacency_.at(vertex); }

    std::size_t degree(std::size_t vertex) const { return adjacency_.at(vertex).size(); }

    /// Canonical point at `offset` along edge `e`, offset in [0, length].
    GraphPoint point_on_edge(std::size_t e, const Rational& offset) const {
        const Edge& ed = edge(e);
        if (offset < 0 || offset > ed.length) {
            throw graph_error("offset " + to_string(offset) + " outside edge '" + ed.id + "'");
        }
        if (offset == 0) return GraphPoint::at_vertex(ed.u);
        if (offset == ed.length) return GraphPoint::at_vertex(ed.v);
        return GraphPoint::inside_edge(e, offset);
    }

    bool contains(const GraphPoint& p) const {
        if (p.is_vertex()) return p.vertex() < vertices_.size();
        return p.edge() < edges_.size() && p.offset() > 0 && p.offset() < edges_[p.edge()].length;
    }

    void require(const GraphPoint& p) const {
        if (!contains(p)) throw graph_error("point not on graph");
    }

    /// Same vertices and edges; basepoints may differ.
    bool same_space(const MetricGraph& other) const {
        return vertices_ == other.vertices_ && edges_ == other.edges_;
    }

    MetricGraph with_basepoint(GraphPoint p) const {
        require(p);
        return MetricGraph(vertices_, edges_, std::move(p));
    }

    std::string describe(const GraphPoint& p) const {
        if (p.is_vertex()) return vertex_name(p.vertex());
        return edge(p.edge()).id + "@" + to_string(p.offset());
    }

    friend bool operator==(const MetricGraph& a, const MetricGraph& b) {
        return a.same_space(b) && a.basepoint_ == b.basepoint_;
    }

private:
    void validate() {
        if (vertices_.empty()) throw graph_error("graph has no vertices");
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            if (!vertex_index_.emplace(vertices_[i], i).second) {
                throw graph_error("duplicate vertex '" + vertices_[i] + "'");
            }
        }
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const Edge& ed = edges_[e];
            if (ed.id.empty()) throw graph_error("empty edge id");
            if (ed.id.find_first_of(" \t\r\n+-[]:") != std::string::npos) {
                throw graph_error("edge id '" + ed.id + "' contains a reserved character");
            }
            if (!edge_index_.emplace(ed.id, e).second) throw graph_error("duplicate edge '" + ed.id + "'");
            if (ed.u >= vertices_.size() || ed.v >= vertices_.size()) {
                throw graph_error("edge '" + ed.id + "' has an endpoint outside the vertex set");
            }
            if (ed.length <= 0) throw graph_error("edge '" + ed.id + "' has nonpositive length");
        }
        if (!contains(basepoint_)) throw graph_error("basepoint not on graph");
    }

    void check_connected() const {
        std::vector<bool> seen(vertices_.size(), false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (const auto& d : adjacency_[v]) {
                const auto w = d.sign == Sign::plus ? edges_[d.edge].v : edges_[d.edge].u;
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
            throw graph_error("graph is not connected");
        }
    }

    std::vector<std::string> vertices_;
    std::vector<Edge> edges_;
    GraphPoint basepoint_;
    std::map<std::string, std::size_t> vertex_index_;
    std::map<std::string, std::size_t> edge_index_;
    std::vector<std::vector<Direction>> adjacency_;
};

using GraphRef = std::shared_ptr<const MetricGraph>;

inline GraphRef share(MetricGraph g) { return std::make_shared<const MetricGraph>(std::move(g)); }

/// Vertex at which a step along `d` from a vertex arrives.
inline std::size_t far_end(const MetricGraph& g, const Direction& d) {
    const Edge& e = g.edge(d.edge);
    return d.sign == Sign::plus ? e.v : e.u;
}

// ---------------------------------------------------------------------------
// Constructors for the standard spaces

/// Bouquet of circles at a single vertex "*", one self-loop per label.
inline MetricGraph build_rose(const std::vector<std::string>& labels, const std::vector<Rational>& lengths) {
    if (labels.empty()) throw graph_error("rose needs at least one circle");
    if (labels.size() != lengths.size()) throw graph_error("labels and lengths differ in size");
    std::vector<Edge> edges;
    edges.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        edges.push_back({labels[i], 0, 0, lengths[i]});
    }
    return MetricGraph({"*"}, std::move(edges), GraphPoint::at_vertex(0));
}

/// Rose of n unit circles labelled a, b, c, ... (a1, a2, ... beyond 26).
inline MetricGraph build_unit_rose(std::size_t n) {
    std::vector<std::string> labels;
    std::vector<Rational> lengths;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(n <= 26 ? std::string(1, static_cast<char>('a' + i)) : "a" + std::to_string(i + 1));
        lengths.emplace_back(1);
    }
    return build_rose(labels, lengths);
}

/// Truncated Hawaiian earring: circles C1..Cn, circle i of length 1/i.
inline MetricGraph build_hawaiian_truncation(std::size_t n) {
    if (n == 0) throw graph_error("Hawaiian truncation needs n >= 1");
    std::vector<std::string> labels;
    std::vector<Rational> lengths;
    for (std::size_t i = 1; i <= n; ++i) {
        labels.push_back("C" + std::to_string(i));
        lengths.push_back(make_rational(1, static_cast<long>(i)));
    }
    return build_rose(labels, lengths);
}

/// Result of cutting an edge at an interior point.
struct Subdivision {
    MetricGraph graph;
    std::size_t vertex = 0;   ///< the new vertex, or the existing one when nothing was cut
    std::optional<std::size_t> cut_edge;  ///< index of the original edge, if one was cut
    std::size_t second_half = 0;          ///< index of the edge carrying (offset, length]
    Rational cut_offset;

    /// Image of a point of the original graph.
    GraphPoint map_point(const GraphPoint& p) const {
        if (!cut_edge || p.is_vertex() || p.edge() != *cut_edge) return p;
        if (p.offset() == cut_offset) return GraphPoint::at_vertex(vertex);
        if (p.offset() < cut_offset) return GraphPoint::inside_edge(*cut_edge, p.offset());
        return GraphPoint::inside_edge(second_half, p.offset() - cut_offset);
    }
};

namespace detail {

inline std::string fresh_name(const std::string& base, const std::function<bool(const std::string&)>& taken) {
    if (!taken(base)) return base;
    for (std::size_t i = 2;; ++i) {
        auto candidate = base + "." + std::to_string(i);
        if (!taken(candidate)) return candidate;
    }
}

} // namespace detail

/// Cuts the edge containing `p` so that `p` becomes a vertex. The edge keeps
/// its index for the part [0, offset]; the remainder is appended as a new edge.
inline Subdivision subdivide_at(const MetricGraph& g, const GraphPoint& p) {
    g.require(p);
    if (p.is_vertex()) return Subdivision{g, p.vertex(), std::nullopt, 0, Rational(0)};
    auto vertices = g.vertices();
    auto edges = g.edges();
    const Edge original = edges[p.edge()];
    const auto vertex_taken = [&](const std::string& n) { return std::find(vertices.begin(), vertices.end(), n) != vertices.end(); };
    const auto edge_taken = [&](const std::string& n) {
        return std::any_of(edges.begin(), edges.end(), [&](const Edge& e) { return e.id == n; });
    };
    const auto w = vertices.size();
    vertices.push_back(detail::fresh_name(original.id + "@" + to_string(p.offset()), vertex_taken));
    Edge second{"", w, original.v, original.length - p.offset()};
    second.id = detail::fresh_name(original.id + "~", edge_taken);
    edges[p.edge()].v = w;
    edges[p.edge()].length = p.offset();
    edges.push_back(second);
    const auto second_index = edges.size() - 1;

    Subdivision out{MetricGraph(vertices, edges, GraphPoint::at_vertex(0)), w, p.edge(), second_index, p.offset()};
    auto base = out.map_point(g.basepoint());
    out.graph = out.graph.with_basepoint(base);
    return out;
}

/// One-point union identifying the two basepoints. Identifiers are kept when
/// they do not collide; otherwise every identifier of a factor is prefixed
/// with "1." or "2.". The result's basepoint is the wedge vertex.
inline MetricGraph wedge(const MetricGraph& g1, const MetricGraph& g2) {
    const auto s1 = subdivide_at(g1, g1.basepoint());
    const auto s2 = subdivide_at(g2, g2.basepoint());
    const MetricGraph& a = s1.graph;
    const MetricGraph& b = s2.graph;
    const auto wa = s1.vertex;
    const auto wb = s2.vertex;

    bool edge_clash = false;
    for (const auto& e : b.edges()) edge_clash = edge_clash || a.find_edge(e.id).has_value();
    bool vertex_clash = false;
    for (std::size_t v = 0; v < b.vertex_count(); ++v) {
        if (v != wb && a.find_vertex(b.vertex_name(v))) vertex_clash = true;
    }

    std::vector<std::string> vertices;
    std::vector<std::size_t> map_a(a.vertex_count()), map_b(b.vertex_count());
    for (std::size_t v = 0; v < a.vertex_count(); ++v) {
        map_a[v] = vertices.size();
        vertices.push_back(vertex_clash && v != wa ? "1." + a.vertex_name(v) : a.vertex_name(v));
    }
    for (std::size_t v = 0; v < b.vertex_count(); ++v) {
        if (v == wb) {
            map_b[v] = map_a[wa];
            continue;
        }
        map_b[v] = vertices.size();
        vertices.push_back(vertex_clash ? "2." + b.vertex_name(v) : b.vertex_name(v));
    }
    std::vector<Edge> edges;
    for (const auto& e : a.edges()) edges.push_back({edge_clash ? "1." + e.id : e.id, map_a[e.u], map_a[e.v], e.length});
    for (const auto& e : b.edges()) edges.push_back({edge_clash ? "2." + e.id : e.id, map_b[e.u], map_b[e.v], e.length});
    return MetricGraph(std::move(vertices), std::move(edges), GraphPoint::at_vertex(map_a[wa]));
}

/// Attaches a fresh segment of length `length` at `p`; the far tip of the
/// segment becomes the new basepoint.
inline MetricGraph attach_segment(const MetricGraph& g, const GraphPoint& p, const Rational& length,
                                  const std::string& edge_id = "s", const std::string& tip_name = "w") {
    if (length <= 0) throw graph_error("segment length must be positive");
    const auto cut = subdivide_at(g, p);
    auto vertices = cut.graph.vertices();
    auto edges = cut.graph.edges();
    const auto tip = vertices.size();
    vertices.push_back(detail::fresh_name(tip_name, [&](const std::string& n) { return cut.graph.find_vertex(n).has_value(); }));
    edges.push_back({detail::fresh_name(edge_id, [&](const std::string& n) { return cut.graph.find_edge(n).has_value(); }),
                     cut.vertex, tip, length});
    return MetricGraph(std::move(vertices), std::move(edges), GraphPoint::at_vertex(tip));
}

// ---------------------------------------------------------------------------
// Length metric

/// Single-source shortest distances to every vertex, with the departure used
/// on the last hop. `source_steps` seeds the search.
struct VertexDistances {
    std::vector<std::optional<Rational>> dist;
    /// For each reached vertex: how it was entered. nullopt for seeds reached
    /// by an initial partial step.
    std::vector<std::optional<Direction>> via;
    std::vector<bool> seeded;
};

namespace detail {

inline VertexDistances dijkstra(const MetricGraph& g, const GraphPoint& source) {
    const auto n = g.vertex_count();
    VertexDistances out{std::vector<std::optional<Rational>>(n), std::vector<std::optional<Direction>>(n),
                        std::vector<bool>(n, false)};
    using Item = std::pair<Rational, std::size_t>;
    auto cmp = [](const Item& a, const Item& b) { return a.first > b.first; };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> queue(cmp);

    const auto relax_seed = [&](std::size_t v, const Rational& d) {
        if (!out.dist[v] || d < *out.dist[v]) {
            out.dist[v] = d;
            out.seeded[v] = true;
            queue.emplace(d, v);
        }
    };
    if (source.is_vertex()) {
        relax_seed(source.vertex(), Rational(0));
    } else {
        const Edge& e = g.edge(source.edge());
        relax_seed(e.u, source.offset());
        relax_seed(e.v, e.length - source.offset());
    }
    std::vector<bool> done(n, false);
    while (!queue.empty()) {
        auto [d, v] = queue.top();
        queue.pop();
        if (done[v] || d != *out.dist[v]) continue;
        done[v] = true;
        for (const auto& dir : g.departures(v)) {
            const auto w = far_end(g, dir);
            Rational nd = d + g.edge(dir.edge).length;
            if (!out.dist[w] || nd < *out.dist[w]) {
                out.dist[w] = nd;
                out.via[w] = dir;
                out.seeded[w] = false;
                queue.emplace(std::move(nd), w);
            }
        }
    }
    return out;
}

} // namespace detail

/// Exact length of a shortest path between two points.
inline Rational graph_distance(const MetricGraph& g, const GraphPoint& p, const GraphPoint& q) {
    g.require(p);
    g.require(q);
    if (p == q) return Rational(0);
    const auto table = detail::dijkstra(g, p);
    if (q.is_vertex()) return *table.dist[q.vertex()];
    const Edge& e = g.edge(q.edge());
    Rational best = *table.dist[e.u] + q.offset();
    Rational other = *table.dist[e.v] + (e.length - q.offset());
    if (other < best) best = other;
    if (!p.is_vertex() && p.edge() == q.edge()) {
        Rational direct = abs_diff(p.offset(), q.offset());
        if (direct < best) best = direct;
    }
    return best;
}

/// Germs of paths leaving `p`: one per edge-end at a vertex, two inside an edge.
inline std::vector<Direction> directions_at(const MetricGraph& g, const GraphPoint& p) {
    g.require(p);
    if (p.is_vertex()) {
        auto dirs = g.departures(p.vertex());
        std::sort(dirs.begin(), dirs.end());
        return dirs;
    }
    return {{p.edge(), Sign::plus}, {p.edge(), Sign::minus}};
}

} // namespace rtree_cover

#endif // RTREE_COVER_METRIC_GRAPH_HPP
