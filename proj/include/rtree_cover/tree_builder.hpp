#ifndef RTREE_COVER_TREE_BUILDER_HPP
#define RTREE_COVER_TREE_BUILDER_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtree_cover/covering_tree.hpp"
#include "rtree_cover/error.hpp"
#include "rtree_cover/loop_group.hpp"
#include "rtree_cover/report.hpp"

namespace rtree_cover {

/// Raised when pairwise distances admit no weighted tree. The witness names
/// the offending elements (four for a four-point failure).
class realizability_error : public group_error {
public:
    realizability_error(const std::string& what, std::vector<std::string> witness)
        : group_error(what), witness_(std::move(witness)) {}

    const std::vector<std::string>& witness() const noexcept { return witness_; }

private:
    std::vector<std::string> witness_;
};

/// Finite rooted tree with rational edge lengths. Node 0 is the root and
/// stands for the identity; some nodes carry table labels, the rest are
/// branch points.
class WeightedTree {
public:
    struct Node {
        std::optional<std::size_t> label;   ///< index into labels()
        std::optional<std::size_t> parent;
        Rational parent_length;             ///< length of the edge to the parent
        Rational depth;                     ///< distance from the root
    };

    struct EdgeRecord {
        std::size_t u = 0;
        std::size_t v = 0;
        Rational length;
    };

    WeightedTree() : nodes_{Node{}} {}

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<LoopElement>& labels() const { return labels_; }
    std::size_t node_count() const { return nodes_.size(); }

    std::vector<EdgeRecord> edges() const {
        std::vector<EdgeRecord> out;
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (nodes_[i].parent) out.push_back({*nodes_[i].parent, i, nodes_[i].parent_length});
        }
        return out;
    }

    std::size_t node_of(std::size_t label) const { return label_node_.at(label); }

    std::optional<std::size_t> find_label(const LoopElement& g) const {
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (labels_[i] == g) return i;
        }
        return std::nullopt;
    }

    std::size_t require_label(const LoopElement& g) const {
        if (auto i = find_label(g)) return *i;
        throw group_error("element '" + format_loop(g) + "' is not a label of the tree");
    }

    Rational node_distance(std::size_t a, std::size_t b) const {
        const Rational total = nodes_.at(a).depth + nodes_.at(b).depth;
        while (a != b) {
            if (nodes_[a].depth >= nodes_[b].depth && nodes_[a].parent) {
                a = *nodes_[a].parent;
            } else {
                b = *nodes_[b].parent;
            }
        }
        return total - 2 * nodes_[a].depth;
    }

    /// Display name of a labeled node ("e" for the identity), empty for a branch point.
    std::string node_name(std::size_t n) const {
        const auto& lab = nodes_.at(n).label;
        return lab ? names_[*lab] : "";
    }

    const std::vector<std::string>& names() const { return names_; }

private:
    friend class TreeBuilder;
    friend WeightedTree build_tree(const LyndonTable& t);

    std::vector<Node> nodes_;
    std::vector<LoopElement> labels_;
    std::vector<std::string> names_;
    std::vector<std::size_t> label_node_;
};

namespace detail {

/// First 4-subset of a symmetric matrix where the largest of the three
/// pairings is attained only once.
inline std::optional<std::array<std::size_t, 4>> four_point_violation(const std::vector<std::vector<Rational>>& d) {
    const auto n = d.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c)
                for (std::size_t e = c + 1; e < n; ++e) {
                    const Rational s1 = d[a][b] + d[c][e];
                    const Rational s2 = d[a][c] + d[b][e];
                    const Rational s3 = d[a][e] + d[b][c];
                    const Rational top = max_of(s1, max_of(s2, s3));
                    if ((s1 == top) + (s2 == top) + (s3 == top) < 2) return std::array<std::size_t, 4>{a, b, c, e};
                }
    return std::nullopt;
}

} // namespace detail

/// Incremental construction from a distance matrix whose last row is the
/// root: each point is hung from the root-to-y path of the already placed
/// point y with the largest Gromov product at the root, at exactly that depth.
class TreeBuilder {
public:
    TreeBuilder(std::vector<std::vector<Rational>> dist, std::vector<std::string> names)
        : dist_(std::move(dist)) {
        const auto n = names.size();
        if (dist_.size() != n + 1) throw error("distance matrix must have one row per point plus the root");
        for (const auto& row : dist_) {
            if (row.size() != n + 1) throw error("distance matrix is not square");
        }
        tree_.names_ = std::move(names);
    }

    WeightedTree build() {
        const auto n = tree_.names_.size();
        tree_.label_node_.assign(n, 0);
        for (std::size_t x = 0; x < n; ++x) insert(x);
        verify();
        return std::move(tree_);
    }

private:
    const Rational& depth_of(std::size_t x) const { return dist_[x].back(); }
    Rational product(std::size_t x, std::size_t y) const { return (depth_of(x) + depth_of(y) - dist_[x][y]) / 2; }

    void insert(std::size_t x) {
        auto& nodes = tree_.nodes_;
        const Rational& lx = depth_of(x);
        Rational best(0);
        std::size_t anchor = 0;
        for (std::size_t y = 0; y < x; ++y) {
            const Rational c = product(x, y);
            if (c > best) {
                best = c;
                anchor = tree_.label_node_[y];
            }
        }
        if (lx < 0 || best > lx) throw realizability_error("distances violate the triangle inequality", {name(x)});
        std::size_t at = anchor;
        while (nodes[at].parent && nodes[*nodes[at].parent].depth >= best) at = *nodes[at].parent;
        if (nodes[at].depth != best) {
            const auto parent = *nodes[at].parent;
            WeightedTree::Node branch{std::nullopt, parent, best - nodes[parent].depth, best};
            nodes.push_back(branch);
            const auto b = nodes.size() - 1;
            nodes[at].parent = b;
            nodes[at].parent_length = nodes[at].depth - best;
            at = b;
        }
        if (lx == best) {
            if (nodes[at].label) {
                throw realizability_error("two points at distance zero", {name(*nodes[at].label), name(x)});
            }
            nodes[at].label = x;
            tree_.label_node_[x] = at;
            return;
        }
        nodes.push_back({x, at, lx - best, lx});
        tree_.label_node_[x] = nodes.size() - 1;
    }

    void verify() const {
        const auto n = tree_.names_.size();
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = i + 1; j <= n; ++j) {
                const auto ni = i == n ? 0 : tree_.label_node_[i];
                const auto nj = j == n ? 0 : tree_.label_node_[j];
                if (tree_.node_distance(ni, nj) == dist_[i][j]) continue;
                if (const auto quad = detail::four_point_violation(dist_)) {
                    std::vector<std::string> w;
                    for (auto k : *quad) w.push_back(name(k));
                    throw realizability_error("distances are not realizable by a tree: four-point condition fails", w);
                }
                throw realizability_error("distances are not realizable by a tree", {name(i), name(j)});
            }
        }
    }

    std::string name(std::size_t k) const { return k == tree_.names_.size() ? "root" : tree_.names_[k]; }

    std::vector<std::vector<Rational>> dist_;
    WeightedTree tree_;
};

inline std::string element_name(const LoopElement& g) {
    auto expr = format_loop(g);
    return expr.empty() ? "e" : expr;
}

/// T(G, L) for a finite table: distances L(g^-1 h) between elements, L(g)
/// from the root. The table must satisfy the length-function axioms.
inline WeightedTree build_tree(const LyndonTable& t) {
    const auto axioms = check_lyndon_axioms(t);
    if (!axioms.passed()) {
        const auto& v = axioms.violations.front();
        throw realizability_error("length function fails the axioms: " + v.reason, v.witness);
    }
    const auto n = t.size();
    const auto q = quotient_lengths(t);
    std::vector<std::vector<Rational>> dist(n + 1, std::vector<Rational>(n + 1));
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) dist[i][j] = q[i][j];
        dist[i][n] = dist[n][i] = t.lengths[i];
        names.push_back(element_name(t.elements[i]));
    }
    auto tree = TreeBuilder(std::move(dist), std::move(names)).build();
    tree.labels_ = t.elements;
    return tree;
}


inline Rational tree_distance(const WeightedTree& t, std::size_t g, std::size_t h) {
    if (g >= t.labels().size() || h >= t.labels().size()) throw group_error("unknown tree label");
    return t.node_distance(t.node_of(g), t.node_of(h));
}

inline Rational tree_distance(const WeightedTree& t, const LoopElement& g, const LoopElement& h) {
    return tree_distance(t, t.require_label(g), t.require_label(h));
}

/// Left translation by g on a set of labels: each label h goes to the label
/// of g * h. The report confirms every pairwise distance is preserved and
/// that no label is fixed by a nontrivial g.
struct TreeAction {
    std::vector<std::pair<std::size_t, std::size_t>> mapping;
    CheckReport report;
};

inline TreeAction act_on_tree(const WeightedTree& t, const LoopElement& g, const std::vector<std::size_t>& domain) {
    TreeAction out;
    out.report.check = "tree-action";
    for (auto h : domain) {
        if (h >= t.labels().size()) throw group_error("unknown tree label");
        const auto image = star(g, t.labels()[h]);
        const auto gh = t.find_label(image);
        if (!gh) throw group_error("closure missing: '" + format_loop(image) + "' is not in the table");
        out.mapping.emplace_back(h, *gh);
    }
    for (const auto& [h, gh] : out.mapping) {
        ++out.report.instances;
        if (h == gh && !g.is_identity()) out.report.fail({format_loop(g), format_loop(t.labels()[h])}, "label fixed by a nontrivial element");
    }
    for (std::size_t i = 0; i < out.mapping.size(); ++i) {
        for (std::size_t j = i + 1; j < out.mapping.size(); ++j) {
            ++out.report.instances;
            const auto [h, gh] = out.mapping[i];
            const auto [k, gk] = out.mapping[j];
            if (tree_distance(t, gh, gk) != tree_distance(t, h, k)) {
                out.report.fail({format_loop(g), format_loop(t.labels()[h]), format_loop(t.labels()[k])}, "translation changes a distance");
            }
        }
    }
    return out;
}

/// Domain = every label whose translate is also a label.
inline TreeAction act_on_tree(const WeightedTree& t, const LoopElement& g) {
    std::vector<std::size_t> domain;
    for (std::size_t h = 0; h < t.labels().size(); ++h) {
        if (t.find_label(star(g, t.labels()[h]))) domain.push_back(h);
    }
    return act_on_tree(t, g, domain);
}

/// Builds the tree from the table and compares every labeled distance (and
/// every depth) with the covering-tree distance of the loops.
inline CheckReport cross_validate(const LyndonTable& table) {
    CheckReport r{"cross-validate", 0, {}};
    const auto tree = build_tree(table);
    const auto n = table.size();
    std::vector<TreePoint> pts;
    for (const auto& g : table.elements) pts.push_back(g.as_point());
    for (std::size_t i = 0; i < n; ++i) {
        ++r.instances;
        const auto base = TreePoint::base(pts[i].graph_ref());
        if (tree.node_distance(0, tree.node_of(i)) != dbar(base, pts[i])) {
            r.fail({"", format_point(pts[i])}, "tree depth differs from covering-tree distance");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            ++r.instances;
            if (tree_distance(tree, i, j) != dbar(pts[i], pts[j])) {
                r.fail({format_point(pts[i]), format_point(pts[j])}, "tree distance differs from covering-tree distance");
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Minimality: every point lies on a geodesic from the base to an orbit point

namespace detail {

struct RouteState {
    std::size_t vertex = 0;
    std::optional<Direction> arrived;  ///< last full step taken into the vertex
};

} // namespace detail

/// Extends c to a loop at the basepoint by a shortest route that never turns
/// back on itself (nor on c's last step), so c stays an initial piece of the
/// reduced loop. nullopt when every continuation runs into a dead end.
inline std::optional<LoopElement> extend_to_loop(const TreePoint& c) {
    const auto& g = c.graph();
    const auto& base = g.basepoint();
    const auto end = endpoint_map(c);
    if (end == base) return LoopElement(c.path());

    std::vector<Step> lead;
    detail::RouteState start;
    if (end.is_vertex()) {
        start.vertex = end.vertex();
        if (!c.path().steps().empty()) start.arrived = c.path().steps().back().direction();
    } else {
        // Inside an edge: carry on in the direction c was moving.
        const Step& last = c.path().steps().back();
        const Edge& e = g.edge(last.edge);
        if (!base.is_vertex() && base.edge() == last.edge &&
            (last.sign == Sign::plus ? base.offset() > last.to : base.offset() < last.to)) {
            return LoopElement(concat_cancel(c.path(), RhoPath(c.graph_ref(), end, {Step{last.edge, last.sign, last.to, base.offset()}})));
        }
        const Rational target = last.sign == Sign::plus ? e.length : Rational(0);
        lead.push_back({last.edge, last.sign, last.to, target});
        start.vertex = last.sign == Sign::plus ? e.v : e.u;
        start.arrived = last.direction();
    }

    // States: the start, then one per edge-end arrival, then "reached the base".
    const auto arrival_id = [](const Direction& d) { return 1 + 2 * d.edge + (d.sign == Sign::plus ? 0 : 1); };
    const std::size_t done_id = 1 + 2 * g.edge_count();
    std::vector<std::optional<Rational>> dist(done_id + 1);
    std::vector<std::optional<std::pair<std::size_t, Step>>> back(done_id + 1);
    std::vector<detail::RouteState> state(done_id + 1);
    state[0] = start;
    dist[0] = length(RhoPath(c.graph_ref(), end, lead));

    using Item = std::pair<Rational, std::size_t>;
    auto cmp = [](const Item& a, const Item& b) { return a.first > b.first || (a.first == b.first && a.second > b.second); };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> queue(cmp);
    queue.emplace(*dist[0], 0);
    std::vector<bool> settled(done_id + 1, false);
    const auto relax = [&](std::size_t from, std::size_t to, const Rational& d, const Step& s) {
        if (!dist[to] || d < *dist[to]) {
            dist[to] = d;
            back[to] = std::make_pair(from, s);
            queue.emplace(d, to);
        }
    };
    while (!queue.empty()) {
        const auto [d, id] = queue.top();
        queue.pop();
        if (settled[id] || d != *dist[id]) continue;
        settled[id] = true;
        if (id == done_id) break;
        const auto& here = state[id];
        if ((id != 0 || !lead.empty()) && base.is_vertex() && here.vertex == base.vertex()) {
            relax(id, done_id, d, Step{});
            continue;
        }
        for (const auto& dir : g.departures(here.vertex)) {
            const Step full = full_step(g, dir.edge, dir.sign);
            if (here.arrived && detail::is_reversal(full_step(g, here.arrived->edge, here.arrived->sign), full)) continue;
            if (!base.is_vertex() && base.edge() == dir.edge) {
                relax(id, done_id, d + abs_diff(full.from, base.offset()), Step{dir.edge, dir.sign, full.from, base.offset()});
            }
            const auto to = arrival_id(dir);
            state[to] = {far_end(g, dir), dir};
            relax(id, to, d + full.length(), full);
        }
    }
    if (!dist[done_id]) return std::nullopt;

    std::vector<Step> route;
    for (std::size_t id = done_id; id != 0;) {
        const auto& [from, s] = *back[id];
        if (id != done_id || !base.is_vertex()) route.push_back(s);
        id = from;
    }
    std::reverse(route.begin(), route.end());
    route.insert(route.begin(), lead.begin(), lead.end());
    return LoopElement(concat_cancel(c.path(), RhoPath(c.graph_ref(), end, std::move(route))));
}

/// For each point: first a supplied loop whose geodesic from the base passes
/// through it, otherwise an explicit extension; failures are reported.
inline CheckReport check_minimality_span(const std::vector<TreePoint>& points, const std::vector<LoopElement>& loops = {}) {
    CheckReport r{"minimality", 0, {}};
    for (const auto& c : points) {
        ++r.instances;
        const auto base = TreePoint::base(c.graph_ref());
        const auto spans = [&](const LoopElement& l) {
            const auto p = l.as_point();
            return dbar(base, c) + dbar(c, p) == dbar(base, p);
        };
        bool ok = false;
        for (const auto& l : loops) ok = ok || spans(l);
        if (ok) continue;
        const auto ext = extend_to_loop(c);
        if (!ext) {
            r.fail({format_point(c)}, "no loop extension: dead end");
        } else if (!spans(*ext)) {
            r.fail({format_point(c), format_loop(*ext)}, "extension does not pass through the point");
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Export

inline std::string to_dot(const WeightedTree& t) {
    std::ostringstream out;
    out << "graph T {\n";
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        std::string label = t.node_name(i);
        if (i == 0 && label.empty()) label = "e";
        out << "  n" << i << " [label=\"" << label << "\"" << (t.nodes()[i].label || i == 0 ? "" : ", shape=point") << "];\n";
    }
    for (const auto& e : t.edges()) out << "  n" << e.u << " -- n" << e.v << " [label=\"" << to_string(e.length) << "\"];\n";
    out << "}\n";
    return out.str();
}

inline nlohmann::json to_json(const WeightedTree& t) {
    auto nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        nlohmann::json n{{"id", i}, {"depth", to_string(t.nodes()[i].depth)}};
        if (t.nodes()[i].label) {
            n["label"] = t.names()[*t.nodes()[i].label];
        } else {
            n["label"] = nullptr;
        }
        nodes.push_back(std::move(n));
    }
    auto edges = nlohmann::json::array();
    for (const auto& e : t.edges()) edges.push_back({{"u", e.u}, {"v", e.v}, {"length", to_string(e.length)}});
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

} // namespace rtree_cover

#endif // RTREE_COVER_TREE_BUILDER_HPP
