#ifndef RTREE_COVER_LOOP_GROUP_HPP
#define RTREE_COVER_LOOP_GROUP_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rtree_cover/covering_tree.hpp"
#include "rtree_cover/error.hpp"
#include "rtree_cover/metric_graph.hpp"
#include "rtree_cover/report.hpp"
#include "rtree_cover/rho_path.hpp"

namespace rtree_cover {

/// Element of the loop group: a canonical loop at the basepoint.
class LoopElement {
public:
    explicit LoopElement(RhoPath loop) : loop_(std::move(loop)) {
        const auto& base = loop_.graph().basepoint();
        if (loop_.start() != base || loop_.end() != base) throw group_error("loop must start and end at the basepoint");
        if (!is_canonical(loop_)) throw group_error("loop must be in normal form");
    }

    static LoopElement of(const RhoPath& path) { return LoopElement(normalize(path)); }
    static LoopElement identity(const GraphRef& g) { return LoopElement(RhoPath::identity(g)); }

    const RhoPath& path() const { return loop_; }
    const GraphRef& graph_ref() const { return loop_.graph_ref(); }
    bool is_identity() const { return loop_.is_constant(); }

    /// The same loop seen as a point of the covering tree.
    TreePoint as_point() const { return TreePoint(loop_); }

    friend bool operator==(const LoopElement&, const LoopElement&) = default;

private:
    RhoPath loop_;
};

inline std::string format_loop(const LoopElement& g) { return format_path(g.path()); }

inline LoopElement star(const LoopElement& g, const LoopElement& h) {
    if (!same_graph(g.path(), h.path()) || g.path().start() != h.path().start()) {
        throw group_error("loops have different basepoints");
    }
    return LoopElement(concat_cancel(g.path(), h.path()));
}

inline LoopElement invert(const LoopElement& g) { return LoopElement(inverse(g.path())); }

/// n-th power by repeated cancelled concatenation (negative n uses the inverse).
inline LoopElement power(const LoopElement& g, long n) {
    const LoopElement base = n < 0 ? invert(g) : g;
    LoopElement out = LoopElement::identity(g.graph_ref());
    for (long i = 0; i < std::labs(n); ++i) out = star(out, base);
    return out;
}

/// Left action l(c) = l * c on the covering tree.
inline TreePoint act(const LoopElement& l, const TreePoint& c) {
    if (!same_graph(l.path(), c.path()) || l.path().start() != c.path().start()) {
        throw group_error("loop and point have different basepoints");
    }
    return TreePoint(concat_cancel(l.path(), c.path()));
}

/// The unique loop carrying c1 to c2, for two points of one fibre.
inline LoopElement fiber_transporter(const TreePoint& c1, const TreePoint& c2) {
    require_same_base(c1, c2);
    if (endpoint_map(c1) != endpoint_map(c2)) throw group_error("points lie in different fibres");
    return LoopElement(concat_cancel(c2.path(), inverse(c1.path())));
}

inline Rational lyndon_length(const LoopElement& g) { return length(g.path()); }

// ---------------------------------------------------------------------------
// Lyndon length functions

struct LyndonTable {
    std::vector<LoopElement> elements;
    std::vector<Rational> lengths;

    static LyndonTable from_elements(std::vector<LoopElement> elements) {
        LyndonTable t;
        t.elements = std::move(elements);
        for (const auto& g : t.elements) t.lengths.push_back(lyndon_length(g));
        return t;
    }

    std::size_t size() const { return elements.size(); }

    std::optional<std::size_t> find(const LoopElement& g) const {
        for (std::size_t i = 0; i < elements.size(); ++i) {
            if (elements[i] == g) return i;
        }
        return std::nullopt;
    }
};

/// L(g^-1 h) for every pair of table elements, computed in the group.
inline std::vector<std::vector<Rational>> quotient_lengths(const LyndonTable& t) {
    const auto n = t.size();
    std::vector<std::vector<Rational>> out(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto gi = invert(t.elements[i]);
        for (std::size_t j = 0; j < n; ++j) out[i][j] = lyndon_length(star(gi, t.elements[j]));
    }
    return out;
}

/// c(g, h) = (L(g) + L(h) - L(g^-1 h)) / 2.
inline Rational lyndon_product(const Rational& lg, const Rational& lh, const Rational& lgh) { return (lg + lh - lgh) / 2; }

/// Definiteness, symmetry and the min-inequality of the length function
/// over every element, pair and triple of the table.
inline CheckReport check_lyndon_axioms(const LyndonTable& t) {
    CheckReport r{"lyndon", 0, {}};
    const auto n = t.size();
    if (t.lengths.size() != n) throw error("Lyndon table has mismatched element and length counts");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& g = t.elements[i];
        const auto& lg = t.lengths[i];
        const std::vector<std::string> w{format_loop(g)};
        r.instances += 3;
        if (lg != lyndon_length(g)) r.fail(w, "stored length differs from loop length");
        if (lg < 0) r.fail(w, "negative length");
        if ((lg == 0) != g.is_identity()) r.fail(w, "definiteness");
        if (lyndon_length(invert(g)) != lg) r.fail(w, "L(g) != L(g^-1)");
    }
    const auto q = quotient_lengths(t);
    std::vector<std::vector<Rational>> c(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[i][j] = lyndon_product(t.lengths[i], t.lengths[j], q[i][j]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                ++r.instances;
                if (c[i][j] < min_of(c[i][k], c[j][k])) {
                    r.fail({format_loop(t.elements[i]), format_loop(t.elements[j]), format_loop(t.elements[k])},
                           "c(g,h) < min{c(g,k), c(h,k)}");
                }
            }
    return r;
}

// ---------------------------------------------------------------------------
// Conjugate decomposition c = alpha * beta * alpha^-1

struct LoopDecomposition {
    RhoPath alpha;  ///< from the basepoint
    RhoPath beta;   ///< nontrivial loop at the end of alpha
};

/// alpha is the longest common prefix of c and c^-1; beta is what remains
/// in the middle. For a nontrivial canonical loop this prefix is shorter than
/// half the loop, so beta is never empty.
inline LoopDecomposition loop_decompose(const LoopElement& c) {
    if (c.is_identity()) throw group_error("identity has no conjugate decomposition");
    const auto& loop = c.path();
    const Rational total = length(loop);
    RhoPath alpha = common_prefix(loop, inverse(loop));
    Rational a = length(alpha);
    if (2 * a >= total) {
        a = total / 2;
        alpha = prefix(loop, a);
    }
    RhoPath beta = subpath(loop, a, total - a);
    return {std::move(alpha), std::move(beta)};
}

inline RhoPath recompose(const LoopDecomposition& d) {
    return concat_cancel(concat_cancel(d.alpha, d.beta), inverse(d.alpha));
}

struct PowerLength {
    Rational formula;  ///< 2 L(alpha) + |n| L(beta)
    Rational reduced;  ///< length of the explicitly reduced n-th power
    bool agree() const { return formula == reduced; }
};

inline PowerLength power_length(const LoopElement& c, long n) {
    if (c.is_identity()) throw group_error("power length needs a nontrivial loop");
    if (n == 0) throw group_error("power length needs a nonzero exponent");
    const auto d = loop_decompose(c);
    return {2 * length(d.alpha) + std::labs(n) * length(d.beta), lyndon_length(power(c, n))};
}

// ---------------------------------------------------------------------------
// Change of basepoint

/// Given k from a new basepoint to the old one: f(c) = k * c on points and
/// phi(g) = k * g * k^-1 on loops.
class BasepointTransport {
public:
    explicit BasepointTransport(const RhoPath& k)
        : old_graph_(checked(k).graph_ref()), new_graph_(share(k.graph().with_basepoint(k.start()))),
          k_(new_graph_, k.start(), k.steps()) {}

    const GraphRef& source_graph() const { return old_graph_; }
    const GraphRef& target_graph() const { return new_graph_; }
    const RhoPath& path() const { return k_; }

    TreePoint map_point(const TreePoint& c) const { return TreePoint(concat_cancel(k_, rehome(c.path(), new_graph_))); }

    LoopElement map_loop(const LoopElement& g) const {
        return LoopElement(concat_cancel(concat_cancel(k_, rehome(g.path(), new_graph_)), inverse(k_)));
    }

    TreePoint unmap_point(const TreePoint& c) const {
        const auto back = rehome(inverse(k_), old_graph_);
        return TreePoint(concat_cancel(back, rehome(c.path(), old_graph_)));
    }

    LoopElement unmap_loop(const LoopElement& g) const {
        const auto back = rehome(inverse(k_), old_graph_);
        return LoopElement(concat_cancel(concat_cancel(back, rehome(g.path(), old_graph_)), rehome(k_, old_graph_)));
    }

private:
    static const RhoPath& checked(const RhoPath& k) {
        if (k.end() != k.graph().basepoint()) throw group_error("transport path must end at the basepoint");
        if (!is_canonical(k)) throw group_error("transport path must be in normal form");
        return k;
    }

    static RhoPath rehome(const RhoPath& c, const GraphRef& g) {
        if (!c.graph().same_space(*g)) throw graph_error("path belongs to a different graph");
        return RhoPath(g, c.start(), c.steps());
    }

    GraphRef old_graph_;
    GraphRef new_graph_;
    RhoPath k_;
};

inline BasepointTransport basepoint_transport(const RhoPath& k) { return BasepointTransport(k); }

// ---------------------------------------------------------------------------
// Graph morphisms and induced homomorphisms

struct EdgeImage {
    std::size_t target = 0;
    Rational scale;     ///< target length / source length
    bool flip = false;  ///< orientation reversed

    friend bool operator==(const EdgeImage&, const EdgeImage&) = default;
};

/// Edge-to-edge map scaling each edge by a positive rational factor.
class GraphMorphism {
public:
    GraphMorphism(GraphRef source, GraphRef target, std::vector<std::size_t> vertex_map, std::vector<EdgeImage> edge_map)
        : source_(std::move(source)), target_(std::move(target)), vertex_map_(std::move(vertex_map)),
          edge_map_(std::move(edge_map)) {
        validate();
    }

    static GraphMorphism identity(const GraphRef& g) {
        std::vector<std::size_t> vm(g->vertex_count());
        std::iota(vm.begin(), vm.end(), std::size_t{0});
        std::vector<EdgeImage> em;
        for (std::size_t e = 0; e < g->edge_count(); ++e) em.push_back({e, Rational(1), false});
        return GraphMorphism(g, g, std::move(vm), std::move(em));
    }

    const GraphRef& source() const { return source_; }
    const GraphRef& target() const { return target_; }
    const std::vector<std::size_t>& vertex_map() const { return vertex_map_; }
    const std::vector<EdgeImage>& edge_map() const { return edge_map_; }

    /// Injective on vertices and on edges.
    bool is_embedding() const {
        for (std::size_t i = 0; i < vertex_map_.size(); ++i)
            for (std::size_t j = i + 1; j < vertex_map_.size(); ++j)
                if (vertex_map_[i] == vertex_map_[j]) return false;
        for (std::size_t i = 0; i < edge_map_.size(); ++i)
            for (std::size_t j = i + 1; j < edge_map_.size(); ++j)
                if (edge_map_[i].target == edge_map_[j].target) return false;
        return true;
    }

    GraphPoint map_point(const GraphPoint& p) const {
        source_->require(p);
        if (p.is_vertex()) return GraphPoint::at_vertex(vertex_map_[p.vertex()]);
        return target_->point_on_edge(edge_map_[p.edge()].target, map_offset(p.edge(), p.offset()));
    }

    Step map_step(const Step& s) const {
        const auto& img = edge_map_.at(s.edge);
        return {img.target, img.flip ? flip(s.sign) : s.sign, map_offset(s.edge, s.from), map_offset(s.edge, s.to)};
    }

    /// Image path, not normalized.
    RhoPath push_forward(const RhoPath& c) const {
        if (!c.graph().same_space(*source_)) throw graph_error("path does not live in the morphism's source");
        std::vector<Step> steps;
        steps.reserve(c.steps().size());
        for (const auto& s : c.steps()) steps.push_back(map_step(s));
        return RhoPath(target_, map_point(c.start()), std::move(steps));
    }

    Rational map_offset(std::size_t edge, const Rational& offset) const {
        const auto& img = edge_map_.at(edge);
        const Rational scaled = offset * img.scale;
        return img.flip ? Rational(target_->edge(img.target).length - scaled) : scaled;
    }

private:
    void validate() const {
        if (vertex_map_.size() != source_->vertex_count()) throw graph_error("vertex map has the wrong size");
        if (edge_map_.size() != source_->edge_count()) throw graph_error("edge map has the wrong size");
        for (auto v : vertex_map_) {
            if (v >= target_->vertex_count()) throw graph_error("vertex map points outside the target");
        }
        for (std::size_t e = 0; e < edge_map_.size(); ++e) {
            const auto& img = edge_map_[e];
            const Edge& s = source_->edge(e);
            if (img.target >= target_->edge_count()) throw graph_error("edge map points outside the target");
            const Edge& t = target_->edge(img.target);
            if (img.scale <= 0) throw graph_error("edge scale must be positive");
            if (t.length != s.length * img.scale) {
                throw graph_error("edge '" + s.id + "' scaled by " + to_string(img.scale) + " does not fill '" + t.id + "'");
            }
            const auto u = img.flip ? t.v : t.u;
            const auto v = img.flip ? t.u : t.v;
            if (vertex_map_[s.u] != u || vertex_map_[s.v] != v) {
                throw graph_error("edge '" + s.id + "' is not mapped compatibly with its endpoints");
            }
        }
        if (map_point(source_->basepoint()) != target_->basepoint()) throw graph_error("morphism does not preserve the basepoint");
    }

    GraphRef source_;
    GraphRef target_;
    std::vector<std::size_t> vertex_map_;
    std::vector<EdgeImage> edge_map_;
};

/// f_*(g): push the loop forward edge by edge and normalize in the target.
inline LoopElement induced_hom(const GraphMorphism& m, const LoopElement& g) {
    if (!m.is_embedding()) throw group_error("induced homomorphism needs an embedding");
    return LoopElement::of(m.push_forward(g.path()));
}

/// Embedding of H_n into H_{n+shift} sending circle C_i to C_{i+shift}.
inline GraphMorphism hawaiian_shift(const GraphRef& source, const GraphRef& target, std::size_t shift) {
    std::vector<EdgeImage> em;
    for (std::size_t e = 0; e < source->edge_count(); ++e) {
        const auto t = e + shift;
        if (t >= target->edge_count()) throw graph_error("target truncation is too short for the shift");
        em.push_back({t, Rational(target->edge(t).length / source->edge(e).length), false});
    }
    return GraphMorphism(source, target, {0}, std::move(em));
}

// ---------------------------------------------------------------------------
// Sequence encoding at the wedge point of a Hawaiian earring

/// Positions sigma(z)_k <= m, where s(z)_n = z_1 + ... + z_n and
/// sigma(z)_n = 2^{s(z)_1} + ... + 2^{s(z)_n}.
inline std::vector<std::uint64_t> zastrow_positions(const std::vector<std::uint64_t>& z, std::uint64_t m) {
    if (z.empty()) throw error("sequence must be nonempty");
    std::vector<std::uint64_t> out;
    std::uint64_t s = 0;
    std::uint64_t sigma = 0;
    for (auto zi : z) {
        if (zi == 0) throw error("sequence entries must be positive integers");
        s += zi;
        if (s >= 63) break;
        sigma += std::uint64_t{1} << s;
        if (sigma > m) break;
        out.push_back(sigma);
    }
    return out;
}

/// x(z)_1..x(z)_m: -1 exactly at the sigma positions, +1 elsewhere.
inline std::vector<int> zastrow_encode(const std::vector<std::uint64_t>& z, std::uint64_t m) {
    if (m == 0) throw error("prefix length must be at least 1");
    std::vector<int> x(m, 1);
    for (auto pos : zastrow_positions(z, m)) x[pos - 1] = -1;
    return x;
}

// ---------------------------------------------------------------------------
// Wedge decomposition

/// Factor index for every edge: edges are in one factor when they are joined
/// through a vertex other than the basepoint. Throws if the graph is not a
/// wedge of at least two factors at a basepoint vertex.
inline std::vector<std::size_t> wedge_factors(const MetricGraph& g) {
    if (!g.basepoint().is_vertex()) throw group_error("graph is not a wedge: basepoint is not a vertex");
    const auto base = g.basepoint().vertex();
    std::vector<std::size_t> parent(g.edge_count());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        if (v == base) continue;
        const auto& deps = g.departures(v);
        for (std::size_t i = 1; i < deps.size(); ++i) parent[find(deps[i].edge)] = find(deps[0].edge);
    }
    std::vector<std::size_t> label(g.edge_count());
    std::vector<std::size_t> roots;
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const auto r = find(e);
        auto it = std::find(roots.begin(), roots.end(), r);
        label[e] = static_cast<std::size_t>(it - roots.begin());
        if (it == roots.end()) roots.push_back(r);
    }
    if (roots.size() < 2) throw group_error("graph is not a wedge: one factor only");
    return label;
}

struct FactorLoop {
    std::size_t factor = 0;
    LoopElement loop;
};

/// Alternating decomposition into maximal sub-loops lying in a single factor.
inline std::vector<FactorLoop> wedge_factor_split(const LoopElement& g) {
    const auto factors = wedge_factors(g.path().graph());
    std::vector<FactorLoop> out;
    const auto& steps = g.path().steps();
    std::size_t i = 0;
    while (i < steps.size()) {
        const auto f = factors[steps[i].edge];
        std::size_t j = i;
        while (j < steps.size() && factors[steps[j].edge] == f) ++j;
        std::vector<Step> run(steps.begin() + static_cast<long>(i), steps.begin() + static_cast<long>(j));
        out.push_back({f, LoopElement(RhoPath(g.graph_ref(), g.path().graph().basepoint(), std::move(run)))});
        i = j;
    }
    return out;
}

} // namespace rtree_cover

#endif // RTREE_COVER_LOOP_GROUP_HPP
