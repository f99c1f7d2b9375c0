#ifndef RTREE_COVER_RHO_PATH_HPP
#define RTREE_COVER_RHO_PATH_HPP

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rtree_cover/error.hpp"
#include "rtree_cover/metric_graph.hpp"
#include "rtree_cover/rational.hpp"

namespace rtree_cover {

/// Traversal of part of one edge. A `plus` step has from <= to, a `minus`
/// step has from >= to; offsets lie in [0, edge length].
struct Step {
    std::size_t edge = 0;
    Sign sign = Sign::plus;
    Rational from;
    Rational to;

    Rational length() const { return abs_diff(from, to); }
    bool degenerate() const { return from == to; }
    Direction direction() const { return {edge, sign}; }

    friend bool operator==(const Step&, const Step&) = default;
};

inline Step full_step(const MetricGraph& g, std::size_t edge, Sign sign) {
    const Rational& len = g.edge(edge).length;
    return sign == Sign::plus ? Step{edge, sign, Rational(0), len} : Step{edge, sign, len, Rational(0)};
}

inline Step reversed(const Step& s) { return {s.edge, flip(s.sign), s.to, s.from}; }

/// Arclength-parameterized edge word anchored at a start point. Values are
/// immutable; all operations return new paths.
class RhoPath {
public:
    /// Constant path at `at`.
    static RhoPath constant(GraphRef g, GraphPoint at) { return RhoPath(std::move(g), std::move(at), {}); }

    /// Constant path at the graph's basepoint.
    static RhoPath identity(const GraphRef& g) { return constant(g, g->basepoint()); }

    RhoPath(GraphRef g, GraphPoint start, std::vector<Step> steps)
        : graph_(std::move(g)), start_(std::move(start)), steps_(std::move(steps)) {
        validate();
    }

    /// Start point taken from the first step.
    RhoPath(GraphRef g, std::vector<Step> steps) : graph_(std::move(g)), steps_(std::move(steps)) {
        if (steps_.empty()) throw path_error("cannot infer the start of an empty path");
        start_ = graph_->point_on_edge(steps_.front().edge, steps_.front().from);
        validate();
    }

    const MetricGraph& graph() const { return *graph_; }
    const GraphRef& graph_ref() const { return graph_; }
    const GraphPoint& start() const { return start_; }
    const std::vector<Step>& steps() const { return steps_; }
    bool is_constant() const { return steps_.empty(); }

    GraphPoint end() const {
        if (steps_.empty()) return start_;
        return graph_->point_on_edge(steps_.back().edge, steps_.back().to);
    }

    bool is_loop() const { return start() == end(); }

    friend bool operator==(const RhoPath& a, const RhoPath& b) {
        return same_graph(a, b) && a.start_ == b.start_ && a.steps_ == b.steps_;
    }

    friend bool same_graph(const RhoPath& a, const RhoPath& b) {
        return a.graph_ == b.graph_ || a.graph_->same_space(*b.graph_);
    }

private:
    void validate() const {
        graph_->require(start_);
        GraphPoint at = start_;
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            const Step& s = steps_[i];
            if (s.edge >= graph_->edge_count()) throw path_error("step " + std::to_string(i) + " uses an unknown edge");
            const Rational& len = graph_->edge(s.edge).length;
            if (s.from < 0 || s.to < 0 || s.from > len || s.to > len) {
                throw path_error("step " + std::to_string(i) + " offset out of range");
            }
            if ((s.sign == Sign::plus && s.from > s.to) || (s.sign == Sign::minus && s.from < s.to)) {
                throw path_error("step " + std::to_string(i) + " sign disagrees with its range");
            }
            if (graph_->point_on_edge(s.edge, s.from) != at) {
                throw path_error("step " + std::to_string(i) + " does not start where the previous one ends");
            }
            at = graph_->point_on_edge(s.edge, s.to);
        }
    }

    GraphRef graph_;
    GraphPoint start_;
    std::vector<Step> steps_;
};

inline Rational length(const RhoPath& c) {
    Rational total(0);
    for (const auto& s : c.steps()) total += s.length();
    return total;
}

inline RhoPath inverse(const RhoPath& c) {
    std::vector<Step> steps;
    steps.reserve(c.steps().size());
    for (auto it = c.steps().rbegin(); it != c.steps().rend(); ++it) steps.push_back(reversed(*it));
    return RhoPath(c.graph_ref(), c.end(), std::move(steps));
}

namespace detail {

/// Second step runs back over the first (same edge, opposite sense, meeting point shared).
inline bool is_reversal(const Step& a, const Step& b) {
    return a.edge == b.edge && a.sign != b.sign && a.to == b.from;
}

inline bool continues(const Step& a, const Step& b) {
    return a.edge == b.edge && a.sign == b.sign && a.to == b.from;
}

/// Pushes `incoming` onto a reduced stack, cancelling reversals with exact
/// partial-overlap splitting and merging same-direction continuations.
/// Returns the arclength of `incoming` consumed by cancellation.
inline Rational push_reduced(std::vector<Step>& stack, Step incoming) {
    Rational cancelled(0);
    while (!incoming.degenerate() && !stack.empty()) {
        Step& top = stack.back();
        if (is_reversal(top, incoming)) {
            const Rational top_len = top.length();
            const Rational in_len = incoming.length();
            if (top_len <= in_len) {
                cancelled += top_len;
                incoming.from = top.from;
                stack.pop_back();
            } else {
                cancelled += in_len;
                top.to = incoming.to;
                return cancelled;
            }
        } else if (continues(top, incoming)) {
            top.to = incoming.to;
            return cancelled;
        } else {
            break;
        }
    }
    if (!incoming.degenerate()) stack.push_back(std::move(incoming));
    return cancelled;
}

} // namespace detail

/// Weakly normal representative with the same endpoints: iterated removal of
/// reversal pairs. Canonical: no zero-length steps, contiguous same-direction
/// pieces of one edge merged.
inline RhoPath normalize(const RhoPath& c) {
    std::vector<Step> stack;
    stack.reserve(c.steps().size());
    for (const auto& s : c.steps()) detail::push_reduced(stack, s);
    return RhoPath(c.graph_ref(), c.start(), std::move(stack));
}

/// No reversal point. Zero-length steps and unmerged splits are ignored, so
/// this is a property of the underlying parameterized path.
inline bool is_weakly_normal(const RhoPath& c) {
    const Step* prev = nullptr;
    for (const auto& s : c.steps()) {
        if (s.degenerate()) continue;
        if (prev && detail::is_reversal(*prev, s)) return false;
        prev = &s;
    }
    return true;
}

/// Structurally in the form `normalize` produces.
inline bool is_canonical(const RhoPath& c) {
    for (std::size_t i = 0; i < c.steps().size(); ++i) {
        if (c.steps()[i].degenerate()) return false;
        if (i > 0 && (detail::is_reversal(c.steps()[i - 1], c.steps()[i]) || detail::continues(c.steps()[i - 1], c.steps()[i]))) {
            return false;
        }
    }
    return true;
}

/// Plain concatenation, no cancellation.
inline RhoPath concat(const RhoPath& c, const RhoPath& d) {
    if (!same_graph(c, d)) throw path_error("paths live in different graphs");
    if (c.end() != d.start()) throw path_error("endpoint of the first path is not the start of the second");
    auto steps = c.steps();
    steps.insert(steps.end(), d.steps().begin(), d.steps().end());
    return RhoPath(c.graph_ref(), c.start(), std::move(steps));
}

/// Cancelled concatenation.
inline RhoPath concat_cancel(const RhoPath& c, const RhoPath& d) {
    if (!same_graph(c, d)) throw path_error("paths live in different graphs");
    if (c.end() != d.start()) throw path_error("endpoint of the first path is not the start of the second");
    std::vector<Step> stack = normalize(c).steps();
    for (const auto& s : d.steps()) detail::push_reduced(stack, s);
    return RhoPath(c.graph_ref(), c.start(), std::move(stack));
}

/// Longest common initial subpath of two canonical paths with the same start.
inline RhoPath common_prefix(const RhoPath& c1, const RhoPath& c2) {
    if (!same_graph(c1, c2)) throw path_error("paths live in different graphs");
    if (c1.start() != c2.start()) throw path_error("paths start at different points");
    std::vector<Step> shared;
    const auto& a = c1.steps();
    const auto& b = c2.steps();
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i].edge != b[i].edge || a[i].sign != b[i].sign || a[i].from != b[i].from) break;
        if (a[i].to == b[i].to) {
            shared.push_back(a[i]);
            continue;
        }
        // Same germ, different extent: keep the shorter piece and stop.
        shared.push_back(a[i].length() < b[i].length() ? a[i] : b[i]);
        break;
    }
    return RhoPath(c1.graph_ref(), c1.start(), std::move(shared));
}

/// Restriction to the arclength window [s, t].
inline RhoPath subpath(const RhoPath& c, const Rational& s, const Rational& t) {
    const Rational total = length(c);
    if (s < 0 || t > total || s > t) {
        throw path_error("window [" + to_string(s) + ", " + to_string(t) + "] outside [0, " + to_string(total) + "]");
    }
    std::vector<Step> out;
    std::optional<GraphPoint> start;
    Rational pos(0);
    for (const auto& step : c.steps()) {
        const Rational len = step.length();
        const Rational lo = max_of(s, pos);
        const Rational hi = min_of(t, Rational(pos + len));
        if (!start && pos <= s && s <= pos + len) {
            const Rational off = step.sign == Sign::plus ? Rational(step.from + (s - pos)) : Rational(step.from - (s - pos));
            start = c.graph().point_on_edge(step.edge, off);
        }
        if (lo < hi) {
            Step piece = step;
            if (step.sign == Sign::plus) {
                piece.from = step.from + (lo - pos);
                piece.to = step.from + (hi - pos);
            } else {
                piece.from = step.from - (lo - pos);
                piece.to = step.from - (hi - pos);
            }
            out.push_back(std::move(piece));
        }
        pos += len;
    }
    if (!start) start = c.start();
    return RhoPath(c.graph_ref(), *start, std::move(out));
}

inline RhoPath prefix(const RhoPath& c, const Rational& s) { return subpath(c, Rational(0), s); }

/// Point reached after arclength `s`.
inline GraphPoint point_at(const RhoPath& c, const Rational& s) { return subpath(c, s, s).start(); }

/// A shortest path between two points, as a weakly normal path.
inline RhoPath geodesic_path(const GraphRef& g, const GraphPoint& p, const GraphPoint& q) {
    g->require(p);
    g->require(q);
    if (p == q) return RhoPath::constant(g, p);
    const auto table = detail::dijkstra(*g, p);

    const auto route_to = [&](std::size_t target) {
        std::vector<Step> back;
        auto w = target;
        while (!table.seeded[w]) {
            const Direction dir = *table.via[w];
            back.push_back(full_step(*g, dir.edge, dir.sign));
            w = dir.sign == Sign::plus ? g->edge(dir.edge).u : g->edge(dir.edge).v;
        }
        if (!p.is_vertex()) {
            const Edge& e = g->edge(p.edge());
            const bool go_minus = (w == e.u && *table.dist[w] == p.offset());
            back.push_back(go_minus ? Step{p.edge(), Sign::minus, p.offset(), Rational(0)}
                                    : Step{p.edge(), Sign::plus, p.offset(), e.length});
        }
        return std::vector<Step>(back.rbegin(), back.rend());
    };

    std::vector<Step> best;
    std::optional<Rational> best_len;
    const auto consider = [&](std::vector<Step> steps) {
        Rational len(0);
        for (const auto& s : steps) len += s.length();
        if (!best_len || len < *best_len) {
            best_len = len;
            best = std::move(steps);
        }
    };
    if (q.is_vertex()) {
        consider(route_to(q.vertex()));
    } else {
        const Edge& f = g->edge(q.edge());
        auto via_u = route_to(f.u);
        via_u.push_back({q.edge(), Sign::plus, Rational(0), q.offset()});
        consider(std::move(via_u));
        auto via_v = route_to(f.v);
        via_v.push_back({q.edge(), Sign::minus, f.length, q.offset()});
        consider(std::move(via_v));
        if (!p.is_vertex() && p.edge() == q.edge()) {
            const Sign sign = p.offset() < q.offset() ? Sign::plus : Sign::minus;
            consider({Step{q.edge(), sign, p.offset(), q.offset()}});
        }
    }
    return normalize(RhoPath(g, p, std::move(best)));
}

// ---------------------------------------------------------------------------
// Path expressions:  path := step* ; step := EDGEID SIGN RANGE? ;
// SIGN := "+" | "-" ; RANGE := "[" RAT ":" RAT "]"

namespace detail {

class PathLexer {
public:
    explicit PathLexer(std::string_view text) : text_(text) {}

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool done() const { return pos_ >= text_.size(); }
    std::size_t pos() const { return pos_; }
    char peek() const { return done() ? '\0' : text_[pos_]; }

    std::string edge_id() {
        const auto begin = pos_;
        while (!done() && std::string_view(" \t\r\n+-[]:").find(text_[pos_]) == std::string_view::npos) ++pos_;
        if (pos_ == begin) throw parse_error("expected edge id", pos_);
        return std::string(text_.substr(begin, pos_ - begin));
    }

    Sign sign() {
        if (peek() == '+') return ++pos_, Sign::plus;
        if (peek() == '-') return ++pos_, Sign::minus;
        throw parse_error("expected '+' or '-'", pos_);
    }

    void expect(char ch) {
        if (peek() != ch) throw parse_error(std::string("expected '") + ch + "'", pos_);
        ++pos_;
    }

    Rational rational() {
        const auto begin = pos_;
        while (!done() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/')) ++pos_;
        try {
            return parse_rational(text_.substr(begin, pos_ - begin));
        } catch (const parse_error&) {
            throw parse_error("malformed rational", begin);
        }
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses a path expression. The start point is that of the first step, or
/// the basepoint for the empty expression.
inline RhoPath parse_path(const GraphRef& g, std::string_view expr) {
    detail::PathLexer lex(expr);
    std::vector<Step> steps;
    lex.skip_space();
    while (!lex.done()) {
        const auto at = lex.pos();
        const auto id = lex.edge_id();
        const auto edge = g->find_edge(id);
        if (!edge) throw parse_error("unknown edge '" + id + "'", at);
        const Sign sign = lex.sign();
        Step step = full_step(*g, *edge, sign);
        if (lex.peek() == '[') {
            lex.expect('[');
            step.from = lex.rational();
            lex.expect(':');
            step.to = lex.rational();
            lex.expect(']');
            const Rational& len = g->edge(*edge).length;
            if (step.from > len || step.to > len) throw parse_error("offset out of range on edge '" + id + "'", at);
            if ((sign == Sign::plus && step.from > step.to) || (sign == Sign::minus && step.from < step.to)) {
                throw parse_error("range direction disagrees with sign", at);
            }
        }
        if (!lex.done() && !std::isspace(static_cast<unsigned char>(lex.peek()))) {
            throw parse_error("expected whitespace between steps", lex.pos());
        }
        steps.push_back(std::move(step));
        lex.skip_space();
    }
    if (steps.empty()) return RhoPath::identity(g);
    try {
        return RhoPath(g, std::move(steps));
    } catch (const path_error& e) {
        throw parse_error(e.what(), 0);
    }
}

inline std::string format_step(const MetricGraph& g, const Step& s) {
    std::string out = g.edge(s.edge).id;
    out += sign_char(s.sign);
    if (s != full_step(g, s.edge, s.sign)) {
        out += '[' + to_string(s.from) + ':' + to_string(s.to) + ']';
    }
    return out;
}

inline std::string format_path(const RhoPath& c) {
    std::string out;
    for (const auto& s : c.steps()) {
        if (!out.empty()) out += ' ';
        out += format_step(c.graph(), s);
    }
    return out;
}

} // namespace rtree_cover

#endif // RTREE_COVER_RHO_PATH_HPP
