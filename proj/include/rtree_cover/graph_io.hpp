#ifndef RTREE_COVER_GRAPH_IO_HPP
#define RTREE_COVER_GRAPH_IO_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtree_cover/error.hpp"
#include "rtree_cover/loop_group.hpp"
#include "rtree_cover/metric_graph.hpp"
#include "rtree_cover/rational.hpp"
#include "rtree_cover/rho_path.hpp"

namespace rtree_cover {

using nlohmann::json;

/// Structurally invalid input document.
class format_error : public error {
public:
    using error::error;
};

namespace detail {

inline const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw format_error(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw format_error(where + " is missing '" + key + "'");
    return *it;
}

inline std::string string_field(const json& obj, const char* key, const std::string& where) {
    const auto& v = field(obj, key, where);
    if (!v.is_string()) throw format_error(where + "." + key + " must be a string");
    return v.get<std::string>();
}

/// Rationals are strings ("p/q" or "p"); plain JSON integers are also taken.
/// Floating-point numbers are rejected.
inline Rational rational_value(const json& v, const std::string& where) {
    if (v.is_string()) {
        try {
            return parse_rational(v.get<std::string>());
        } catch (const parse_error&) {
            throw format_error(where + " is not a rational: '" + v.get<std::string>() + "'");
        }
    }
    if (v.is_number_integer()) return Rational(v.get<long>());
    throw format_error(where + " must be a rational string such as \"3/4\"");
}

} // namespace detail

// ---------------------------------------------------------------------------
// Graph documents

inline MetricGraph graph_from_json(const json& doc) {
    const auto& vs = detail::field(doc, "vertices", "graph");
    const auto& es = detail::field(doc, "edges", "graph");
    if (!vs.is_array()) throw format_error("graph.vertices must be an array");
    if (!es.is_array()) throw format_error("graph.edges must be an array");
    std::vector<std::string> vertices;
    for (const auto& v : vs) {
        if (!v.is_string()) throw format_error("vertex names must be strings");
        vertices.push_back(v.get<std::string>());
    }
    const auto vertex_of = [&](const std::string& name, const std::string& where) {
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            if (vertices[i] == name) return i;
        }
        throw format_error(where + " names unknown vertex '" + name + "'");
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < es.size(); ++i) {
        const auto where = "graph.edges[" + std::to_string(i) + "]";
        const auto& e = es[i];
        edges.push_back({detail::string_field(e, "id", where), vertex_of(detail::string_field(e, "u", where), where),
                         vertex_of(detail::string_field(e, "v", where), where),
                         detail::rational_value(detail::field(e, "length", where), where + ".length")});
    }
    const auto& bp = detail::field(doc, "basepoint", "graph");
    if (!bp.is_object()) throw format_error("graph.basepoint must be an object");
    if (bp.contains("vertex")) {
        if (bp.size() != 1) throw format_error("graph.basepoint takes either {vertex} or {edge, offset}");
        const auto v = vertex_of(detail::string_field(bp, "vertex", "graph.basepoint"), "graph.basepoint");
        return MetricGraph(std::move(vertices), std::move(edges), GraphPoint::at_vertex(v));
    }
    const auto id = detail::string_field(bp, "edge", "graph.basepoint");
    const auto offset = detail::rational_value(detail::field(bp, "offset", "graph.basepoint"), "graph.basepoint.offset");
    std::size_t e = edges.size();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].id == id) e = i;
    }
    if (e == edges.size()) throw format_error("graph.basepoint names unknown edge '" + id + "'");
    if (offset <= 0 || offset >= edges[e].length) {
        throw format_error("graph.basepoint offset must lie strictly inside the edge; use {vertex} for endpoints");
    }
    return MetricGraph(std::move(vertices), std::move(edges), GraphPoint::inside_edge(e, offset));
}

inline json graph_to_json(const MetricGraph& g) {
    json edges = json::array();
    for (const auto& e : g.edges()) {
        edges.push_back({{"id", e.id}, {"u", g.vertex_name(e.u)}, {"v", g.vertex_name(e.v)}, {"length", to_string(e.length)}});
    }
    json bp;
    if (g.basepoint().is_vertex()) {
        bp = {{"vertex", g.vertex_name(g.basepoint().vertex())}};
    } else {
        bp = {{"edge", g.edge(g.basepoint().edge()).id}, {"offset", to_string(g.basepoint().offset())}};
    }
    return {{"vertices", g.vertices()}, {"edges", std::move(edges)}, {"basepoint", std::move(bp)}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw format_error("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline MetricGraph read_graph_file(const std::string& path) { return graph_from_json(read_json_file(path)); }

/// DOT rendering of the graph itself, edges labeled "id: length".
inline std::string graph_to_dot(const MetricGraph& g) {
    std::ostringstream out;
    out << "graph G {\n";
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
        const bool base = g.basepoint().is_vertex() && g.basepoint().vertex() == v;
        out << "  v" << v << " [label=\"" << g.vertex_name(v) << "\"" << (base ? ", shape=doublecircle" : "") << "];\n";
    }
    for (const auto& e : g.edges()) {
        out << "  v" << e.u << " -- v" << e.v << " [label=\"" << e.id << ": " << to_string(e.length) << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Lyndon tables

inline LyndonTable table_from_json(const json& doc, const GraphRef& g) {
    const auto& es = detail::field(doc, "elements", "table");
    if (!es.is_array()) throw format_error("table.elements must be an array");
    std::vector<LoopElement> elements;
    for (const auto& e : es) {
        if (!e.is_string()) throw format_error("table elements must be path expressions");
        elements.push_back(LoopElement::of(parse_path(g, e.get<std::string>())));
    }
    auto table = LyndonTable::from_elements(std::move(elements));
    if (doc.contains("lengths")) {
        const auto& ls = doc["lengths"];
        if (!ls.is_array() || ls.size() != table.size()) throw format_error("table.lengths must match table.elements");
        for (std::size_t i = 0; i < ls.size(); ++i) table.lengths[i] = detail::rational_value(ls[i], "table.lengths");
    }
    return table;
}

inline json table_to_json(const LyndonTable& t) {
    json elements = json::array();
    json lengths = json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        elements.push_back(format_loop(t.elements[i]));
        lengths.push_back(to_string(t.lengths[i]));
    }
    return {{"elements", std::move(elements)}, {"lengths", std::move(lengths)}};
}

// ---------------------------------------------------------------------------
// Morphisms: {vertex_map: {src: dst}, edge_map: [{src, dst, scale, flip}]}

inline GraphMorphism morphism_from_json(const json& doc, const GraphRef& source, const GraphRef& target) {
    const auto& vm = detail::field(doc, "vertex_map", "morphism");
    const auto& em = detail::field(doc, "edge_map", "morphism");
    if (!vm.is_object()) throw format_error("morphism.vertex_map must be an object");
    if (!em.is_array()) throw format_error("morphism.edge_map must be an array");
    std::vector<std::size_t> vertex_map(source->vertex_count(), target->vertex_count());
    for (const auto& [src, dst] : vm.items()) {
        if (!dst.is_string()) throw format_error("morphism.vertex_map values must be vertex names");
        vertex_map[source->vertex_index(src)] = target->vertex_index(dst.get<std::string>());
    }
    for (std::size_t v = 0; v < vertex_map.size(); ++v) {
        if (vertex_map[v] == target->vertex_count()) throw format_error("morphism.vertex_map misses vertex '" + source->vertex_name(v) + "'");
    }
    std::vector<std::optional<EdgeImage>> images(source->edge_count());
    for (std::size_t i = 0; i < em.size(); ++i) {
        const auto where = "morphism.edge_map[" + std::to_string(i) + "]";
        const auto src = source->edge_index(detail::string_field(em[i], "src", where));
        EdgeImage img{target->edge_index(detail::string_field(em[i], "dst", where)),
                      detail::rational_value(detail::field(em[i], "scale", where), where + ".scale"), false};
        if (em[i].contains("flip")) {
            if (!em[i]["flip"].is_boolean()) throw format_error(where + ".flip must be a boolean");
            img.flip = em[i]["flip"].get<bool>();
        }
        if (images[src]) throw format_error(where + " maps edge '" + source->edge(src).id + "' twice");
        images[src] = img;
    }
    std::vector<EdgeImage> edge_map;
    for (std::size_t e = 0; e < images.size(); ++e) {
        if (!images[e]) throw format_error("morphism.edge_map misses edge '" + source->edge(e).id + "'");
        edge_map.push_back(*images[e]);
    }
    return GraphMorphism(source, target, std::move(vertex_map), std::move(edge_map));
}

inline json morphism_to_json(const GraphMorphism& m) {
    json vm = json::object();
    for (std::size_t v = 0; v < m.vertex_map().size(); ++v) vm[m.source()->vertex_name(v)] = m.target()->vertex_name(m.vertex_map()[v]);
    json em = json::array();
    for (std::size_t e = 0; e < m.edge_map().size(); ++e) {
        const auto& img = m.edge_map()[e];
        em.push_back({{"src", m.source()->edge(e).id}, {"dst", m.target()->edge(img.target).id}, {"scale", to_string(img.scale)},
                      {"flip", img.flip}});
    }
    return {{"vertex_map", std::move(vm)}, {"edge_map", std::move(em)}};
}

} // namespace rtree_cover

#endif // RTREE_COVER_GRAPH_IO_HPP
