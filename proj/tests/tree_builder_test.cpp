#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rtree_cover/random_paths.hpp"
#include "rtree_cover/tree_builder.hpp"

namespace {

using namespace rtree_cover;

Rational q(long n, long d = 1) { return make_rational(n, d); }

class TreeBuilderTest : public ::testing::Test {
protected:
    GraphRef r2 = share(build_unit_rose(2));
    LoopElement l(const std::string& expr) const { return LoopElement::of(parse_path(r2, expr)); }
    LyndonTable small() const { return LyndonTable::from_elements({l(""), l("a+"), l("b+"), l("a+ b+")}); }
};

/// Pairwise label distances by Floyd-Warshall over the exported edge list.
std::vector<std::vector<Rational>> edge_list_distances(const WeightedTree& t) {
    const auto n = t.node_count();
    std::vector<std::vector<std::optional<Rational>>> d(n, std::vector<std::optional<Rational>>(n));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = Rational(0);
    for (const auto& e : t.edges()) d[e.u][e.v] = d[e.v][e.u] = e.length;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] && d[k][j] && (!d[i][j] || *d[i][k] + *d[k][j] < *d[i][j])) d[i][j] = Rational(*d[i][k] + *d[k][j]);
    const auto m = t.names().size();
    std::vector<std::vector<Rational>> out(m, std::vector<Rational>(m));
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) out[a][b] = *d[t.node_of(a)][t.node_of(b)];
    return out;
}

TEST_F(TreeBuilderTest, FourElementExample) {
    const auto tree = build_tree(small());
    EXPECT_EQ(tree_distance(tree, l("b+"), l("a+ b+")), 3);
    EXPECT_EQ(tree_distance(tree, l("a+"), l("b+")), 2);
    EXPECT_EQ(tree_distance(tree, l(""), l("a+ b+")), 2);
    EXPECT_EQ(tree_distance(tree, l("a+"), l("a+")), 0);
    // The path b - e - a - ab with unit edges and no branch points.
    EXPECT_EQ(tree.node_count(), 4u);
    ASSERT_EQ(tree.edges().size(), 3u);
    for (const auto& e : tree.edges()) EXPECT_EQ(e.length, 1);
    EXPECT_EQ(tree.node_of(0), 0u);
    EXPECT_THROW(tree_distance(tree, l("a+"), l("b-")), group_error);
}

TEST_F(TreeBuilderTest, TinyTables) {
    const auto one = build_tree(LyndonTable::from_elements({l("")}));
    EXPECT_EQ(one.node_count(), 1u);
    EXPECT_TRUE(one.edges().empty());

    const auto two = build_tree(LyndonTable::from_elements({l(""), l("a+ b- a-")}));
    ASSERT_EQ(two.edges().size(), 1u);
    EXPECT_EQ(two.edges()[0].length, 3);

    // Without the identity the root is an unlabeled point.
    const auto rootless = build_tree(LyndonTable::from_elements({l("a+"), l("a- b+")}));
    EXPECT_FALSE(rootless.nodes()[0].label.has_value());
    EXPECT_EQ(tree_distance(rootless, 0, 1), 3);
}

TEST_F(TreeBuilderTest, BranchPointsAreSharedAtEqualDepth) {
    // a b, a b-, a a all split from a at depth 1.
    const auto tree = build_tree(LyndonTable::from_elements({l("a+ b+"), l("a+ b-"), l("a+ a+"), l("")}));
    EXPECT_EQ(tree.node_count(), 5u);
    std::size_t unlabeled = 0;
    for (const auto& n : tree.nodes()) unlabeled += !n.label;
    EXPECT_EQ(unlabeled, 1u);
}

TEST_F(TreeBuilderTest, RejectsBrokenTables) {
    auto table = small();
    table.lengths[1] = 2;
    EXPECT_THROW(build_tree(table), group_error);
}

TEST(TreeRealizability, FourCycleIsRejectedWithFourPointWitness) {
    // Unit square x - z - y - root - x.
    std::vector<std::vector<Rational>> d{{q(0), q(2), q(1), q(1)}, {q(2), q(0), q(1), q(1)}, {q(1), q(1), q(0), q(2)},
                                         {q(1), q(1), q(2), q(0)}};
    try {
        TreeBuilder(d, {"x", "y", "z"}).build();
        FAIL() << "expected a realizability error";
    } catch (const realizability_error& e) {
        EXPECT_EQ(e.witness(), (std::vector<std::string>{"x", "y", "z", "root"}));
    }
}

TEST(TreeRealizability, TriangleFailureIsRejected) {
    std::vector<std::vector<Rational>> d{{q(0), q(5), q(1)}, {q(5), q(0), q(1)}, {q(1), q(1), q(0)}};
    EXPECT_THROW(TreeBuilder(d, {"x", "y"}).build(), realizability_error);
    EXPECT_THROW(TreeBuilder(d, {"x"}).build(), error);
}

TEST(TreeRealizability, ZeroDistanceDuplicatesAreRejected) {
    std::vector<std::vector<Rational>> d{{q(0), q(0), q(1)}, {q(0), q(0), q(1)}, {q(1), q(1), q(0)}};
    EXPECT_THROW(TreeBuilder(d, {"x", "y"}).build(), realizability_error);
}

TEST(TreeRealizability, RandomTreeMetricsAreRecovered) {
    // Oracle: distances on a random weighted tree.
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng() % 10;
        std::vector<std::size_t> parent(n);
        std::vector<Rational> up(n);
        for (std::size_t i = 1; i < n; ++i) {
            parent[i] = rng() % i;
            up[i] = make_rational(static_cast<long>(1 + rng() % 5), static_cast<long>(1 + rng() % 3));
        }
        const auto dist = [&](std::size_t a, std::size_t b) {
            std::map<std::size_t, Rational> anc;
            Rational acc(0);
            for (std::size_t x = a;; x = parent[x]) {
                anc[x] = acc;
                if (x == 0) break;
                acc += up[x];
            }
            acc = 0;
            for (std::size_t x = b;; x = parent[x]) {
                if (anc.count(x)) return Rational(acc + anc[x]);
                acc += up[x];
            }
        };
        // Points 1..n-1, root is vertex 0 and goes last.
        std::vector<std::size_t> order(n - 1);
        std::iota(order.begin(), order.end(), std::size_t{1});
        std::shuffle(order.begin(), order.end(), rng);
        order.push_back(0);
        std::vector<std::vector<Rational>> d(n, std::vector<Rational>(n));
        std::vector<std::string> names;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i][j] = dist(order[i], order[j]);
        for (std::size_t i = 0; i + 1 < n; ++i) names.push_back("v" + std::to_string(order[i]));
        const auto tree = TreeBuilder(d, names).build();
        const auto got = edge_list_distances(tree);
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = 0; j + 1 < n; ++j) EXPECT_EQ(got[i][j], d[i][j]);
        EXPECT_LE(tree.node_count(), 2 * n);
    }
}

TEST_F(TreeBuilderTest, ExportFormats) {
    const auto tree = build_tree(small());
    const auto dot = to_dot(tree);
    EXPECT_NE(dot.find("graph T {"), std::string::npos);
    EXPECT_NE(dot.find("n0 [label=\"e\"]"), std::string::npos);
    EXPECT_NE(dot.find("[label=\"a+ b+\"]"), std::string::npos);
    EXPECT_NE(dot.find("-- n"), std::string::npos);
    const auto j = to_json(tree);
    EXPECT_EQ(j["nodes"].size(), 4u);
    EXPECT_EQ(j["edges"].size(), 3u);
    EXPECT_EQ(j["nodes"][0]["label"], "e");
    EXPECT_EQ(j["edges"][0]["length"], "1");
    const auto split = build_tree(LyndonTable::from_elements({l("a+ b+"), l("a+ b-")}));
    EXPECT_NE(to_dot(split).find("shape=point"), std::string::npos);
    EXPECT_TRUE(to_json(split)["nodes"][0]["label"].is_null());
}

TEST_F(TreeBuilderTest, CrossValidationExamples) {
    const auto r = cross_validate(small());
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.instances, 4u + 6u);
    EXPECT_TRUE(cross_validate(LyndonTable::from_elements({l("")})).passed());
}

TEST_F(TreeBuilderTest, ActionOnClosedTable) {
    std::vector<LoopElement> elems{l("")};
    for (const auto& w : oracle::reduced_words_up_to(2, 3)) elems.emplace_back(oracle::word_path(r2, w));
    const auto tree = build_tree(LyndonTable::from_elements(elems));
    std::vector<std::size_t> domain;
    for (std::size_t i = 0; i < elems.size(); ++i)
        if (lyndon_length(elems[i]) <= 2) domain.push_back(i);
    const auto act = act_on_tree(tree, l("a+"), domain);
    EXPECT_TRUE(act.report.passed()) << act.report.to_json().dump();
    EXPECT_EQ(act.mapping.size(), domain.size());

    const auto id = act_on_tree(tree, l(""), domain);
    for (const auto& [h, gh] : id.mapping) EXPECT_EQ(h, gh);
    EXPECT_TRUE(id.report.passed());

    EXPECT_THROW(act_on_tree(tree, l("a+ a+"), domain), group_error);
}

TEST_F(TreeBuilderTest, ActionIsFreeOnShortWords) {
    std::vector<LoopElement> elems{l("")};
    for (const auto& w : oracle::reduced_words_up_to(2, 4)) elems.emplace_back(oracle::word_path(r2, w));
    const auto tree = build_tree(LyndonTable::from_elements(elems));
    for (const auto& w : oracle::reduced_words_up_to(2, 2)) {
        const LoopElement g(oracle::word_path(r2, w));
        const auto act = act_on_tree(tree, g);
        EXPECT_TRUE(act.report.passed());
        EXPECT_GE(act.mapping.size(), 1u + 4u + 12u - 4u);
        for (const auto& [h, gh] : act.mapping) EXPECT_NE(h, gh);
    }
}

TEST_F(TreeBuilderTest, MinimalityExamples) {
    const auto half = TreePoint::of(parse_path(r2, "a+[0:1/2]"));
    const auto ext = extend_to_loop(half);
    ASSERT_TRUE(ext.has_value());
    EXPECT_EQ(format_loop(*ext), "a+");
    EXPECT_EQ(extend_to_loop(TreePoint::base(r2)), LoopElement::identity(r2));
    EXPECT_TRUE(check_minimality_span({half, TreePoint::base(r2)}).passed());

    const auto whiskered = share(attach_segment(build_unit_rose(2), GraphPoint::at_vertex(0), q(1, 2)).with_basepoint(GraphPoint::at_vertex(0)));
    const auto tip = TreePoint::of(parse_path(whiskered, "s+"));
    EXPECT_FALSE(extend_to_loop(tip).has_value());
    const auto r = check_minimality_span({tip, TreePoint::of(parse_path(whiskered, "a+ s+[0:1/4]"))});
    ASSERT_EQ(r.violations.size(), 2u);
    EXPECT_EQ(r.violations[0].reason, "no loop extension: dead end");
    EXPECT_EQ(r.violations[0].witness[0], "s+");
}

TEST_F(TreeBuilderTest, MinimalityUsesSuppliedLoopsFirst) {
    const auto c = TreePoint::of(parse_path(r2, "a+ b+[0:1/3]"));
    const auto r = check_minimality_span({c}, {l("a+ b+ b+")});
    EXPECT_TRUE(r.passed());
}

TEST_F(TreeBuilderTest, ExtensionAvoidsTurningBack) {
    // From the middle of a going backwards, the shortest way home is to
    // finish the reverse traversal.
    const auto c = TreePoint::of(parse_path(r2, "b+ a-[1:1/3]"));
    const auto ext = extend_to_loop(c);
    ASSERT_TRUE(ext.has_value());
    EXPECT_EQ(format_loop(*ext), "b+ a-");

    // Theta graph: the way back from y must not reuse the arriving edge.
    const auto theta = share(MetricGraph({"x", "y"}, {{"p", 0, 1, q(1)}, {"r", 0, 1, q(3)}, {"t", 1, 0, q(2)}},
                                         GraphPoint::at_vertex(0)));
    const auto ext2 = extend_to_loop(TreePoint::of(parse_path(theta, "p+")));
    ASSERT_TRUE(ext2.has_value());
    EXPECT_EQ(format_loop(*ext2), "p+ t+");
}

TEST_F(TreeBuilderTest, ExtensionToInteriorBasepoint) {
    const auto mid = share(r2->with_basepoint(GraphPoint::inside_edge(0, q(1, 2))));
    const auto ext = extend_to_loop(TreePoint::of(parse_path(mid, "a+[1/2:1]")));
    ASSERT_TRUE(ext.has_value());
    EXPECT_EQ(format_loop(*ext), "a+[1/2:1] a+[0:1/2]");
    const auto ext1 = extend_to_loop(TreePoint::of(parse_path(mid, "a+[1/2:1] b+[0:1/2]")));
    ASSERT_TRUE(ext1.has_value());
    EXPECT_EQ(format_loop(*ext1), "a+[1/2:1] b+ a+[0:1/2]");
    const auto ext2 = extend_to_loop(TreePoint::of(parse_path(mid, "a+[1/2:1] a+[0:1/4]")));
    ASSERT_TRUE(ext2.has_value());
    EXPECT_EQ(format_loop(*ext2), "a+[1/2:1] a+[0:1/2]");
}

std::vector<GraphRef> sample_graphs() {
    return {share(build_unit_rose(2)), share(build_hawaiian_truncation(3)),
            share(MetricGraph({"x", "y"}, {{"e1", 0, 1, q(1)}, {"e2", 0, 1, q(1, 2)}, {"e3", 1, 0, q(2, 3)}},
                              GraphPoint::inside_edge(0, q(1, 3))))};
}

TEST(TreeBuilderProperties, TreeMatchesLengthsAndCoveringTree) {
    std::uint64_t seed = 5;
    for (const auto& g : sample_graphs()) {
        PathSampler sampler(g, seed++);
        std::vector<LoopElement> elems{LoopElement::identity(g)};
        while (elems.size() < 20) {
            LoopElement x(sampler.random_loop());
            if (std::find(elems.begin(), elems.end(), x) == elems.end()) elems.push_back(x);
        }
        const auto table = LyndonTable::from_elements(elems);
        const auto tree = build_tree(table);
        const auto d = edge_list_distances(tree);
        for (std::size_t i = 0; i < elems.size(); ++i) {
            EXPECT_EQ(tree_distance(tree, 0, i), lyndon_length(elems[i]));
            for (std::size_t j = 0; j < elems.size(); ++j) EXPECT_EQ(d[i][j], lyndon_length(star(invert(elems[i]), elems[j])));
        }
        EXPECT_TRUE(cross_validate(table).passed());
        EXPECT_FALSE(detail::four_point_violation(d).has_value());
    }
}

TEST(TreeBuilderProperties, InsertionOrderDoesNotMatter) {
    const auto g = share(build_hawaiian_truncation(3));
    PathSampler sampler(g, 77);
    std::vector<LoopElement> elems{LoopElement::identity(g)};
    while (elems.size() < 15) {
        LoopElement x(sampler.random_loop());
        if (std::find(elems.begin(), elems.end(), x) == elems.end()) elems.push_back(x);
    }
    const auto base_tree = build_tree(LyndonTable::from_elements(elems));
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto shuffled = elems;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto tree = build_tree(LyndonTable::from_elements(shuffled));
        EXPECT_EQ(tree.node_count(), base_tree.node_count());
        for (const auto& x : elems)
            for (const auto& y : elems) EXPECT_EQ(tree_distance(tree, x, y), tree_distance(base_tree, x, y));
    }
}

TEST(TreeBuilderProperties, RandomPointsAreSpannedByOrbit) {
    std::uint64_t seed = 15;
    for (const auto& g : sample_graphs()) {
        PathSampler sampler(g, seed++);
        std::vector<TreePoint> pts;
        for (int i = 0; i < 40; ++i) pts.emplace_back(sampler.random_tree_path());
        const auto r = check_minimality_span(pts);
        EXPECT_TRUE(r.passed()) << r.to_json().dump();
        for (const auto& c : pts) {
            const auto ext = extend_to_loop(c);
            ASSERT_TRUE(ext.has_value());
            EXPECT_EQ(prefix(ext->path(), c.depth()), c.path());
        }
    }
}

} // namespace
