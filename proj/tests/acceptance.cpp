// Acceptance run: one PASS/FAIL line per criterion, each with its own time
// budget. Exact arithmetic throughout, so every comparison has tolerance zero.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rtree_cover/rtree_cover.hpp"

using namespace rtree_cover;

namespace {

/// Outcome of one criterion: instances checked and the first few failures.
struct Tally {
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        ++instances;
        if (ok) return;
        ++failures;
        if (notes.size() < 5) notes.push_back(what);
    }

    void absorb(const CheckReport& r) {
        instances += r.instances;
        failures += r.violations.size();
        for (const auto& v : r.violations) {
            if (notes.size() >= 5) break;
            std::string w;
            for (const auto& x : v.witness) w += (w.empty() ? "" : " | ") + x;
            notes.push_back(r.check + ": " + v.reason + " [" + w + "]");
        }
    }
};

struct Criterion {
    int id;
    std::string title;
    double budget_seconds;
    std::function<void(Tally&)> body;
};

GraphRef rose(std::size_t n) { return share(build_unit_rose(n)); }
GraphRef hawaiian(std::size_t n) { return share(build_hawaiian_truncation(n)); }

/// Three circles of lengths 1, 2, 3/2 between two vertices, based inside the
/// second one: exercises interior basepoints and non-unit lengths.
GraphRef theta() {
    return share(MetricGraph({"p", "q"}, {{"s", 0, 1, make_rational(1)}, {"t", 0, 1, make_rational(2)}, {"w", 0, 1, make_rational(3, 2)}},
                             GraphPoint::inside_edge(1, make_rational(1, 2))));
}

std::string show(const oracle::Word& w) {
    std::string out;
    for (int x : w) out += (out.empty() ? "" : " ") + std::to_string(x);
    return "(" + out + ")";
}

// 1 -------------------------------------------------------------------------
void free_group_oracle(Tally& t) {
    for (int gens : {2, 3}) {
        const auto g = rose(static_cast<std::size_t>(gens));
        const auto check_word = [&](const oracle::Word& w, std::size_t split) {
            const auto reduced = oracle::free_reduce(w);
            const auto nf = oracle::path_word(normalize(oracle::word_path(g, w)));
            t.expect(nf && *nf == reduced, "normalize " + show(w));
            const oracle::Word u(w.begin(), w.begin() + static_cast<long>(split));
            const oracle::Word v(w.begin() + static_cast<long>(split), w.end());
            const auto prod = star(LoopElement::of(oracle::word_path(g, u)), LoopElement::of(oracle::word_path(g, v)));
            const auto pw = oracle::path_word(prod.path());
            t.expect(pw && *pw == reduced, "star " + show(u) + " " + show(v));
        };
        for (int len = 0; len <= 6; ++len) {
            for (const auto& w : oracle::all_words(gens, len)) {
                for (std::size_t split = 0; split <= w.size(); ++split) check_word(w, split);
            }
        }
        std::mt19937_64 rng(1000 + static_cast<unsigned>(gens));
        std::uniform_int_distribution<int> len_dist(7, 40), letter(1, gens), sign(0, 1);
        for (int i = 0; i < 10000; ++i) {
            oracle::Word w(static_cast<std::size_t>(len_dist(rng)));
            for (auto& x : w) x = sign(rng) ? letter(rng) : -letter(rng);
            check_word(w, std::uniform_int_distribution<std::size_t>(0, w.size())(rng));
        }
    }
}

// 2 -------------------------------------------------------------------------
void metric_and_hyperbolicity(Tally& t) {
    std::uint64_t seed = 200;
    for (const auto& g : {rose(2), hawaiian(4)}) {
        PathSampler s(g, seed++);
        for (int i = 0; i < 1000; ++i) {
            std::vector<TreePoint> pts;
            for (int k = 0; k < 4; ++k) pts.emplace_back(s.random_tree_path());
            t.absorb(check_metric_axioms(pts));
            t.absorb(check_zero_hyperbolic(pts));
            t.absorb(check_four_point(pts));
        }
    }
}

// 3 -------------------------------------------------------------------------
void distance_formula(Tally& t) {
    std::uint64_t seed = 300;
    for (const auto& g : {rose(2), hawaiian(4), theta()}) {
        PathSampler s(g, seed++);
        for (int i = 0; i < 334; ++i) {
            const TreePoint a(s.random_tree_path()), b(s.random_tree_path());
            const auto quotient = normalize(concat(inverse(a.path()), b.path()));
            t.expect(dbar(a, b) == length(quotient), "d(" + format_point(a) + ", " + format_point(b) + ")");
        }
    }
    // Full-word points of the rose: distance is the reduced length of u^-1 v.
    const auto g = rose(2);
    std::mt19937_64 rng(301);
    std::uniform_int_distribution<int> len(0, 8), letter(1, 2), sign(0, 1);
    for (int i = 0; i < 1000; ++i) {
        oracle::Word u(static_cast<std::size_t>(len(rng))), v(static_cast<std::size_t>(len(rng)));
        for (auto& x : u) x = sign(rng) ? letter(rng) : -letter(rng);
        for (auto& x : v) x = sign(rng) ? letter(rng) : -letter(rng);
        const auto expected = oracle::free_reduce(oracle::join(oracle::invert(u), v)).size();
        const auto d = dbar(TreePoint::of(oracle::word_path(g, u)), TreePoint::of(oracle::word_path(g, v)));
        t.expect(d == Rational(static_cast<long>(expected)), "word distance " + show(u) + " " + show(v));
    }
}

// 4 -------------------------------------------------------------------------
void group_action(Tally& t) {
    std::uint64_t seed = 400;
    for (const auto& g : {rose(2), hawaiian(4), theta()}) {
        PathSampler s(g, seed++);
        const int count = g->edge_count() == 2 ? 168 : 166;
        for (int i = 0; i < count; ++i) {
            const LoopElement gamma(s.random_nontrivial_loop());
            const TreePoint a(s.random_tree_path()), b(s.random_tree_path());
            const auto ga = act(gamma, a);
            t.expect(dbar(ga, act(gamma, b)) == dbar(a, b), "isometry " + format_loop(gamma));
            t.expect(ga != a, "free " + format_loop(gamma) + " on " + format_point(a));
            t.expect(fiber_transporter(a, ga) == gamma, "transporter " + format_point(a));
            const bool same_fibre = endpoint_map(a) == endpoint_map(b);
            bool related = false;
            try {
                related = act(fiber_transporter(a, b), a) == b;
            } catch (const group_error&) {
            }
            t.expect(related == same_fibre, "orbit vs fibre " + format_point(a) + ", " + format_point(b));
        }
    }
    // Exhaustive short words on the rose, including half-edge points.
    const auto g = rose(2);
    std::vector<LoopElement> loops{LoopElement::identity(g)};
    std::vector<TreePoint> points{TreePoint::base(g)};
    for (const auto& w : oracle::reduced_words_up_to(2, 4)) {
        loops.emplace_back(oracle::word_path(g, w));
        points.emplace_back(oracle::word_path(g, w));
        if (w.size() <= 2) {
            for (const char* tail : {"a+[0:1/2]", "b-[1:1/3]"}) points.push_back(TreePoint::of(concat(oracle::word_path(g, w), parse_path(g, tail))));
        }
    }
    for (const auto& gamma : loops) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto moved = act(gamma, points[i]);
            t.expect((moved == points[i]) == gamma.is_identity(), "free " + format_loop(gamma));
            t.expect(fiber_transporter(points[i], moved) == gamma, "transporter " + format_loop(gamma));
            if (i % 7 == 0) {
                for (std::size_t j = 0; j < points.size(); j += 5) {
                    t.expect(dbar(moved, act(gamma, points[j])) == dbar(points[i], points[j]), "isometry " + format_loop(gamma));
                }
            }
        }
    }
}

// 5 -------------------------------------------------------------------------
void lyndon_axioms(Tally& t) {
    std::uint64_t seed = 500;
    for (const auto& g : {rose(2), hawaiian(4)}) {
        PathSampler s(g, seed++);
        for (int table = 0; table < 25; ++table) {
            const std::size_t size = 2 + s.uniform(29);
            std::vector<LoopElement> elems{LoopElement::identity(g)};
            while (elems.size() < size) elems.emplace_back(s.random_loop());
            const auto lt = LyndonTable::from_elements(elems);
            t.absorb(check_lyndon_axioms(lt));
            for (std::size_t i = 0; i < lt.size(); ++i) {
                t.expect((lt.lengths[i] == 0) == lt.elements[i].is_identity(), "definiteness " + format_loop(lt.elements[i]));
            }
        }
    }
    // Broken length functions are caught.
    const auto g = rose(2);
    auto bad = LyndonTable::from_elements({LoopElement::identity(g), LoopElement::of(parse_path(g, "a+"))});
    bad.lengths[1] = 0;
    t.expect(!check_lyndon_axioms(bad).passed(), "zero length on a nontrivial element is rejected");
}

// 6 -------------------------------------------------------------------------
void power_lengths(Tally& t) {
    std::uint64_t seed = 600;
    for (const auto& g : {rose(2), hawaiian(4), theta()}) {
        PathSampler s(g, seed++);
        const int count = g->edge_count() == 2 ? 34 : 33;
        for (int i = 0; i < count; ++i) {
            const LoopElement c(s.random_nontrivial_loop());
            const auto d = loop_decompose(c);
            t.expect(recompose(d) == c.path(), "decomposition recomposes " + format_loop(c));
            for (long n = -10; n <= 10; ++n) {
                RhoPath raw = RhoPath::identity(g);
                const auto piece = n >= 0 ? c.path() : inverse(c.path());
                for (long k = 0; k < (n >= 0 ? n : -n); ++k) raw = concat(raw, piece);
                const Rational explicit_length = length(normalize(raw));
                if (n == 0) {
                    t.expect(explicit_length == 0, "zeroth power");
                    continue;
                }
                const Rational formula = 2 * length(d.alpha) + Rational(n >= 0 ? n : -n) * length(d.beta);
                t.expect(formula == explicit_length, format_loop(c) + " ^ " + std::to_string(n));
                t.expect(power_length(c, n).agree(), "power_length " + format_loop(c) + " ^ " + std::to_string(n));
            }
        }
    }
}

// 7 -------------------------------------------------------------------------
void tree_from_lengths(Tally& t) {
    const auto g = rose(2);
    const auto e = LoopElement::identity(g);
    const auto a = LoopElement::of(parse_path(g, "a+"));
    const auto b = LoopElement::of(parse_path(g, "b+"));
    const auto ab = LoopElement::of(parse_path(g, "a+ b+"));
    const auto small = build_tree(LyndonTable::from_elements({e, a, b, ab}));
    t.expect(tree_distance(small, b, ab) == 3, "d(b, ab) = 3");
    t.expect(tree_distance(small, a, b) == 2, "d(a, b) = 2");
    t.expect(tree_distance(small, e, ab) == 2, "d(e, ab) = 2");
    t.expect(tree_distance(small, a, ab) == 1, "d(a, ab) = 1");
    t.expect(tree_distance(small, e, a) == 1 && tree_distance(small, e, b) == 1, "d(e, a) = d(e, b) = 1");

    std::uint64_t seed = 700;
    std::mt19937_64 rng(799);
    for (const auto& g2 : {rose(2), hawaiian(4)}) {
        PathSampler s(g2, seed++);
        for (int table = 0; table < 5; ++table) {
            std::vector<LoopElement> elems{LoopElement::identity(g2)};
            while (elems.size() < 20) {
                LoopElement x(s.random_loop());
                if (std::find(elems.begin(), elems.end(), x) == elems.end()) elems.push_back(x);
            }
            const auto lt = LyndonTable::from_elements(elems);
            t.absorb(cross_validate(lt));
            const auto tree = build_tree(lt);
            for (int perm = 0; perm < 10; ++perm) {
                auto shuffled = elems;
                std::shuffle(shuffled.begin(), shuffled.end(), rng);
                const auto other = build_tree(LyndonTable::from_elements(shuffled));
                bool same = other.node_count() == tree.node_count();
                for (std::size_t i = 0; same && i < elems.size(); ++i) {
                    for (std::size_t j = i + 1; j < elems.size(); ++j) {
                        if (tree_distance(other, elems[i], elems[j]) != tree_distance(tree, elems[i], elems[j])) same = false;
                    }
                }
                t.expect(same, "insertion order " + std::to_string(perm));
            }
        }
    }
}

// 8 -------------------------------------------------------------------------
void lifting(Tally& t) {
    std::uint64_t seed = 800;
    std::size_t non_normal = 0;
    for (const auto& g : {rose(2), hawaiian(4), theta()}) {
        PathSampler s(g, seed++);
        const int count = g->edge_count() == 2 ? 68 : 66;
        for (int i = 0; i < count; ++i) {
            const auto c = s.random_path(true, true);
            if (!is_canonical(c)) ++non_normal;
            const auto expr = format_path(c);
            const auto lifted = lift_path(c);
            for (std::size_t k = 0; k < lifted.params.size(); ++k) {
                t.expect(endpoint_map(lifted.points[k]) == point_at(c, lifted.params[k]), "projection " + expr);
                for (std::size_t j = k + 1; j < lifted.params.size(); ++j) {
                    t.expect(dbar(lifted.points[k], lifted.points[j]) <= lifted.params[j] - lifted.params[k], "1-Lipschitz " + expr);
                }
            }
            t.expect(lifted.points.front() == TreePoint::base(g), "lift starts at the base " + expr);
            t.expect(lifted.final_point() == TreePoint::of(c), "lift ends at the normal form " + expr);
            t.expect(check_lift_uniqueness(c, lifted).status == LiftStatus::agree, "self agreement " + expr);
            if (lifted.params.size() > 1) {
                const auto k = 1 + s.uniform(lifted.params.size() - 1);
                auto moved = lifted;
                moved.points[k] = act(LoopElement(s.random_nontrivial_loop()), moved.points[k]);
                t.expect(check_lift_uniqueness(c, moved).status == LiftStatus::disagree, "translated alternative " + expr);
                auto off = lifted;
                off.points[k] = off.points[k - 1];
                if (endpoint_map(off.points[k]) != endpoint_map(lifted.points[k])) {
                    t.expect(check_lift_uniqueness(c, off).status == LiftStatus::not_a_lift, "displaced alternative " + expr);
                }
            }
        }
    }
    t.expect(non_normal >= 50, "sample includes non-normal paths (" + std::to_string(non_normal) + ")");
    const auto g = rose(2);
    const auto back = lift_path(parse_path(g, "a+ a-"), std::vector<Rational>{Rational(0), Rational(1), Rational(2)});
    t.expect(back.points[1] == TreePoint::of(parse_path(g, "a+")), "lift of a+ a- at 1 is a+");
    t.expect(back.points[2] == TreePoint::base(g), "lift of a+ a- at 2 is the base");
}

// 9 -------------------------------------------------------------------------
void basepoint_change(Tally& t) {
    std::uint64_t seed = 900;
    for (const auto& g : {rose(2), hawaiian(4), theta()}) {
        PathSampler s(g, seed++);
        const int count = g->edge_count() == 2 ? 68 : 66;
        for (int i = 0; i < count; ++i) {
            const auto k = normalize(inverse(s.random_path(false, true)));
            const auto tr = basepoint_transport(k);
            const TreePoint c1(s.random_tree_path()), c2(s.random_tree_path());
            const LoopElement gamma(s.random_loop()), delta(s.random_loop());
            const auto where = format_path(k) + " / " + format_point(c1);
            t.expect(dbar(tr.map_point(c1), tr.map_point(c2)) == dbar(c1, c2), "isometry " + where);
            t.expect(tr.map_point(act(gamma, c1)) == act(tr.map_loop(gamma), tr.map_point(c1)), "equivariance " + where);
            t.expect(tr.map_loop(star(gamma, delta)) == star(tr.map_loop(gamma), tr.map_loop(delta)), "homomorphism " + where);
            t.expect(tr.unmap_point(tr.map_point(c1)) == c1, "inverse " + where);
        }
    }
}

// 10 ------------------------------------------------------------------------
void truncation_embedding(Tally& t) {
    const auto h2 = hawaiian(2);
    const auto h3 = hawaiian(3);
    const auto m = hawaiian_shift(h2, h3, 1);
    PathSampler s(h2, 1000);
    for (int i = 0; i < 200; ++i) {
        const LoopElement x(s.random_loop()), y(s.random_loop());
        t.expect(induced_hom(m, star(x, y)) == star(induced_hom(m, x), induced_hom(m, y)), "homomorphism " + format_loop(x));
    }
    std::set<std::string> images;
    std::size_t words = 0;
    for (const auto& w : oracle::reduced_words_up_to(2, 4)) {
        const auto image = induced_hom(m, LoopElement(oracle::word_path(h2, w)));
        t.expect(!image.is_identity(), "kernel " + show(w));
        images.insert(format_loop(image));
        ++words;
    }
    t.expect(images.size() == words, "distinct images on short words");
    std::vector<RhoPath> trials;
    for (int i = 0; i < 50; ++i) trials.push_back(m.push_forward(s.random_nontrivial_loop()));
    const auto url = check_url_criterion(m, trials);
    bool length_failure = false;
    for (const auto& v : url.violations) length_failure = length_failure || v.reason == "lift changes length";
    t.expect(!url.passed() && length_failure, "scaled embedding fails length preservation");
    t.expect(check_url_criterion(GraphMorphism::identity(h3), trials).passed(), "identity satisfies the criterion");
}

// 11 ------------------------------------------------------------------------
void sequence_encoding(Tally& t) {
    const auto minus = [](const std::vector<int>& x) {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == -1) out.push_back(i + 1);
        }
        return out;
    };
    t.expect(minus(zastrow_encode({1}, 64)) == std::vector<std::size_t>{2}, "z = (1)");
    t.expect(minus(zastrow_encode({1, 1}, 64)) == std::vector<std::size_t>{2, 6}, "z = (1, 1)");
    // Every sequence whose positions up to 64 differ: all compositions with
    // partial sums below 7, closed by a large entry.
    std::vector<std::vector<std::uint64_t>> seqs;
    const std::function<void(std::vector<std::uint64_t>, std::uint64_t)> grow = [&](std::vector<std::uint64_t> z, std::uint64_t sum) {
        if (!z.empty()) {
            auto closed = z;
            closed.push_back(10);
            seqs.push_back(closed);
        }
        for (std::uint64_t next = 1; sum + next <= 7; ++next) {
            auto longer = z;
            longer.push_back(next);
            grow(longer, sum + next);
        }
    };
    grow({}, 0);
    for (const auto& z : seqs) {
        const auto xz = zastrow_encode(z, 64);
        for (const auto& w : seqs) {
            if (z[0] == w[0]) continue;
            const auto xw = zastrow_encode(w, 64);
            for (auto p : zastrow_positions(z, 64)) t.expect(xz[p - 1] != xw[p - 1], "position " + std::to_string(p));
            for (auto p : zastrow_positions(w, 64)) t.expect(xz[p - 1] != xw[p - 1], "position " + std::to_string(p));
        }
    }
}

// 12 ------------------------------------------------------------------------
void valency(Tally& t) {
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto g = rose(n);
        const auto r = valency_check(TreePoint::base(g));
        t.expect(r.directions == 2 * n && r.passed(), "rose " + std::to_string(n) + " at the base");
        PathSampler s(g, 1200 + n);
        for (int i = 0; i < 20; ++i) {
            const auto loop = s.random_loop();
            const auto p = TreePoint::of(concat(loop, parse_path(g, "a+[0:1/3]")));
            const auto inner = valency_check(p);
            t.expect(inner.directions == 2 && inner.passed(), "interior " + format_point(p));
            const auto at_vertex = valency_check(TreePoint(loop));
            t.expect(at_vertex.directions == 2 * n && at_vertex.passed(), "vertex " + format_path(loop));
        }
    }
    const auto th = theta();
    const auto r = valency_check(TreePoint::base(th));
    t.expect(r.directions == 2 && r.passed(), "interior basepoint");
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "free-group oracle on roses", 10, free_group_oracle},
        {2, "metric, 0-hyperbolicity, four-point", 30, metric_and_hyperbolicity},
        {3, "distance equals reduced quotient length", 10, distance_formula},
        {4, "isometric free action, orbits are fibres", 30, group_action},
        {5, "length function axioms", 30, lyndon_axioms},
        {6, "power length formula", 30, power_lengths},
        {7, "tree from length function", 30, tree_from_lengths},
        {8, "unique lifting of paths", 30, lifting},
        {9, "basepoint transport", 10, basepoint_change},
        {10, "truncation embedding", 30, truncation_embedding},
        {11, "sequence encoding", 1, sequence_encoding},
        {12, "valency", 1, valency},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const auto& c : all) {
        if (!selected.empty() && !selected.count(c.id)) continue;
        Tally t;
        std::string error_text;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(t);
        } catch (const std::exception& e) {
            error_text = e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool ok = error_text.empty() && t.failures == 0 && t.instances > 0 && secs < c.budget_seconds;
        failed += !ok;
        std::printf("[%s] %2d %-42s %9zu checks, %zu failed, %.2f s (budget %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    t.instances, t.failures, secs, c.budget_seconds);
        if (!error_text.empty()) std::printf("       exception: %s\n", error_text.c_str());
        for (const auto& n : t.notes) std::printf("       %s\n", n.c_str());
    }
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
