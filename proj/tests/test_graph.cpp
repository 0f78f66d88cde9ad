#include <doctest.h>

#include <map>
#include <set>

#include "test_util.hpp"

using namespace perqwalk;

TEST_CASE("parse: three-vertex path") {
    auto g = tu::corpus("path3");
    CHECK(g.vertex_count() == 3);
    CHECK(g.edge_count() == 2);
    CHECK(g.edges[0].label == "B");
    CHECK(g.edges[1].label == "C");
    CHECK(g.has_rotation);
}

TEST_CASE("parse: single vertex, zero edges") {
    auto g = parse_graph_text("vertices 1\nvertex solo\n");
    CHECK(g.vertex_count() == 1);
    CHECK(g.edge_count() == 0);
}

TEST_CASE("parse: cube accepted, simple and bipartite") {
    auto g = tu::corpus("cube");
    CHECK(g.vertex_count() == 8);
    CHECK(g.edge_count() == 12);
    CHECK(is_bipartite(g).has_value());
}

TEST_CASE("parse errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_graph_text("vertices 2\nbogus stuff\n"),
                         doctest::Contains("line 2"), ParseError);
    CHECK_THROWS_AS(parse_graph_text("vertices 2\nvertex a\nvertex b\n"), ValidationError);
    CHECK_THROWS_AS(
        parse_graph_text("vertices 2\nedge E a b\nedge E b a\n"), ParseError);
    // duplicate label via distinct lines is a parse error; a parallel edge is validation
    CHECK_THROWS_AS(parse_graph_text("vertices 2\nedge E1 a b\nedge E2 a b\n"), ValidationError);
    CHECK_THROWS_AS(parse_graph_text("vertices 4\nedge E a b\nedge F c d\n"), ValidationError);
}

TEST_CASE("state graph: path with target degree 2 reproduces the six-edge basis") {
    auto g = tu::corpus("path3");
    auto sg = build_state_graph(g, 2);
    REQUIRE(sg.dim() == 6);
    int b1 = sg.directed_index(0, 0);
    int b2 = sg.directed_index(0, 1);
    int c1 = sg.directed_index(1, 1);
    int c2 = sg.directed_index(1, 2);
    CHECK(sg.partner(b1) == b2);
    CHECK(sg.partner(c2) == c1);
    auto a = sg.loops_of(0);
    auto d = sg.loops_of(2);
    REQUIRE(a.size() == 1);
    REQUIRE(d.size() == 1);
    CHECK(sg.partner(a[0]) == a[0]);
    CHECK(sg.partner(d[0]) == d[0]);
    CHECK(sg.loops_of(1).empty());
    // loops come after the real edges in each vertex's slot order
    CHECK(sg.out_edges[0].back() == a[0]);
}

TEST_CASE("state graph: cube gets no loops, single vertex gets three") {
    auto cube = build_state_graph(tu::corpus("cube"), 3);
    CHECK(cube.dim() == 24);
    CHECK(cube.loop_count() == 0);

    auto solo = build_state_graph(parse_graph_text("vertices 1\nvertex v\n"), 3);
    CHECK(solo.dim() == 3);
    CHECK(solo.loop_count() == 3);
    for (int i = 0; i < 3; ++i) CHECK(solo.partner(i) == i);
}

TEST_CASE("state graph: degree above target rejected") {
    CHECK_THROWS_AS(build_state_graph(tu::corpus("cube"), 2), ValidationError);
}

TEST_CASE("state graph invariants on the whole corpus") {
    for (const auto& name : tu::corpus_names()) {
        CAPTURE(name);
        auto g = tu::corpus(name);
        auto sg = build_state_graph(g, 3);
        int out_sum = 0;
        for (int v = 0; v < sg.vertex_count(); ++v) out_sum += sg.degree(v);
        CHECK(out_sum == sg.dim());
        int paired = 0;
        for (int i = 0; i < sg.dim(); ++i) {
            CHECK(sg.partner(sg.partner(i)) == i);
            CHECK((sg.partner(i) == i) == sg.edges[i].is_loop());
            if (!sg.edges[i].is_loop()) {
                ++paired;
                CHECK(sg.edges[i].structure_edge == sg.edges[sg.partner(i)].structure_edge);
                CHECK(sg.edges[i].origin == sg.edges[sg.partner(i)].target);
            }
        }
        CHECK(paired == 2 * g.edge_count());
    }
}

namespace {

// independent mini-tracer: next-half-edge map as a permutation, cycle lengths
std::vector<int> face_lengths_oracle(const StructureGraph& g) {
    std::map<std::pair<int, int>, std::pair<int, int>> next;
    for (int e = 0; e < g.edge_count(); ++e) {
        for (int u : {g.edges[e].a, g.edges[e].b}) {
            int v = g.other_end(e, u);
            const auto& rot = g.rotation[v];
            int k = 0;
            while (rot[k] != e) ++k;
            next[{e, u}] = {rot[(k + 1) % rot.size()], v};
        }
    }
    std::set<std::pair<int, int>> seen;
    std::vector<int> lens;
    for (const auto& [start, nx] : next) {
        if (seen.count(start)) continue;
        int len = 0;
        auto cur = start;
        while (!seen.count(cur)) {
            seen.insert(cur);
            ++len;
            cur = next[cur];
        }
        lens.push_back(len);
    }
    std::sort(lens.begin(), lens.end());
    return lens;
}

}  // namespace

TEST_CASE("faces: cube has six quadrilaterals, all even") {
    auto g = tu::corpus("cube");
    auto fs = faces(g);
    REQUIRE(fs.all.size() == 6);
    for (const auto& f : fs.all) {
        CHECK(f.length() == 4);
        CHECK(f.even());
    }
    // hinted outer face is the bottom square
    std::set<std::string> outer;
    for (const auto& h : fs.all[fs.outer_index].boundary)
        outer.insert(g.edges[h.edge].label);
    CHECK(outer == std::set<std::string>{"X01", "Y13", "X23", "Y02"});
}

TEST_CASE("faces: triangle splits into two odd faces") {
    auto fs = faces(tu::corpus("triangle"));
    REQUIRE(fs.all.size() == 2);
    CHECK(!fs.all[0].even());
    CHECK(!fs.all[1].even());
}

TEST_CASE("faces: honeycomb patch interior faces are hexagons") {
    auto g = tu::corpus("honeycomb");
    auto fs = faces(g);
    std::vector<int> lens;
    for (const auto& f : fs.all) lens.push_back(f.length());
    std::sort(lens.begin(), lens.end());
    CHECK(lens == face_lengths_oracle(g));
    CHECK(lens == std::vector<int>{6, 6, 10});
    for (const auto* f : fs.inner()) CHECK(f->length() == 6);
}

TEST_CASE("faces: every directed structure edge lies on exactly one face") {
    for (const auto& name : tu::corpus_names()) {
        CAPTURE(name);
        auto g = tu::corpus(name);
        auto fs = faces(g);
        std::set<std::pair<int, int>> seen;
        int total = 0;
        for (const auto& f : fs.all)
            for (const auto& h : f.boundary) {
                CHECK(!seen.count({h.edge, h.origin}));
                seen.insert({h.edge, h.origin});
                ++total;
            }
        CHECK(total == 2 * g.edge_count());
        CHECK(face_lengths_oracle(g).size() == fs.all.size());
    }
}

TEST_CASE("faces: broken rotation fails the Euler check") {
    auto g = tu::corpus("cube");
    std::swap(g.rotation[0][0], g.rotation[0][1]);
    g.finalize();
    CHECK_THROWS_AS(faces(g), ValidationError);
}

TEST_CASE("faces: missing rotation is rejected") {
    auto g = parse_graph_text("vertices 2\nedge E a b\n");
    CHECK_THROWS_AS(faces(g), ValidationError);
}

TEST_CASE("bipartiteness matches a fresh 2-coloring oracle") {
    for (const auto& name : tu::corpus_names()) {
        CAPTURE(name);
        auto g = tu::corpus(name);
        // oracle: BFS coloring over the incidence lists
        std::vector<int> color(g.vertex_count(), -1);
        std::vector<int> stack{0};
        color[0] = 0;
        bool ok = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int e : g.incident(v)) {
                int u = g.other_end(e, v);
                if (color[u] == -1) {
                    color[u] = 1 - color[v];
                    stack.push_back(u);
                } else if (color[u] == color[v]) {
                    ok = false;
                }
            }
        }
        auto part = is_bipartite(g);
        CHECK(part.has_value() == ok);
        if (part) {
            for (int e = 0; e < g.edge_count(); ++e)
                CHECK((*part)[g.edges[e].a] != (*part)[g.edges[e].b]);
        }
    }
    CHECK(is_bipartite(tu::corpus("cube")).has_value());
    CHECK(!is_bipartite(tu::corpus("triangle")).has_value());
    CHECK(!is_bipartite(tu::corpus("noncolorable")).has_value());
}

TEST_CASE("configurations address edges by label") {
    auto g = tu::corpus("path3");
    auto k = Configuration::from_labels(g, {"B"});
    CHECK(k.is_open(0));
    CHECK(!k.is_open(1));
    CHECK(k.open_count() == 1);
    CHECK_THROWS_AS(Configuration::from_labels(g, {"Z"}), ValidationError);
}
