#include <doctest.h>

#include <set>

#include "test_util.hpp"

#include "perqwalk/transport.hpp"

using namespace perqwalk;

namespace {

struct CubeFixture {
    StructureGraph g = tu::corpus("cube");
    WalkSpec w = tu::reflecting_grover(g);
    Sink sink = Sink::from_names(g, {"v7"});
    std::vector<TrappedState> trapped = trapped_basis(w.graph);

    Vector symmetric() const {
        Vector psi = Vector::Zero(w.dim());
        for (int i : w.graph.out_edges[0]) psi(i) = Complex(1.0 / std::sqrt(3.0), 0);
        return psi;
    }
    Vector orthogonal() const {
        Vector psi = Vector::Zero(w.dim());
        int ex = w.graph.directed_index(g.edge_index("X01"), 0);
        int ey = w.graph.directed_index(g.edge_index("Y02"), 0);
        psi(ex) = Complex(1.0 / std::sqrt(2.0), 0);
        psi(ey) = Complex(-1.0 / std::sqrt(2.0), 0);
        return psi;
    }
};

}  // namespace

TEST_CASE("sink projector is an orthogonal projector of the right rank") {
    CubeFixture f;
    Matrix t = sink_projector(f.w.graph, f.sink);
    CHECK(tu::max_abs(t * t - t) == 0.0);
    CHECK(tu::max_abs(t - t.adjoint()) == 0.0);
    CHECK(std::lround(t.trace().real()) == 3);
    Sink two = Sink::from_names(f.g, {"v7", "v0"});
    CHECK(std::lround(sink_projector(f.w.graph, two).trace().real()) == 6);
}

TEST_CASE("sink over every vertex absorbs everything in one step") {
    CubeFixture f;
    Sink all;
    for (int v = 0; v < 8; ++v) all.vertices.push_back(v);
    auto run = evolve_with_sink(f.symmetric() * f.symmetric().adjoint(), f.w,
                                PercolationScheme::single_closed(), all, 1);
    CHECK(run.absorbed(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("empty sink preserves the trace") {
    CubeFixture f;
    auto run = evolve_with_sink(f.symmetric() * f.symmetric().adjoint(), f.w,
                                PercolationScheme::single_closed(), Sink{}, 50);
    for (double p : run.survival) CHECK(p == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("survival is monotone and the symmetric state fully transfers") {
    CubeFixture f;
    auto run = evolve_with_sink(f.symmetric() * f.symmetric().adjoint(), f.w,
                                PercolationScheme::single_closed(), f.sink, 500);
    for (std::size_t t = 1; t < run.survival.size(); ++t)
        CHECK(run.survival[t] <= run.survival[t - 1] + 1e-12);
    CHECK(run.absorbed(500) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("sr filtering: cube loses top, right and front faces") {
    CubeFixture f;
    auto sr = sr_trapped_basis(f.trapped, f.w.graph, f.sink);
    REQUIRE(sr.size() == 3);
    // remaining span touches only the z=0, y=0, x=0 faces: all states vanish
    // on the sink subspace and on v7's neighbors' edges toward v7
    Matrix t = sink_projector(f.w.graph, f.sink);
    for (const auto& s : sr) CHECK((t * s).norm() < 1e-12);
    // span check: equals the numeric intersection with the sink complement,
    // whose dimension is the state count minus the independent constraints
    Matrix m(f.w.dim(), static_cast<int>(f.trapped.size()));
    for (std::size_t k = 0; k < f.trapped.size(); ++k) m.col(k) = f.trapped[k].state();
    CHECK(static_cast<int>(f.trapped.size()) - numeric_rank(Matrix(t * m)) == 3);
}

TEST_CASE("sr filtering keeps everything when there is no sink") {
    CubeFixture f;
    auto sr = sr_trapped_basis(f.trapped, f.w.graph, Sink{});
    CHECK(sr.size() == f.trapped.size());
}

TEST_CASE("honeycomb corner sink: dimension matches the projection-rank oracle") {
    auto g = tu::corpus("honeycomb");
    auto w = tu::reflecting_grover(g);
    auto trapped = trapped_basis(w.graph);
    for (const auto& vname : {"a2", "u1", "b1"}) {
        CAPTURE(vname);
        Sink sink = Sink::from_names(g, {vname});
        auto sr = sr_trapped_basis(trapped, w.graph, sink);
        Matrix m(w.dim(), static_cast<int>(trapped.size()));
        for (std::size_t k = 0; k < trapped.size(); ++k) m.col(k) = trapped[k].state();
        Matrix t = sink_projector(w.graph, sink);
        // oracle: states in the span with zero sink component
        Matrix overlap = t * m;
        int expect = static_cast<int>(trapped.size()) - numeric_rank(overlap);
        CHECK(static_cast<int>(sr.size()) == expect);
        for (const auto& s : sr) CHECK((t * s).norm() < 1e-12);
    }
}

TEST_CASE("transfer efficiency on the percolated cube: 1.0 and 0.70") {
    CubeFixture f;
    auto sr = sr_trapped_basis(f.trapped, f.w.graph, f.sink);
    CHECK(transfer_efficiency(f.symmetric(), sr) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(transfer_efficiency(f.orthogonal(), sr) == doctest::Approx(0.70).epsilon(1e-9));
    auto range = efficiency_range_at_vertex(f.w.graph, 0, sr);
    CHECK(range.min_q == doctest::Approx(0.70).epsilon(1e-9));
    CHECK(range.max_q == doctest::Approx(1.0).epsilon(1e-10));
    // any unit combination orthogonal to the symmetric state hits the minimum
    Vector mix = Vector::Zero(f.w.dim());
    int ey = f.w.graph.directed_index(f.g.edge_index("Y02"), 0);
    int ez = f.w.graph.directed_index(f.g.edge_index("Z04"), 0);
    mix(ey) = Complex(1 / std::sqrt(2.0), 0);
    mix(ez) = Complex(-1 / std::sqrt(2.0), 0);
    CHECK(transfer_efficiency(mix, sr) == doctest::Approx(0.70).epsilon(1e-9));
}

TEST_CASE("simulated absorption approaches the analytic efficiency") {
    CubeFixture f;
    auto sr = sr_trapped_basis(f.trapped, f.w.graph, f.sink);
    double analytic = transfer_efficiency(f.orthogonal(), sr);
    auto run = evolve_with_sink(f.orthogonal() * f.orthogonal().adjoint(), f.w,
                                PercolationScheme::single_closed(), f.sink, 500);
    CHECK(std::abs(run.absorbed(500) - analytic) <= 1e-3);
}

TEST_CASE("both operator orderings give the same extremal efficiencies") {
    CubeFixture f;
    auto w1 = tu::reflecting_grover(f.g, Variant::U1);
    for (auto* w : {&f.w, &w1}) {
        auto run = evolve_with_sink(f.orthogonal() * f.orthogonal().adjoint(), *w,
                                    PercolationScheme::single_closed(), f.sink, 400);
        CHECK(std::abs(run.absorbed(400) - 0.70) <= 1e-3);
    }
}

TEST_CASE("non-percolated extension states: sign pattern and eigenvector check") {
    CubeFixture f;
    auto ext = nonpercolated_trapped_extension(f.w, f.trapped);
    REQUIRE(ext.size() == 5);  // one per A-type face state
    Matrix u = step_operator(f.w, Configuration::all_open(f.g));
    for (const auto& psi : ext) {
        // entries +-1, partners carry opposite signs
        for (int i = 0; i < f.w.dim(); ++i) {
            if (psi(i) != Complex(0, 0)) {
                CHECK(std::abs(std::abs(psi(i).real()) - 1.0) < 1e-12);
                CHECK(psi(f.w.graph.partner(i)) == -psi(i));
            }
        }
        // stationary under the all-open step (the percolated walk excludes them)
        CHECK((u * psi - psi).norm() < 1e-12);
    }

    // the y=0 face variant matches the alternating pattern explicitly
    Vector lt;
    for (const auto& t : f.trapped) {
        std::set<int> verts;
        for (const auto& h : t.defining_face) verts.insert(h.origin);
        if (verts == std::set<int>{0, 1, 5, 4}) {
            auto one = nonpercolated_trapped_extension(f.w, {t});
            REQUIRE(one.size() == 1);
            lt = one[0];
        }
    }
    REQUIRE(lt.size() == f.w.dim());
    auto idx = [&](const char* edge, const char* vertex) {
        return f.w.graph.directed_index(f.g.edge_index(edge), f.g.vertex_index(vertex));
    };
    Complex s = lt(idx("X01", "v0"));
    REQUIRE(std::abs(std::abs(s) - 1.0) < 1e-12);
    CHECK(lt(idx("X01", "v1")) == -s);
    CHECK(lt(idx("Z15", "v1")) == s);
    CHECK(lt(idx("Z15", "v5")) == -s);
    CHECK(lt(idx("X45", "v5")) == s);
    CHECK(lt(idx("X45", "v4")) == -s);
    CHECK(lt(idx("Z04", "v4")) == s);
    CHECK(lt(idx("Z04", "v0")) == -s);

    // under percolation the projector onto such a state is not stationary
    Vector nlt = lt / lt.norm();
    Matrix rho = nlt * nlt.adjoint();
    Matrix next = channel_step(rho, f.w, PercolationScheme::single_closed());
    CHECK(tu::max_abs(next - rho) > 1e-3);
}

TEST_CASE("non-percolated minimum efficiency at the source is 0.40") {
    CubeFixture f;
    std::vector<Vector> states;
    for (const auto& t : f.trapped) states.push_back(t.state());
    auto sr = sr_filter(states, f.w.graph, f.sink);
    auto extra = sr_filter(nonpercolated_trapped_extension(f.w, f.trapped), f.w.graph, f.sink);
    sr.insert(sr.end(), extra.begin(), extra.end());
    REQUIRE(sr.size() == 6);
    auto range = efficiency_range_at_vertex(f.w.graph, 0, sr);
    CHECK(range.min_q == doctest::Approx(0.40).epsilon(1e-9));
    CHECK(range.max_q == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(transfer_efficiency(f.symmetric(), sr) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(transfer_efficiency(f.orthogonal(), sr) == doctest::Approx(0.40).epsilon(1e-9));

    // unitary sink run agrees
    Matrix u = step_operator(f.w, Configuration::all_open(f.g));
    Matrix it = Matrix::Identity(f.w.dim(), f.w.dim()) - sink_projector(f.w.graph, f.sink);
    Vector x = f.orthogonal();
    for (int t = 0; t < 2000; ++t) x = it * (u * x);
    CHECK(std::abs((1.0 - x.squaredNorm()) - 0.40) <= 1e-3);

    // oracle: the never-absorbed subspace of the sink-modified unitary is
    // exactly six-dimensional
    Eigen::ComplexEigenSolver<Matrix> es(Matrix(it * u));
    int peripheral = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) > 1 - 1e-9) ++peripheral;
    CHECK(peripheral == 6);
}

TEST_CASE("transfer efficiency validates normalization") {
    CubeFixture f;
    Vector bad = Vector::Zero(f.w.dim());
    bad(0) = Complex(0.5, 0);
    CHECK_THROWS_AS(transfer_efficiency(bad, {}), ValidationError);
}
