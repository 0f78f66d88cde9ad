#include <doctest.h>

#include <map>
#include <numbers>
#include <set>

#include "test_util.hpp"

using namespace perqwalk;

namespace {

int count_at(const std::vector<CommonEigenstate>& states, Complex alpha) {
    int n = 0;
    for (const auto& s : states)
        if (std::abs(s.alpha - alpha) < 1e-8) ++n;
    return n;
}

int dim_at(const AttractorBasis& b, Complex lambda) {
    int n = 0;
    for (const auto& a : b.items)
        if (std::abs(a.eigenvalue - lambda) < 1e-6) ++n;
    return n;
}

std::vector<Matrix> mats_of(const AttractorBasis& b) {
    std::vector<Matrix> out;
    for (const auto& a : b.items) out.push_back(a.mat);
    return out;
}

}  // namespace

TEST_CASE("reflecting Grover: one uniform eigenstate at alpha = 1") {
    for (const auto& name : {"cube", "honeycomb", "dodecahedron"}) {
        CAPTURE(name);
        auto w = tu::reflecting_grover(tu::corpus(name));
        auto states = common_eigenstates(w);
        std::vector<Vector> at1;
        for (const auto& s : states)
            if (std::abs(s.alpha - Complex(1, 0)) < 1e-8) at1.push_back(s.state);
        REQUIRE(at1.size() == 1);
        // all entries equal
        Vector v = at1[0] / at1[0](0);
        CHECK((v - Vector::Ones(w.dim())).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("cube reflecting Grover: five common eigenstates at alpha = -1") {
    auto w = tu::reflecting_grover(tu::corpus("cube"));
    auto states = common_eigenstates(w);
    CHECK(count_at(states, Complex(-1, 0)) == 5);
    CHECK(count_at(states, Complex(1, 0)) == 1);
    // each verified against every configuration of the certified scheme
    auto list = enumerate_scheme(PercolationScheme::single_closed(), w.graph.structure);
    for (const auto& s : states)
        for (const auto& [k, p] : list) {
            Matrix u = step_operator(w, k);
            CHECK((u * s.state - s.alpha * s.state).norm() < 1e-10);
        }
}

TEST_CASE("cube all-CW cyclic walk has no nontrivial common eigenstates") {
    auto w = tu::cyclic_grover(tu::corpus("cube"));
    auto states = common_eigenstates(w);
    Complex a2 = std::polar(1.0, std::numbers::pi / 3);
    CHECK(count_at(states, a2) == 0);
    CHECK(count_at(states, std::conj(a2)) == 0);
    CHECK(count_at(states, Complex(1, 0)) == 1);
    CHECK(states.size() == 1);
}

TEST_CASE("common-eigenstate count at -1 follows the dimension formula corpus-wide") {
    for (const auto& name : tu::corpus_names()) {
        CAPTURE(name);
        auto g = tu::corpus(name);
        auto w = tu::reflecting_grover(g);
        auto states = common_eigenstates(w);
        int want = 2 * g.vertex_count() - g.edge_count();
        bool threereg = true;
        for (int v = 0; v < g.vertex_count(); ++v) threereg = threereg && g.degree(v) == 3;
        if (threereg && is_bipartite(g)) ++want;
        CHECK(count_at(states, Complex(-1, 0)) == want);
    }
}

TEST_CASE("common eigenstates for the other operator ordering come back converted") {
    auto g = tu::corpus("path3");
    auto sg = build_state_graph(g, 2);
    PermutationSpec swap;
    swap.perm = {{1, 0}, {1, 0}, {1, 0}};
    auto w1 = make_walk(sg, CoinSpec::grover(sg), swap, Variant::U1);
    auto states = common_eigenstates(w1);
    CHECK(!states.empty());
    auto list = enumerate_scheme(PercolationScheme::full(0.5), g);
    for (const auto& s : states)
        for (const auto& [k, p] : list) {
            Matrix u1 = step_operator(w1, k);
            CHECK((u1 * s.state - s.alpha * s.state).norm() < 1e-10);
        }
}

TEST_CASE("cube p-attractors: 10 at -1 and 26 at +1") {
    auto w = tu::reflecting_grover(tu::corpus("cube"));
    auto pats = p_attractors(common_eigenstates(w));
    REQUIRE(pats.size() == 36);
    int m1 = 0, p1 = 0;
    for (const auto& a : pats) {
        if (std::abs(a.eigenvalue - Complex(-1, 0)) < 1e-9) ++m1;
        if (std::abs(a.eigenvalue - Complex(1, 0)) < 1e-9) ++p1;
        CHECK(a.is_p);
        CHECK(is_p_attractor(a.mat, w.graph));
    }
    CHECK(m1 == 10);
    CHECK(p1 == 26);
    // outer products of orthonormal eigenstates are HS-orthonormal already
    auto on = orthonormalize(mats_of(AttractorBasis{pats}));
    CHECK(on.size() == 36);
}

TEST_CASE("a single eigenstate yields one projector attractor") {
    std::vector<CommonEigenstate> states{{Complex(1, 0), tu::unit_at(4, 2)}};
    auto pats = p_attractors(states);
    REQUIRE(pats.size() == 1);
    CHECK(std::abs(pats[0].eigenvalue - Complex(1, 0)) == 0.0);
    CHECK(tu::max_abs(pats[0].mat - tu::unit_at(4, 2) * tu::unit_at(4, 2).adjoint()) == 0.0);
}

TEST_CASE("honeycomb cyclic walk: p-attractor eigenvalues include e^{+-2i pi/3}") {
    auto w = tu::cyclic_grover(tu::corpus("honeycomb"));
    auto states = common_eigenstates(w);
    // derived oracle: enumerate alpha * conj(beta) over the computed states
    std::set<long> angles;
    for (const auto& a : states)
        for (const auto& b : states)
            angles.insert(std::lround(std::arg(a.alpha * std::conj(b.alpha)) * 1e6));
    Complex w2 = std::polar(1.0, 2 * std::numbers::pi / 3);
    CHECK(angles.count(std::lround(std::arg(w2) * 1e6)) == 1);
    CHECK(angles.count(std::lround(std::arg(std::conj(w2)) * 1e6)) == 1);
    auto pats = p_attractors(states);
    int found = 0;
    for (const auto& a : pats)
        if (std::abs(a.eigenvalue - w2) < 1e-9 || std::abs(a.eigenvalue - std::conj(w2)) < 1e-9)
            ++found;
    CHECK(found == 2);
}

TEST_CASE("spectral oracle on the cube: 37 dimensions, equal to p-span plus identity") {
    auto w = tu::reflecting_grover(tu::corpus("cube"));
    auto basis = brute_force_attractors(w, PercolationScheme::single_closed());
    CHECK(basis.size() == 37);
    CHECK(dim_at(basis, Complex(-1, 0)) == 10);
    CHECK(dim_at(basis, Complex(1, 0)) == 27);
    for (const auto& a : basis.items) CHECK(a.residual <= 1e-9);

    auto pats = p_attractors(common_eigenstates(w));
    std::vector<Matrix> span = mats_of(AttractorBasis{pats});
    span.push_back(Matrix::Identity(24, 24) / std::sqrt(24.0));
    auto on = orthonormalize(span);
    REQUIRE(on.size() == 37);
    CHECK(span_projection_residual(mats_of(basis), on) <= 1e-8);
    CHECK(span_projection_residual(on, mats_of(basis)) <= 1e-8);
}

TEST_CASE("trivial walk on a one-vertex graph traps the whole matrix space") {
    auto g = parse_graph_text("vertices 1\nvertex v\n");
    auto sg = build_state_graph(g, 3);
    auto w = make_walk(sg, CoinSpec::identity(sg), PermutationSpec::identity(sg), Variant::U3);
    auto basis = attractor_space(w, {Configuration::all_closed(g)});
    CHECK(basis.size() == 9);
}

TEST_CASE("path walk with one-dimensional ends: oracle equals p-attractors plus identity") {
    // natural degrees: trivial coins at the endpoints, a swap block in the middle
    auto g = tu::corpus("path3");
    auto sg = build_state_graph(g);
    REQUIRE(sg.dim() == 4);
    auto w = make_walk(sg, CoinSpec::grover(sg), PermutationSpec::identity(sg), Variant::U3);
    auto basis = brute_force_attractors(w, PercolationScheme::full(0.5));
    auto pats = p_attractors(common_eigenstates(w));
    std::vector<Matrix> span = mats_of(AttractorBasis{pats});
    span.push_back(Matrix::Identity(4, 4));
    CHECK(basis.size() == static_cast<int>(orthonormalize(span).size()));
}

TEST_CASE("identity is the non-p attractor; outer products are p") {
    auto w = tu::reflecting_grover(tu::corpus("cube"));
    CHECK(!is_p_attractor(Matrix::Identity(24, 24), w.graph));
    auto states = common_eigenstates(w);
    for (const auto& a : states)
        for (const auto& b : states)
            CHECK(is_p_attractor(a.state * b.state.adjoint(), w.graph));
}

TEST_CASE("oracle basis elements: p-flag matches projection onto the p-span") {
    auto w = tu::reflecting_grover(tu::corpus("cube"));
    auto basis = brute_force_attractors(w, PercolationScheme::single_closed());
    auto pspan = orthonormalize(mats_of(AttractorBasis{p_attractors(common_eigenstates(w))}));
    for (const auto& a : basis.items) {
        double resid = span_projection_residual({a.mat}, pspan);
        CHECK(a.is_p == (resid <= 1e-8));
    }
}

TEST_CASE("asymptotic projection onto the normalized identity alone") {
    int n = 6;
    AttractorBasis basis;
    basis.items.push_back({Complex(1, 0), Matrix::Identity(n, n) / std::sqrt(double(n)), false, 0});
    Vector psi = tu::pseudo_random_state(n, 2);
    Matrix rho = psi * psi.adjoint();
    Matrix out = asymptotic_state(rho, basis, 17);
    CHECK(tu::max_abs(out - Matrix::Identity(n, n) / double(n)) < 1e-12);
}

TEST_CASE("asymptotic state rejects a non-orthonormal basis") {
    AttractorBasis bad;
    bad.items.push_back({Complex(1, 0), Matrix::Identity(4, 4), false, 0});  // norm 2, not 1
    Matrix rho = Matrix::Identity(4, 4) / 4.0;
    CHECK_THROWS_AS(asymptotic_state(rho, bad, 1), ValidationError);
}

TEST_CASE("exact channel converges to the asymptotic formula on the path") {
    auto g = tu::corpus("path3");
    auto sg = build_state_graph(g, 2);
    auto w = make_walk(sg, CoinSpec::grover(sg), PermutationSpec::identity(sg), Variant::U3);
    auto scheme = PercolationScheme::full(0.5);
    auto basis = brute_force_attractors(w, scheme);
    Vector psi = tu::unit_at(6, 0);
    Matrix rho = psi * psi.adjoint();
    PreparedChannel ch(w, scheme);
    double worst_after_400 = 0;
    for (int t = 1; t <= 450; ++t) {
        rho = ch.apply(rho);
        if (t >= 400) {
            Matrix asym = asymptotic_state(psi * psi.adjoint(), basis, t);
            worst_after_400 = std::max(worst_after_400, (rho - asym).norm());
            // the formula output stays a unit-trace Hermitian matrix
            CHECK(tu::max_abs(asym - asym.adjoint()) < 1e-10);
            CHECK(std::abs(asym.trace().real() - 1.0) < 1e-10);
            CHECK(std::abs(asym.trace().imag()) < 1e-12);
        }
    }
    CHECK(worst_after_400 <= 1e-6);
}

TEST_CASE("variant conversion: identity maps to identity, eigenvalue kept") {
    auto w1 = tu::reflecting_grover(tu::corpus("cube"), Variant::U1);
    Attractor id{Complex(1, 0), Matrix::Identity(24, 24) / std::sqrt(24.0), false, 0};
    auto conv = convert_variant(id, w1);
    CHECK(tu::max_abs(conv.mat - id.mat) < 1e-12);
    CHECK(conv.eigenvalue == id.eigenvalue);
}

TEST_CASE("variant conversion maps the full oracle basis between orderings") {
    auto g = tu::corpus("path3");
    auto sg = build_state_graph(g, 2);
    PermutationSpec swap;
    swap.perm = {{1, 0}, {1, 0}, {1, 0}};
    auto w1 = make_walk(sg, CoinSpec::grover(sg), swap, Variant::U1);
    auto w3 = make_walk(sg, CoinSpec::grover(sg), swap, Variant::U3);
    auto scheme = PercolationScheme::full(0.5);
    auto basis1 = brute_force_attractors(w1, scheme);
    auto list = enumerate_scheme(scheme, g);
    for (const auto& a : basis1.items) {
        auto conv = convert_variant(a, w1);  // includes the P-conjugation cross-check
        for (const auto& [k, p] : list) {
            Matrix u3 = step_operator(w3, k);
            CHECK(tu::max_abs(u3 * conv.mat * u3.adjoint() - conv.eigenvalue * conv.mat) <= 1e-9);
        }
    }
}

TEST_CASE("reflecting walks share attractors across both variants") {
    auto w1 = tu::reflecting_grover(tu::corpus("cube"), Variant::U1);
    auto basis = brute_force_attractors(w1, PercolationScheme::single_closed());
    for (const auto& a : basis.items) {
        auto conv = convert_variant(a, w1);
        // C X C^dag = lambda X for reflecting attractors, so spans agree
        CHECK(tu::max_abs(conv.mat - (a.eigenvalue / std::abs(a.eigenvalue)) * a.mat) < 1e-9);
    }
}

TEST_CASE("orthonormalize: stable on orthonormal input, drops duplicates") {
    auto w = tu::reflecting_grover(tu::corpus("cube"));
    auto pats = p_attractors(common_eigenstates(w));
    std::vector<Matrix> span = mats_of(AttractorBasis{pats});
    auto once = orthonormalize(span);
    REQUIRE(once.size() == 36);
    auto twice = orthonormalize(once);
    REQUIRE(twice.size() == 36);
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(tu::max_abs(once[i] - twice[i]) < 1e-12);

    span.push_back(span.front());  // duplicate
    CHECK(orthonormalize(span).size() == 36);
    span.push_back(Matrix::Identity(24, 24));
    CHECK(orthonormalize(span).size() == 37);
}

TEST_CASE("restricted schemes reproduce the full-percolation attractor space on the path") {
    auto g = tu::corpus("path3");
    auto sg = build_state_graph(g, 2);
    auto w = make_walk(sg, CoinSpec::grover(sg), PermutationSpec::identity(sg), Variant::U3);
    auto full = brute_force_attractors(w, PercolationScheme::full(0.5));
    for (auto scheme : {PercolationScheme::single_open(), PercolationScheme::single_closed(),
                        PercolationScheme::closed_vertex()}) {
        CAPTURE(scheme.name());
        auto basis = brute_force_attractors(w, scheme);
        CHECK(basis.size() == full.size());
        CHECK(span_projection_residual(mats_of(basis), mats_of(full)) <= 1e-8);
        CHECK(span_projection_residual(mats_of(full), mats_of(basis)) <= 1e-8);
    }
}

TEST_CASE("the spectral oracle refuses an uncertified scheme") {
    auto g = tu::corpus("path3");
    auto sg = build_state_graph(g, 2);
    auto w = make_walk(sg, CoinSpec::grover(sg), PermutationSpec::identity(sg), Variant::U3);
    auto only_full_config =
        PercolationScheme::explicit_list({{Configuration::all_open(g), 1.0}});
    CHECK_THROWS_AS(brute_force_attractors(w, only_full_config), ValidationError);
}

TEST_CASE("oracle space equals p-attractors plus identity on every corpus graph" *
          doctest::timeout(500)) {
    for (const auto& name : tu::corpus_names()) {
        for (bool cyclic : {false, true}) {
            CAPTURE(name);
            CAPTURE(cyclic);
            auto g = tu::corpus(name);
            auto w = cyclic ? tu::cyclic_grover(g) : tu::reflecting_grover(g);
            auto basis = brute_force_attractors(w, PercolationScheme::single_closed());
            std::vector<Matrix> span = mats_of(AttractorBasis{p_attractors(common_eigenstates(w))});
            span.push_back(Matrix::Identity(w.dim(), w.dim()));
            auto on = orthonormalize(span);
            CHECK(basis.size() == static_cast<int>(on.size()));
            CHECK(span_projection_residual(mats_of(basis), on) <= 1e-8);
            CHECK(span_projection_residual(on, mats_of(basis)) <= 1e-8);
        }
    }
}

TEST_CASE("nullspace helper: rank decisions survive numerically zero input") {
    Matrix z = Matrix::Zero(4, 4) * Complex(1e-300, 0);
    CHECK(nullspace(z).cols() == 4);
    CHECK(numeric_rank(Matrix::Identity(3, 3)) == 3);
    Matrix a(2, 3);
    a << 1, 2, 3, 2, 4, 6;
    CHECK(numeric_rank(a) == 1);
    CHECK(nullspace(a).cols() == 2);
}
