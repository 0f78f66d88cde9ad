#include "perqwalk/walk.hpp"

#include <cmath>

namespace perqwalk {

Matrix grover_coin(int d) {
    if (d < 1) throw ValidationError("grover coin needs dimension >= 1");
    Matrix m = Matrix::Constant(d, d, Complex(2.0 / d, 0));
    m -= Matrix::Identity(d, d);
    return m;
}

Matrix hadamard_coin() {
    Matrix h(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    h << s, s, s, -s;
    return h;
}

CoinSpec CoinSpec::grover(const StateGraph& sg) {
    CoinSpec c;
    for (int v = 0; v < sg.vertex_count(); ++v) c.blocks.push_back(grover_coin(sg.degree(v)));
    return c;
}

CoinSpec CoinSpec::identity(const StateGraph& sg) {
    CoinSpec c;
    for (int v = 0; v < sg.vertex_count(); ++v)
        c.blocks.push_back(Matrix::Identity(sg.degree(v), sg.degree(v)));
    return c;
}

CoinSpec CoinSpec::hadamard(const StateGraph& sg) {
    CoinSpec c;
    for (int v = 0; v < sg.vertex_count(); ++v) {
        if (sg.degree(v) != 2)
            throw ValidationError("hadamard preset needs degree 2 at every vertex");
        c.blocks.push_back(hadamard_coin());
    }
    return c;
}

void CoinSpec::validate(const StateGraph& sg, double tol) const {
    if (static_cast<int>(blocks.size()) != sg.vertex_count())
        throw ValidationError("coin spec must have one block per vertex");
    for (int v = 0; v < sg.vertex_count(); ++v) {
        const auto& b = blocks[v];
        int d = sg.degree(v);
        if (b.rows() != d || b.cols() != d)
            throw ValidationError("coin block dimension mismatch at vertex " +
                                  sg.structure.vertex_names[v]);
        Matrix r = b.adjoint() * b - Matrix::Identity(d, d);
        if (r.cwiseAbs().maxCoeff() > tol)
            throw ValidationError("coin block is not unitary at vertex " +
                                  sg.structure.vertex_names[v]);
    }
}

Matrix relabel_coin(const Matrix& block, const std::vector<int>& slot_of_direction) {
    int d = static_cast<int>(block.rows());
    if (static_cast<int>(slot_of_direction.size()) != d)
        throw ValidationError("relabel_coin: permutation size mismatch");
    Matrix q = Matrix::Zero(d, d);
    for (int i = 0; i < d; ++i) q(slot_of_direction[i], i) = 1;
    return q * block * q.adjoint();
}

PermutationSpec PermutationSpec::identity(const StateGraph& sg) {
    return from_kinds(sg, std::vector<Rotation>(sg.vertex_count(), Rotation::Identity));
}

PermutationSpec PermutationSpec::cyclic(const StateGraph& sg, Rotation r) {
    return from_kinds(sg, std::vector<Rotation>(sg.vertex_count(), r));
}

PermutationSpec PermutationSpec::from_kinds(const StateGraph& sg,
                                            const std::vector<Rotation>& kinds) {
    if (static_cast<int>(kinds.size()) != sg.vertex_count())
        throw ValidationError("permutation kinds must cover every vertex");
    PermutationSpec p;
    for (int v = 0; v < sg.vertex_count(); ++v) {
        int d = sg.degree(v);
        std::vector<int> blk(d);
        for (int j = 0; j < d; ++j) {
            switch (kinds[v]) {
                case Rotation::Identity: blk[j] = j; break;
                case Rotation::CW: blk[j] = (j + 1) % d; break;
                case Rotation::CCW: blk[j] = (j - 1 + d) % d; break;
            }
        }
        p.perm.push_back(std::move(blk));
    }
    return p;
}

PermutationSpec PermutationSpec::transporting(const StateGraph& sg) {
    auto part = is_bipartite(sg.structure);
    if (!part) throw ValidationError("transporting permutations require a bipartite graph");
    std::vector<Rotation> kinds;
    for (int c : *part) kinds.push_back(c == 0 ? Rotation::CW : Rotation::CCW);
    return from_kinds(sg, kinds);
}

void PermutationSpec::validate(const StateGraph& sg) const {
    if (static_cast<int>(perm.size()) != sg.vertex_count())
        throw ValidationError("permutation spec must have one block per vertex");
    for (int v = 0; v < sg.vertex_count(); ++v) {
        int d = sg.degree(v);
        if (static_cast<int>(perm[v].size()) != d)
            throw ValidationError("permutation block dimension mismatch at vertex " +
                                  sg.structure.vertex_names[v]);
        std::vector<bool> hit(d, false);
        for (int j : perm[v]) {
            if (j < 0 || j >= d || hit[j])
                throw ValidationError("permutation block is not a permutation at vertex " +
                                      sg.structure.vertex_names[v]);
            hit[j] = true;
        }
    }
}

std::optional<Rotation> PermutationSpec::kind_of(int v) const {
    const auto& p = perm[v];
    int d = static_cast<int>(p.size());
    auto matches = [&](Rotation r) {
        for (int j = 0; j < d; ++j) {
            int want = r == Rotation::Identity ? j : r == Rotation::CW ? (j + 1) % d : (j - 1 + d) % d;
            if (p[j] != want) return false;
        }
        return true;
    };
    for (Rotation r : {Rotation::Identity, Rotation::CW, Rotation::CCW})
        if (matches(r)) return r;
    return std::nullopt;
}

void WalkSpec::validate() const {
    coin.validate(graph);
    permutation.validate(graph);
}

WalkSpec make_walk(StateGraph sg, CoinSpec coin, PermutationSpec perm, Variant variant) {
    WalkSpec w{std::move(sg), std::move(coin), std::move(perm), variant};
    w.validate();
    return w;
}

Matrix coin_operator(const WalkSpec& w) {
    int n = w.dim();
    Matrix c = Matrix::Zero(n, n);
    for (int v = 0; v < w.graph.vertex_count(); ++v) {
        const auto& sl = w.graph.out_edges[v];
        const auto& b = w.coin.blocks[v];
        for (size_t i = 0; i < sl.size(); ++i)
            for (size_t j = 0; j < sl.size(); ++j) c(sl[i], sl[j]) = b(i, j);
    }
    return c;
}

Matrix permutation_operator(const WalkSpec& w) {
    int n = w.dim();
    Matrix p = Matrix::Zero(n, n);
    for (int v = 0; v < w.graph.vertex_count(); ++v) {
        const auto& sl = w.graph.out_edges[v];
        for (size_t j = 0; j < sl.size(); ++j) p(sl[w.permutation.perm[v][j]], sl[j]) = 1;
    }
    return p;
}

Matrix reflecting_shift(const StateGraph& sg, const Configuration& k) {
    if (static_cast<int>(k.open.size()) != sg.structure.edge_count())
        throw ValidationError("configuration size does not match the structure graph");
    int n = sg.dim();
    Matrix r = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const auto& e = sg.edges[i];
        if (!e.is_loop() && k.is_open(e.structure_edge))
            r(e.partner, i) = 1;
        else
            r(i, i) = 1;
    }
    return r;
}

Matrix step_operator(const WalkSpec& w, const Configuration& k) {
    Matrix c = coin_operator(w);
    Matrix p = permutation_operator(w);
    Matrix r = reflecting_shift(w.graph, k);
    return w.variant == Variant::U1 ? Matrix(p * r * c) : Matrix(c * p * r);
}

Vector apply_fixed(const Vector& psi, const WalkSpec& w, const Configuration& k, int steps) {
    if (steps < 0) throw ValidationError("negative step count");
    Matrix u = step_operator(w, k);
    Vector x = psi;
    for (int t = 0; t < steps; ++t) x = u * x;
    if (std::abs(x.norm() - psi.norm()) > 1e-8)
        throw NumericalError("norm drift beyond 1e-8 in fixed-configuration evolution");
    return x;
}

}  // namespace perqwalk
