#pragma once

#include <vector>

#include "perqwalk/graph.hpp"
#include "perqwalk/types.hpp"

namespace perqwalk {

// Grover diffusion matrix 2|phi><phi| - I with phi uniform; entries 2/d - delta.
Matrix grover_coin(int d);
Matrix hadamard_coin();

struct CoinSpec {
    std::vector<Matrix> blocks;  // one unitary block per vertex, slot basis

    static CoinSpec grover(const StateGraph& sg);
    static CoinSpec identity(const StateGraph& sg);
    static CoinSpec hadamard(const StateGraph& sg);  // all degrees must be 2
    void validate(const StateGraph& sg, double tol = 1e-12) const;
};

// Rewrites a coin given in a caller's direction order into the slot basis:
// slot_of_direction[i] is the slot holding direction i.
Matrix relabel_coin(const Matrix& block, const std::vector<int>& slot_of_direction);

enum class Rotation { Identity, CW, CCW };

struct PermutationSpec {
    // perm[v][j] = image slot of slot j under P_v
    std::vector<std::vector<int>> perm;

    static PermutationSpec identity(const StateGraph& sg);
    static PermutationSpec cyclic(const StateGraph& sg, Rotation r);  // same at all vertices
    static PermutationSpec from_kinds(const StateGraph& sg, const std::vector<Rotation>& kinds);
    // CW on one bipartition class, CCW on the other; requires a bipartite graph.
    static PermutationSpec transporting(const StateGraph& sg);
    void validate(const StateGraph& sg) const;
    // Rotation kind of vertex v's block, if it is identity/cyclic.
    std::optional<Rotation> kind_of(int v) const;
};

enum class Variant { U1, U3 };

struct WalkSpec {
    StateGraph graph;
    CoinSpec coin;
    PermutationSpec permutation;
    Variant variant = Variant::U3;

    int dim() const { return graph.dim(); }
    void validate() const;
};

WalkSpec make_walk(StateGraph sg, CoinSpec coin, PermutationSpec perm, Variant variant);

Matrix coin_operator(const WalkSpec& w);
Matrix permutation_operator(const WalkSpec& w);

// R_K: open paired edges swap with their partner, closed paired edges and
// loops stay put. Hermitian involution for every K.
Matrix reflecting_shift(const StateGraph& sg, const Configuration& k);

// U_K = P R_K C (U1) or C P R_K (U3).
Matrix step_operator(const WalkSpec& w, const Configuration& k);

// U_K^t psi with a norm-drift guard.
Vector apply_fixed(const Vector& psi, const WalkSpec& w, const Configuration& k, int steps);

}  // namespace perqwalk
