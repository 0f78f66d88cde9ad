#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "perqwalk/attractors.hpp"
#include "perqwalk/graph.hpp"
#include "perqwalk/walk.hpp"

namespace perqwalk {

enum class TrappedKind { A, B, C, D };

// Localized eigenvector of the percolated reflecting Grover walk at -1.
// Integer amplitudes; coin and shift conditions hold exactly.
struct TrappedState {
    TrappedKind kind;
    Eigen::VectorXi amplitudes;          // over the directed-edge basis
    std::vector<HalfEdge> defining_face;  // the face cycle for A-type states
    Vector state() const;
    char kind_letter() const;
};

// 2#V - #E, plus 1 when the structure graph is bipartite and 3-regular
// (no loops added). Requires max degree 3.
int trapped_dimension(const StructureGraph& g);

// The face/loop basis recipe; requires a planar embedding and a 3-regular
// state graph built over a max-degree-3 structure graph.
std::vector<TrappedState> trapped_basis(const StateGraph& sg);

// Rank test on the coin+shift condition system at eigenvalue -1: one row per
// vertex over edge/loop variables. Deficiency is 0 or 1; returns true when
// the rows are dependent (bipartite, 3-regular, loop-free case).
bool condition_rank_dependent(const StateGraph& sg);

struct ColorConflict {
    enum class Type { Vertex, Pair };
    Type type;
    int vertex = -1;  // Vertex conflicts
    int edge = -1;    // Pair conflicts: structure edge id
    std::string describe(const StructureGraph& g) const;
};

// r=0, g=1, b=2 standing for 1, e^{2i pi/3}, e^{-2i pi/3}.
struct EdgeColoring {
    std::vector<int> color;  // per directed edge
    static Complex value(int color);
};

// Propagates colors from the lowest-index directed edge under the per-vertex
// cyclic rule and pair equality. Requires a 3-regular state graph and cyclic
// (CW/CCW) permutation blocks everywhere.
std::variant<EdgeColoring, ColorConflict> edge_3_color(const StateGraph& sg,
                                                       const PermutationSpec& perms);

// Reads the eigenstate off a consistent coloring; conjugate=false gives the
// e^{i pi/3} state, conjugate=true swaps g and b for e^{-i pi/3}.
CommonEigenstate eigenstate_from_coloring(const EdgeColoring& c, const StateGraph& sg,
                                          const PermutationSpec& perms, bool conjugate = false);

// Corollary construction: lifts a proper 3-coloring of the structure edges to
// the state graph (loops by elimination) and reads the CW/CCW distribution
// whose walk carries the corresponding eigenstate.
PermutationSpec permutations_from_coloring(const StateGraph& sg,
                                           const std::vector<int>& structure_colors,
                                           bool conjugate = false);

// Exhaustive backtracking search for a proper edge-3-coloring of the
// structure graph; nullopt when none exists.
std::optional<std::vector<int>> find_structure_3_coloring(const StructureGraph& g);

}  // namespace perqwalk
