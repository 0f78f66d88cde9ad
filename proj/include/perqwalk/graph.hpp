#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "perqwalk/types.hpp"

namespace perqwalk {

struct StructureEdge {
    std::string label;
    int a = -1;
    int b = -1;
};

/**
 * Undirected graph of walker positions and links. Immutable after
 * construction/validation; vertex and edge order follow the input file.
 */
class StructureGraph {
public:
    std::vector<std::string> vertex_names;
    std::vector<StructureEdge> edges;
    // Per-vertex cyclic order of incident edges (a combinatorial embedding).
    // Empty when the file carries no rotation section.
    std::vector<std::vector<int>> rotation;
    bool has_rotation = false;
    std::vector<int> outer_face_hint;  // edge ids; empty when absent

    int vertex_count() const { return static_cast<int>(vertex_names.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int degree(int v) const { return static_cast<int>(incident(v).size()); }
    int other_end(int e, int v) const;
    const std::vector<int>& incident(int v) const;

    int vertex_index(const std::string& name) const;  // throws ValidationError
    int edge_index(const std::string& label) const;   // throws ValidationError

    // connectivity, simplicity, rotation completeness. Throws ValidationError.
    void validate() const;
    void finalize();  // builds incidence lists; called by parse/builders

private:
    std::vector<std::vector<int>> incident_;
};

StructureGraph parse_graph(std::istream& in);
StructureGraph parse_graph_text(const std::string& text);
StructureGraph parse_graph_file(const std::string& path);

struct DirectedEdge {
    int origin = -1;
    int target = -1;
    int partner = -1;         // involution; == own index for unpaired loops
    int structure_edge = -1;  // -1 for unpaired loops
    bool is_loop() const { return structure_edge < 0; }
};

/**
 * Directed-edge basis of the walk: two paired edges per structure edge plus
 * unpaired loops appended per vertex. Global index order: vertices in file
 * order; within a vertex outgoing edges in rotation order, loops last.
 */
class StateGraph {
public:
    StructureGraph structure;
    std::vector<DirectedEdge> edges;
    std::vector<std::vector<int>> out_edges;  // slot order per vertex

    int dim() const { return static_cast<int>(edges.size()); }
    int vertex_count() const { return structure.vertex_count(); }
    int degree(int v) const { return static_cast<int>(out_edges[v].size()); }
    int partner(int i) const { return edges[i].partner; }
    int slot_of(int i) const;
    // The directed edge over structure edge `e` leaving vertex `origin`.
    int directed_index(int e, int origin) const;
    std::vector<int> loops_of(int v) const;
    int loop_count() const;
};

StateGraph build_state_graph(const StructureGraph& g,
                             std::optional<int> target_degree = std::nullopt);

struct HalfEdge {
    int edge = -1;    // structure edge id
    int origin = -1;  // traversal tail vertex
};

struct Face {
    std::vector<HalfEdge> boundary;
    bool is_outer = false;
    int length() const { return static_cast<int>(boundary.size()); }
    bool even() const { return length() % 2 == 0; }
};

struct FaceSet {
    std::vector<Face> all;
    int outer_index = -1;
    std::vector<const Face*> inner() const;
};

// Face tracing over the rotation system; enforces Euler's check
// #F + #V - #E = 2 and throws ValidationError on a non-planar embedding.
FaceSet faces(const StructureGraph& g);

// BFS 2-coloring; nullopt when an odd cycle exists.
std::optional<std::vector<int>> is_bipartite(const StructureGraph& g);

struct Configuration {
    std::vector<bool> open;

    static Configuration all_open(const StructureGraph& g);
    static Configuration all_closed(const StructureGraph& g);
    static Configuration from_labels(const StructureGraph& g,
                                     const std::vector<std::string>& labels);
    bool is_open(int e) const { return e >= 0 && e < static_cast<int>(open.size()) && open[e]; }
    int open_count() const;
    bool operator==(const Configuration&) const = default;
};

}  // namespace perqwalk
