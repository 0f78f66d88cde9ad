#include "perqwalk/grover3.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <numbers>
#include <set>

namespace perqwalk {

Vector TrappedState::state() const {
    Vector v(amplitudes.size());
    for (int i = 0; i < amplitudes.size(); ++i) v(i) = Complex(amplitudes(i), 0);
    return v;
}

char TrappedState::kind_letter() const {
    switch (kind) {
        case TrappedKind::A: return 'A';
        case TrappedKind::B: return 'B';
        case TrappedKind::C: return 'C';
        case TrappedKind::D: return 'D';
    }
    return '?';
}

int trapped_dimension(const StructureGraph& g) {
    for (int v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) > 3) throw ValidationError("trapped dimension needs max degree 3");
    int n = 2 * g.vertex_count() - g.edge_count();
    bool regular3 = true;
    for (int v = 0; v < g.vertex_count(); ++v) regular3 = regular3 && g.degree(v) == 3;
    if (regular3 && is_bipartite(g)) ++n;
    return n;
}

namespace {

// Shortest path between vertex sets; deterministic tie-breaking by vertex
// index and edge label. Returns the structure edges plus both endpoints.
struct PathResult {
    std::vector<int> edges;
    int src = -1;
    int dst = -1;
};

PathResult bfs_path(const StructureGraph& g, const std::set<int>& srcs, const std::set<int>& dsts) {
    for (int v : srcs)
        if (dsts.count(v)) return {{}, v, v};
    std::map<int, std::pair<int, int>> prev;  // vertex -> (prev vertex, via edge)
    std::deque<int> frontier(srcs.begin(), srcs.end());
    std::sort(frontier.begin(), frontier.end());
    for (int v : srcs) prev[v] = {-1, -1};
    while (!frontier.empty()) {
        std::vector<int> layer(frontier.begin(), frontier.end());
        frontier.clear();
        std::sort(layer.begin(), layer.end());
        for (int v : layer) {
            std::vector<int> inc = g.incident(v);
            std::sort(inc.begin(), inc.end(),
                      [&](int a, int b) { return g.edges[a].label < g.edges[b].label; });
            for (int e : inc) {
                int u = g.other_end(e, v);
                if (prev.count(u)) continue;
                prev[u] = {v, e};
                if (dsts.count(u)) {
                    PathResult r;
                    r.dst = u;
                    int x = u;
                    while (prev[x].first >= 0) {
                        r.edges.push_back(prev[x].second);
                        x = prev[x].first;
                    }
                    r.src = x;
                    std::reverse(r.edges.begin(), r.edges.end());
                    return r;
                }
                frontier.push_back(u);
            }
        }
    }
    throw ValidationError("no connecting path found (graph not connected?)");
}

struct Builder {
    const StateGraph& sg;
    Eigen::VectorXi psi;

    explicit Builder(const StateGraph& s) : sg(s), psi(Eigen::VectorXi::Zero(s.dim())) {}

    void add_pair(int structure_edge, int origin, int val) {
        int i = sg.directed_index(structure_edge, origin);
        psi(i) += val;
        psi(sg.partner(i)) += val;
    }

    // Alternating +-1 around a face cycle, starting at a chosen boundary slot.
    void face_cycle(const Face& f, int start_pos, int sign) {
        int m = f.length();
        for (int k = 0; k < m; ++k) {
            const auto& h = f.boundary[(start_pos + k) % m];
            add_pair(h.edge, h.origin, sign);
            sign = -sign;
        }
    }
};

int face_pos_at_vertex(const Face& f, int v) {
    for (int k = 0; k < f.length(); ++k)
        if (f.boundary[k].origin == v) return k;
    throw ValidationError("vertex not on face boundary");
}

std::set<int> face_vertices(const Face& f) {
    std::set<int> out;
    for (const auto& h : f.boundary) out.insert(h.origin);
    return out;
}

void normalize_sign(Eigen::VectorXi& psi) {
    for (int i = 0; i < psi.size(); ++i) {
        if (psi(i) > 0) return;
        if (psi(i) < 0) {
            psi = -psi;
            return;
        }
    }
}

void verify_exact(const StateGraph& sg, const Eigen::VectorXi& psi) {
    if (psi.isZero()) throw NumericalError("trapped-state construction produced the zero vector");
    for (int v = 0; v < sg.vertex_count(); ++v) {
        int sum = 0;
        for (int i : sg.out_edges[v]) sum += psi(i);
        if (sum != 0) throw NumericalError("trapped state violates the coin condition");
    }
    for (int i = 0; i < sg.dim(); ++i)
        if (psi(i) != psi(sg.partner(i)))
            throw NumericalError("trapped state violates the shift condition");
}

}  // namespace

std::vector<TrappedState> trapped_basis(const StateGraph& sg) {
    const StructureGraph& g = sg.structure;
    for (int v = 0; v < sg.vertex_count(); ++v)
        if (sg.degree(v) != 3)
            throw ValidationError("trapped basis expects a 3-regular state graph");
    FaceSet fs = faces(g);

    std::vector<const Face*> inner_even, inner_odd;
    for (int i = 0; i < static_cast<int>(fs.all.size()); ++i) {
        if (i == fs.outer_index) continue;
        (fs.all[i].even() ? inner_even : inner_odd).push_back(&fs.all[i]);
    }
    std::vector<int> loops;
    for (int i = 0; i < sg.dim(); ++i)
        if (sg.edges[i].is_loop()) loops.push_back(i);

    std::vector<TrappedState> out;

    // A-type: one alternating cycle per even-edged inner face, +1 on its
    // lowest-index edge.
    for (const Face* f : inner_even) {
        Builder b(sg);
        int start = 0;
        for (int k = 1; k < f->length(); ++k)
            if (f->boundary[k].edge < f->boundary[start].edge) start = k;
        b.face_cycle(*f, start, +1);
        normalize_sign(b.psi);
        verify_exact(sg, b.psi);
        out.push_back({TrappedKind::A, b.psi, f->boundary});
    }

    if (!inner_odd.empty()) {
        // B-type: fixed odd face joined to every other inner odd face; the
        // connecting path is traversed both ways so its edges carry +-2.
        const Face* f0 = inner_odd.front();
        auto f0v = face_vertices(*f0);
        for (std::size_t fi = 1; fi < inner_odd.size(); ++fi) {
            const Face* f1 = inner_odd[fi];
            auto pr = bfs_path(g, f0v, face_vertices(*f1));
            Builder b(sg);
            int pos = 1;
            auto sgn = [&]() { return pos % 2 == 1 ? 1 : -1; };
            int k0 = face_pos_at_vertex(*f0, pr.src);
            for (int k = 0; k < f0->length(); ++k, ++pos) {
                const auto& h = f0->boundary[(k0 + k) % f0->length()];
                b.add_pair(h.edge, h.origin, sgn());
            }
            int cv = pr.src;
            for (int e : pr.edges) {
                b.add_pair(e, cv, sgn());
                ++pos;
                cv = g.other_end(e, cv);
            }
            int k1 = face_pos_at_vertex(*f1, pr.dst);
            for (int k = 0; k < f1->length(); ++k, ++pos) {
                const auto& h = f1->boundary[(k1 + k) % f1->length()];
                b.add_pair(h.edge, h.origin, sgn());
            }
            cv = pr.dst;
            for (auto it = pr.edges.rbegin(); it != pr.edges.rend(); ++it) {
                b.add_pair(*it, cv, sgn());
                ++pos;
                cv = g.other_end(*it, cv);
            }
            normalize_sign(b.psi);
            verify_exact(sg, b.psi);
            out.push_back({TrappedKind::B, b.psi, {}});
        }
    }

    if (!loops.empty()) {
        if (inner_odd.empty()) {
            // C-type: capped walks from a fixed loop to every other loop.
            int l0 = loops.front();
            int v0 = sg.edges[l0].origin;
            for (std::size_t li = 1; li < loops.size(); ++li) {
                int l1 = loops[li];
                Builder b(sg);
                auto pr = bfs_path(g, {v0}, {sg.edges[l1].origin});
                b.psi(l0) += 1;
                int pos = 1, cv = v0;
                for (int e : pr.edges) {
                    b.add_pair(e, cv, pos % 2 == 1 ? -1 : 1);
                    cv = g.other_end(e, cv);
                    ++pos;
                }
                b.psi(l1) += pos % 2 == 1 ? -1 : 1;
                normalize_sign(b.psi);
                verify_exact(sg, b.psi);
                out.push_back({TrappedKind::C, b.psi, {}});
            }
        } else {
            // D-type: each loop capped against the fixed odd face; the face
            // alternates with both junction edges +1, the path doubles.
            const Face* f0 = inner_odd.front();
            auto f0v = face_vertices(*f0);
            for (int l : loops) {
                Builder b(sg);
                auto pr = bfs_path(g, f0v, {sg.edges[l].origin});
                int kj = face_pos_at_vertex(*f0, pr.src);
                b.face_cycle(*f0, kj, +1);
                int cv = pr.src, val = -2;
                for (int e : pr.edges) {
                    b.add_pair(e, cv, val);
                    cv = g.other_end(e, cv);
                    val = -val;
                }
                b.psi(l) += val;  // cancels the last path edge; -2 when the loop sits on the face
                normalize_sign(b.psi);
                verify_exact(sg, b.psi);
                out.push_back({TrappedKind::D, b.psi, {}});
            }
        }
    }
    return out;
}

bool condition_rank_dependent(const StateGraph& sg) {
    const StructureGraph& g = sg.structure;
    for (int v = 0; v < sg.vertex_count(); ++v)
        if (g.degree(v) > 3) throw ValidationError("rank criterion needs max degree 3");
    std::vector<int> loops;
    for (int i = 0; i < sg.dim(); ++i)
        if (sg.edges[i].is_loop()) loops.push_back(i);
    int ncols = g.edge_count() + static_cast<int>(loops.size());
    Matrix a = Matrix::Zero(g.vertex_count(), ncols);
    for (int v = 0; v < g.vertex_count(); ++v)
        for (int i : sg.out_edges[v]) {
            const auto& e = sg.edges[i];
            if (e.is_loop()) {
                int col = g.edge_count() +
                          static_cast<int>(std::find(loops.begin(), loops.end(), i) - loops.begin());
                a(v, col) += 1;
            } else {
                a(v, e.structure_edge) += 1;
            }
        }
    int deficiency = g.vertex_count() - numeric_rank(a);
    if (deficiency > 1)
        throw NumericalError("coin/shift condition system lost more than one rank");
    return deficiency == 1;
}

std::string ColorConflict::describe(const StructureGraph& g) const {
    if (type == Type::Vertex)
        return "two edges at vertex " + g.vertex_names.at(vertex) + " would need the same color";
    return "paired directed edges over " + g.edges.at(edge).label + " would need different colors";
}

Complex EdgeColoring::value(int color) {
    static const double third = 2.0 * std::numbers::pi / 3.0;
    switch (color) {
        case 0: return Complex(1, 0);
        case 1: return std::polar(1.0, third);
        case 2: return std::polar(1.0, -third);
    }
    throw ValidationError("color out of range");
}

std::variant<EdgeColoring, ColorConflict> edge_3_color(const StateGraph& sg,
                                                       const PermutationSpec& perms) {
    perms.validate(sg);
    for (int v = 0; v < sg.vertex_count(); ++v) {
        if (sg.degree(v) != 3)
            throw ValidationError("edge coloring expects a 3-regular state graph");
        auto k = perms.kind_of(v);
        if (!k || *k == Rotation::Identity)
            throw ValidationError("edge coloring expects cyclic permutations at every vertex");
    }
    int n = sg.dim();
    std::vector<int> col(n, -1);
    std::deque<int> queue;
    col[0] = 0;  // seed: lowest-index directed edge gets r (fixes the overall phase)
    queue.push_back(0);
    while (!queue.empty()) {
        int i = queue.front();
        queue.pop_front();
        int v = sg.edges[i].origin;
        int j = sg.slot_of(i);
        // CW blocks carry colors in slot order r->g->b; CCW blocks reversed.
        int step = *perms.kind_of(v) == Rotation::CW ? 1 : -1;
        for (int t = 1; t < 3; ++t) {
            int jj = sg.out_edges[v][(j + t) % 3];
            int want = ((col[i] + step * t) % 3 + 3) % 3;
            if (col[jj] == -1) {
                col[jj] = want;
                queue.push_back(jj);
            } else if (col[jj] != want) {
                return ColorConflict{ColorConflict::Type::Vertex, v, -1};
            }
        }
        int p = sg.partner(i);
        if (p != i) {
            if (col[p] == -1) {
                col[p] = col[i];
                queue.push_back(p);
            } else if (col[p] != col[i]) {
                return ColorConflict{ColorConflict::Type::Pair, -1, sg.edges[i].structure_edge};
            }
        }
    }
    for (int c : col)
        if (c == -1) throw ValidationError("coloring did not reach every edge (graph disconnected?)");
    return EdgeColoring{std::move(col)};
}

CommonEigenstate eigenstate_from_coloring(const EdgeColoring& c, const StateGraph& sg,
                                          const PermutationSpec& perms, bool conjugate) {
    if (static_cast<int>(c.color.size()) != sg.dim())
        throw ValidationError("coloring size mismatch");
    CommonEigenstate out;
    out.alpha = std::polar(1.0, (conjugate ? -1.0 : 1.0) * std::numbers::pi / 3.0);
    out.state = Vector(sg.dim());
    for (int i = 0; i < sg.dim(); ++i) {
        Complex v = EdgeColoring::value(c.color[i]);
        out.state(i) = conjugate ? std::conj(v) : v;
    }
    // verify coin + shift conditions
    WalkSpec w{sg, CoinSpec::grover(sg), perms, Variant::U3};
    Matrix cp = coin_operator(w) * permutation_operator(w);
    double r = (cp * out.state - out.alpha * out.state).cwiseAbs().maxCoeff();
    for (int i = 0; i < sg.dim(); ++i)
        r = std::max(r, std::abs(out.state(i) - out.state(sg.partner(i))));
    if (r > 1e-12) throw ValidationError("coloring is not a consistent eigenstate");
    out.state /= out.state.norm();
    return out;
}

PermutationSpec permutations_from_coloring(const StateGraph& sg,
                                           const std::vector<int>& structure_colors,
                                           bool conjugate) {
    const StructureGraph& g = sg.structure;
    if (static_cast<int>(structure_colors.size()) != g.edge_count())
        throw ValidationError("structure coloring must assign every edge");
    for (int v = 0; v < g.vertex_count(); ++v) {
        std::set<int> seen;
        for (int e : g.incident(v)) {
            int c = structure_colors[e];
            if (c < 0 || c > 2 || !seen.insert(c).second)
                throw ValidationError("input is not a proper 3-coloring");
        }
    }
    // lift to directed edges; loops take the free colors in slot order
    std::vector<int> col(sg.dim(), -1);
    for (int i = 0; i < sg.dim(); ++i)
        if (!sg.edges[i].is_loop()) col[i] = structure_colors[sg.edges[i].structure_edge];
    std::vector<Rotation> kinds;
    for (int v = 0; v < sg.vertex_count(); ++v) {
        if (sg.degree(v) != 3)
            throw ValidationError("permutation synthesis expects a 3-regular state graph");
        const auto& sl = sg.out_edges[v];
        std::set<int> used;
        for (int i : sl)
            if (col[i] >= 0) used.insert(col[i]);
        for (int i : sl)
            if (col[i] < 0)
                for (int c = 0; c < 3; ++c)
                    if (!used.count(c)) {
                        col[i] = c;
                        used.insert(c);
                        break;
                    }
        int c0 = col[sl[0]], c1 = col[sl[1]], c2 = col[sl[2]];
        bool forward = c1 == (c0 + 1) % 3 && c2 == (c1 + 1) % 3;
        bool backward = c1 == (c0 + 2) % 3 && c2 == (c1 + 2) % 3;
        if (!forward && !backward) throw ValidationError("coloring lift is not cyclic at a vertex");
        // forward order carries the e^{i pi/3} eigenstate on a CW block
        bool cw = forward != conjugate;
        kinds.push_back(cw ? Rotation::CW : Rotation::CCW);
    }
    return PermutationSpec::from_kinds(sg, kinds);
}

std::optional<std::vector<int>> find_structure_3_coloring(const StructureGraph& g) {
    std::vector<int> col(g.edge_count(), -1);
    auto ok = [&](int e, int c) {
        for (int v : {g.edges[e].a, g.edges[e].b})
            for (int e2 : g.incident(v))
                if (e2 != e && col[e2] == c) return false;
        return true;
    };
    std::function<bool(int)> bt = [&](int e) {
        if (e == g.edge_count()) return true;
        for (int c = 0; c < 3; ++c)
            if (ok(e, c)) {
                col[e] = c;
                if (bt(e + 1)) return true;
                col[e] = -1;
            }
        return false;
    };
    if (!bt(0)) return std::nullopt;
    return col;
}

}  // namespace perqwalk
