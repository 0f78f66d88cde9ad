#include "perqwalk/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace perqwalk {

int StructureGraph::other_end(int e, int v) const {
    const auto& ed = edges.at(e);
    if (ed.a == v) return ed.b;
    if (ed.b == v) return ed.a;
    throw ValidationError("edge " + ed.label + " is not incident to vertex " + vertex_names.at(v));
}

const std::vector<int>& StructureGraph::incident(int v) const {
    return incident_.at(v);
}

int StructureGraph::vertex_index(const std::string& name) const {
    for (int i = 0; i < vertex_count(); ++i)
        if (vertex_names[i] == name) return i;
    throw ValidationError("unknown vertex: " + name);
}

int StructureGraph::edge_index(const std::string& label) const {
    for (int i = 0; i < edge_count(); ++i)
        if (edges[i].label == label) return i;
    throw ValidationError("unknown edge label: " + label);
}

void StructureGraph::finalize() {
    incident_.assign(vertex_count(), {});
    if (has_rotation) {
        for (int v = 0; v < vertex_count(); ++v) incident_[v] = rotation[v];
    } else {
        for (int e = 0; e < edge_count(); ++e) {
            incident_[edges[e].a].push_back(e);
            incident_[edges[e].b].push_back(e);
        }
    }
}

void StructureGraph::validate() const {
    std::set<std::string> labels;
    std::set<std::pair<int, int>> pairs;
    for (const auto& e : edges) {
        if (!labels.insert(e.label).second)
            throw ValidationError("duplicate edge label: " + e.label);
        if (e.a == e.b)
            throw ValidationError("loop edge in structure graph: " + e.label);
        auto key = std::minmax(e.a, e.b);
        if (!pairs.insert(key).second)
            throw ValidationError("parallel edge in structure graph: " + e.label);
    }
    if (has_rotation) {
        if (static_cast<int>(rotation.size()) != vertex_count())
            throw ValidationError("rotation does not cover every vertex");
        for (int v = 0; v < vertex_count(); ++v) {
            std::set<int> seen(rotation[v].begin(), rotation[v].end());
            int deg = 0;
            for (int e = 0; e < edge_count(); ++e)
                if (edges[e].a == v || edges[e].b == v) {
                    ++deg;
                    if (!seen.count(e))
                        throw ValidationError("rotation at " + vertex_names[v] +
                                              " misses edge " + edges[e].label);
                }
            if (static_cast<int>(rotation[v].size()) != deg)
                throw ValidationError("rotation at " + vertex_names[v] +
                                      " does not list each incident edge exactly once");
        }
    }
    // connectivity
    if (vertex_count() == 0) throw ValidationError("graph has no vertices");
    std::vector<bool> vis(vertex_count(), false);
    std::queue<int> q;
    q.push(0);
    vis[0] = true;
    int seen = 1;
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e : incident(v)) {
            int u = other_end(e, v);
            if (!vis[u]) {
                vis[u] = true;
                ++seen;
                q.push(u);
            }
        }
    }
    if (seen != vertex_count()) throw ValidationError("graph is not connected");
    for (int e : outer_face_hint)
        if (e < 0 || e >= edge_count()) throw ValidationError("outer_face hint references unknown edge");
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

}  // namespace

StructureGraph parse_graph(std::istream& in) {
    StructureGraph g;
    std::map<std::string, int> vids;
    std::map<std::string, int> eids;
    int declared = -1;
    auto intern_vertex = [&](const std::string& name) {
        auto it = vids.find(name);
        if (it != vids.end()) return it->second;
        int id = static_cast<int>(g.vertex_names.size());
        vids[name] = id;
        g.vertex_names.push_back(name);
        return id;
    };
    std::vector<std::pair<std::string, std::vector<std::string>>> rot_lines;
    std::vector<std::string> outer_labels;

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto ts = tokens(line);
        if (ts.empty()) continue;
        auto fail = [&](const std::string& msg) -> ParseError {
            return ParseError("line " + std::to_string(lineno) + ": " + msg);
        };
        if (ts[0] == "vertices") {
            if (ts.size() != 2) throw fail("expected: vertices N");
            declared = std::stoi(ts[1]);
        } else if (ts[0] == "vertex") {
            if (ts.size() != 2) throw fail("expected: vertex NAME");
            intern_vertex(ts[1]);
        } else if (ts[0] == "edge") {
            if (ts.size() != 4) throw fail("expected: edge LABEL A B");
            if (eids.count(ts[1])) throw fail("duplicate edge label: " + ts[1]);
            int id = static_cast<int>(g.edges.size());
            eids[ts[1]] = id;
            g.edges.push_back({ts[1], intern_vertex(ts[2]), intern_vertex(ts[3])});
        } else if (ts[0] == "rotation") {
            if (ts.size() < 2) throw fail("expected: rotation V: LABELS...");
            std::string vname = ts[1];
            if (!vname.empty() && vname.back() == ':') vname.pop_back();
            std::vector<std::string> labs(ts.begin() + 2, ts.end());
            if (!labs.empty() && labs[0] == ":") labs.erase(labs.begin());
            rot_lines.emplace_back(vname, labs);
        } else if (ts[0] == "outer_face:" || ts[0] == "outer_face") {
            std::string rest;
            for (size_t i = 1; i < ts.size(); ++i) rest += ts[i];
            std::string cur;
            for (char c : rest + ",") {
                if (c == ',') {
                    if (!cur.empty()) outer_labels.push_back(cur);
                    cur.clear();
                } else if (c != ':') {
                    cur += c;
                }
            }
        } else {
            throw fail("unknown directive: " + ts[0]);
        }
    }
    if (declared >= 0 && declared != static_cast<int>(g.vertex_names.size()))
        throw ParseError("vertices header says " + std::to_string(declared) + " but file defines " +
                         std::to_string(g.vertex_names.size()));
    if (!rot_lines.empty()) {
        g.has_rotation = true;
        g.rotation.assign(g.vertex_names.size(), {});
        for (auto& [vname, labs] : rot_lines) {
            auto vit = vids.find(vname);
            if (vit == vids.end()) throw ParseError("rotation for unknown vertex: " + vname);
            for (auto& l : labs) {
                auto eit = eids.find(l);
                if (eit == eids.end()) throw ParseError("rotation references unknown edge: " + l);
                g.rotation[vit->second].push_back(eit->second);
            }
        }
    }
    for (auto& l : outer_labels) {
        auto eit = eids.find(l);
        if (eit == eids.end()) throw ParseError("outer_face references unknown edge: " + l);
        g.outer_face_hint.push_back(eit->second);
    }
    g.finalize();
    g.validate();
    return g;
}

StructureGraph parse_graph_text(const std::string& text) {
    std::istringstream is(text);
    return parse_graph(is);
}

StructureGraph parse_graph_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open graph file: " + path);
    return parse_graph(f);
}

int StateGraph::slot_of(int i) const {
    const auto& sl = out_edges[edges[i].origin];
    for (int k = 0; k < static_cast<int>(sl.size()); ++k)
        if (sl[k] == i) return k;
    throw ValidationError("directed edge not in its origin's slot list");
}

int StateGraph::directed_index(int e, int origin) const {
    for (int i : out_edges[origin])
        if (edges[i].structure_edge == e) return i;
    throw ValidationError("no directed edge over " + structure.edges.at(e).label +
                          " leaving " + structure.vertex_names.at(origin));
}

std::vector<int> StateGraph::loops_of(int v) const {
    std::vector<int> out;
    for (int i : out_edges[v])
        if (edges[i].is_loop()) out.push_back(i);
    return out;
}

int StateGraph::loop_count() const {
    int n = 0;
    for (const auto& e : edges) n += e.is_loop() ? 1 : 0;
    return n;
}

StateGraph build_state_graph(const StructureGraph& g, std::optional<int> target_degree) {
    StateGraph st;
    st.structure = g;
    st.out_edges.assign(g.vertex_count(), {});
    std::map<int, int> first_half;  // structure edge -> first directed id
    for (int v = 0; v < g.vertex_count(); ++v) {
        for (int e : g.incident(v)) {
            int idx = static_cast<int>(st.edges.size());
            st.edges.push_back({v, g.other_end(e, v), -1, e});
            st.out_edges[v].push_back(idx);
            auto it = first_half.find(e);
            if (it != first_half.end()) {
                st.edges[idx].partner = it->second;
                st.edges[it->second].partner = idx;
            } else {
                first_half[e] = idx;
            }
        }
        if (target_degree) {
            int d = g.degree(v);
            if (d > *target_degree)
                throw ValidationError("vertex " + g.vertex_names[v] + " has degree " +
                                      std::to_string(d) + " above target " +
                                      std::to_string(*target_degree));
            for (int k = d; k < *target_degree; ++k) {
                int idx = static_cast<int>(st.edges.size());
                st.edges.push_back({v, v, idx, -1});
                st.out_edges[v].push_back(idx);
            }
        }
    }
    return st;
}

std::vector<const Face*> FaceSet::inner() const {
    std::vector<const Face*> out;
    for (int i = 0; i < static_cast<int>(all.size()); ++i)
        if (i != outer_index) out.push_back(&all[i]);
    return out;
}

FaceSet faces(const StructureGraph& g) {
    if (!g.has_rotation)
        throw ValidationError("face tracing requires a rotation system (embedding)");
    // next of (u->v): successor of (v->u) in the rotation at v, directed away from v
    FaceSet fs;
    std::set<std::pair<int, int>> visited;  // (edge, origin)
    for (int e0 = 0; e0 < g.edge_count(); ++e0) {
        for (int ori : {g.edges[e0].a, g.edges[e0].b}) {
            if (visited.count({e0, ori})) continue;
            Face f;
            int ce = e0, cu = ori;
            while (!visited.count({ce, cu})) {
                visited.insert({ce, cu});
                int cv = g.other_end(ce, cu);
                f.boundary.push_back({ce, cu});
                const auto& rot = g.rotation[cv];
                auto it = std::find(rot.begin(), rot.end(), ce);
                int k = static_cast<int>(it - rot.begin());
                ce = rot[(k + 1) % rot.size()];
                cu = cv;
            }
            fs.all.push_back(std::move(f));
        }
    }
    if (static_cast<int>(fs.all.size()) + g.vertex_count() - g.edge_count() != 2)
        throw ValidationError("rotation system is not a planar embedding (Euler check failed)");
    // outer face: explicit hint, else longest boundary; ties broken so that the
    // face with the larger minimal half-edge key is taken as outer.
    auto half_key = [&](const HalfEdge& h) {
        return 2 * h.edge + (h.origin == g.edges[h.edge].a ? 0 : 1);
    };
    if (!g.outer_face_hint.empty()) {
        std::set<int> hint(g.outer_face_hint.begin(), g.outer_face_hint.end());
        for (int i = 0; i < static_cast<int>(fs.all.size()); ++i) {
            std::set<int> got;
            for (const auto& h : fs.all[i].boundary) got.insert(h.edge);
            if (got == hint) {
                fs.outer_index = i;
                break;
            }
        }
        if (fs.outer_index < 0)
            throw ValidationError("outer_face hint does not match any traced face");
    } else {
        int best = 0;
        auto key = [&](int i) {
            int mn = 1 << 30;
            for (const auto& h : fs.all[i].boundary) mn = std::min(mn, half_key(h));
            return std::make_pair(fs.all[i].length(), mn);
        };
        for (int i = 1; i < static_cast<int>(fs.all.size()); ++i) {
            auto a = key(i), b = key(best);
            if (a.first > b.first || (a.first == b.first && a.second > b.second)) best = i;
        }
        fs.outer_index = best;
    }
    fs.all[fs.outer_index].is_outer = true;
    return fs;
}

std::optional<std::vector<int>> is_bipartite(const StructureGraph& g) {
    std::vector<int> color(g.vertex_count(), -1);
    std::queue<int> q;
    color[0] = 0;
    q.push(0);
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (int e : g.incident(v)) {
            int u = g.other_end(e, v);
            if (color[u] == -1) {
                color[u] = 1 - color[v];
                q.push(u);
            } else if (color[u] == color[v]) {
                return std::nullopt;
            }
        }
    }
    return color;
}

Configuration Configuration::all_open(const StructureGraph& g) {
    return {std::vector<bool>(g.edge_count(), true)};
}

Configuration Configuration::all_closed(const StructureGraph& g) {
    return {std::vector<bool>(g.edge_count(), false)};
}

Configuration Configuration::from_labels(const StructureGraph& g,
                                         const std::vector<std::string>& labels) {
    Configuration k = all_closed(g);
    for (const auto& l : labels) k.open[g.edge_index(l)] = true;
    return k;
}

int Configuration::open_count() const {
    int n = 0;
    for (bool b : open) n += b ? 1 : 0;
    return n;
}

}  // namespace perqwalk
