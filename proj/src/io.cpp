#include "perqwalk/io.hpp"

#include <fstream>
#include <sstream>

namespace perqwalk {

using nlohmann::json;

namespace {

Matrix block_from_json(const json& rows) {
    int d = static_cast<int>(rows.size());
    Matrix m(d, d);
    for (int i = 0; i < d; ++i) {
        if (static_cast<int>(rows[i].size()) != d)
            throw ParseError("coin block rows must form a square matrix");
        for (int j = 0; j < d; ++j) {
            const auto& cell = rows[i][j];
            if (cell.is_array()) {
                if (cell.size() != 2) throw ParseError("matrix entries are [re, im] pairs");
                m(i, j) = Complex(cell[0].get<double>(), cell[1].get<double>());
            } else {
                m(i, j) = Complex(cell.get<double>(), 0.0);
            }
        }
    }
    return m;
}

json block_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

Rotation rotation_from_name(const std::string& s) {
    if (s == "identity" || s == "id") return Rotation::Identity;
    if (s == "cw") return Rotation::CW;
    if (s == "ccw") return Rotation::CCW;
    throw ParseError("unknown rotation kind: " + s);
}

CoinSpec coin_from_json(const json& j, const StateGraph& sg) {
    std::string preset;
    if (j.is_string()) preset = j.get<std::string>();
    else if (j.contains("preset")) preset = j["preset"].get<std::string>();
    if (!preset.empty()) {
        if (preset == "grover") return CoinSpec::grover(sg);
        if (preset == "identity") return CoinSpec::identity(sg);
        if (preset == "hadamard") return CoinSpec::hadamard(sg);
        throw ParseError("unknown coin preset: " + preset);
    }
    if (!j.contains("blocks")) throw ParseError("coin needs a preset or explicit blocks");
    CoinSpec c;
    c.blocks.resize(sg.vertex_count());
    std::vector<bool> seen(sg.vertex_count(), false);
    for (auto it = j["blocks"].begin(); it != j["blocks"].end(); ++it) {
        int v = sg.structure.vertex_index(it.key());
        c.blocks[v] = block_from_json(it.value());
        seen[v] = true;
    }
    for (int v = 0; v < sg.vertex_count(); ++v)
        if (!seen[v])
            throw ParseError("coin blocks miss vertex " + sg.structure.vertex_names[v]);
    return c;
}

PermutationSpec permutation_from_json(const json& j, const StateGraph& sg) {
    std::string preset;
    if (j.is_string()) preset = j.get<std::string>();
    else if (j.contains("preset")) preset = j["preset"].get<std::string>();
    if (!preset.empty()) {
        if (preset == "identity") return PermutationSpec::identity(sg);
        if (preset == "cw") return PermutationSpec::cyclic(sg, Rotation::CW);
        if (preset == "ccw") return PermutationSpec::cyclic(sg, Rotation::CCW);
        if (preset == "transporting") return PermutationSpec::transporting(sg);
        throw ParseError("unknown permutation preset: " + preset);
    }
    if (j.contains("per_vertex")) {
        std::vector<Rotation> kinds(sg.vertex_count(), Rotation::Identity);
        for (auto it = j["per_vertex"].begin(); it != j["per_vertex"].end(); ++it)
            kinds[sg.structure.vertex_index(it.key())] =
                rotation_from_name(it.value().get<std::string>());
        return PermutationSpec::from_kinds(sg, kinds);
    }
    if (j.contains("per_vertex_slots")) {
        PermutationSpec p;
        p.perm.resize(sg.vertex_count());
        for (auto it = j["per_vertex_slots"].begin(); it != j["per_vertex_slots"].end(); ++it)
            p.perm[sg.structure.vertex_index(it.key())] = it.value().get<std::vector<int>>();
        for (int v = 0; v < sg.vertex_count(); ++v)
            if (p.perm[v].empty() && sg.degree(v) > 0)
                throw ParseError("per_vertex_slots misses vertex " + sg.structure.vertex_names[v]);
        return p;
    }
    throw ParseError("permutation needs a preset, per_vertex, or per_vertex_slots");
}

}  // namespace

WalkSpec walk_spec_from_json(const json& j, const StructureGraph& g, bool validate) {
    std::optional<int> target;
    if (j.contains("target_degree") && !j["target_degree"].is_null())
        target = j["target_degree"].get<int>();
    StateGraph sg = build_state_graph(g, target);
    WalkSpec w;
    w.coin = coin_from_json(j.value("coin", json("grover")), sg);
    w.permutation = permutation_from_json(j.value("permutation", json("identity")), sg);
    std::string variant = j.value("variant", "U3");
    if (variant == "U1") w.variant = Variant::U1;
    else if (variant == "U3") w.variant = Variant::U3;
    else throw ParseError("variant must be U1 or U3");
    w.graph = std::move(sg);
    if (validate) w.validate();
    return w;
}

WalkSpec load_walk_spec(const std::string& path, const StructureGraph& g, bool validate) {
    return walk_spec_from_json(load_json_file(path), g, validate);
}

json walk_spec_to_json(const WalkSpec& w) {
    json j;
    json blocks;
    for (int v = 0; v < w.graph.vertex_count(); ++v)
        blocks[w.graph.structure.vertex_names[v]] = block_to_json(w.coin.blocks[v]);
    j["coin"] = {{"blocks", blocks}};
    json slots;
    for (int v = 0; v < w.graph.vertex_count(); ++v)
        slots[w.graph.structure.vertex_names[v]] = w.permutation.perm[v];
    j["permutation"] = {{"per_vertex_slots", slots}};
    j["variant"] = w.variant == Variant::U1 ? "U1" : "U3";
    int loops = w.graph.loop_count();
    if (loops > 0) j["target_degree"] = w.graph.degree(0);
    return j;
}

PercolationScheme scheme_from_json(const json& j, const StructureGraph& g) {
    std::string kind = j.value("kind", "");
    if (kind == "full") return PercolationScheme::full(j.value("p", 0.5));
    if (kind == "single_open") return PercolationScheme::single_open();
    if (kind == "single_closed") return PercolationScheme::single_closed();
    if (kind == "closed_vertex") return PercolationScheme::closed_vertex();
    if (kind == "explicit") {
        std::vector<std::pair<Configuration, double>> entries;
        for (const auto& e : j.at("configurations")) {
            auto labels = e.at("open").get<std::vector<std::string>>();
            entries.emplace_back(Configuration::from_labels(g, labels),
                                 e.at("probability").get<double>());
        }
        auto s = PercolationScheme::explicit_list(std::move(entries));
        s.validate(g);
        return s;
    }
    throw ParseError("unknown scheme kind: " + kind);
}

PercolationScheme parse_scheme_arg(const std::string& arg, const StructureGraph& g) {
    if (arg == "single_open") return PercolationScheme::single_open();
    if (arg == "single_closed") return PercolationScheme::single_closed();
    if (arg == "closed_vertex") return PercolationScheme::closed_vertex();
    if (arg.rfind("full:", 0) == 0) return PercolationScheme::full(std::stod(arg.substr(5)));
    if (arg == "full") return PercolationScheme::full(0.5);
    return scheme_from_json(load_json_file(arg), g);
}

json scheme_to_json(const PercolationScheme& s, const StructureGraph& g) {
    json j;
    j["kind"] = s.name();
    if (s.kind == PercolationScheme::Kind::Full) j["p"] = s.p;
    if (s.kind == PercolationScheme::Kind::Explicit) {
        json list = json::array();
        for (const auto& [k, p] : s.entries) {
            json labels = json::array();
            for (int e = 0; e < g.edge_count(); ++e)
                if (k.is_open(e)) labels.push_back(g.edges[e].label);
            list.push_back({{"open", labels}, {"probability", p}});
        }
        j["configurations"] = list;
    }
    return j;
}

json attractor_to_json(const Attractor& a) {
    json j;
    j["eigenvalue"] = {a.eigenvalue.real(), a.eigenvalue.imag()};
    j["p_attractor"] = a.is_p;
    j["residual"] = a.residual;
    j["matrix"] = block_to_json(a.mat);
    return j;
}

json attractor_basis_to_json(const AttractorBasis& b) {
    json arr = json::array();
    for (const auto& a : b.items) arr.push_back(attractor_to_json(a));
    return json{{"attractors", arr}};
}

AttractorBasis attractor_basis_from_json(const json& j) {
    AttractorBasis b;
    for (const auto& e : j.at("attractors")) {
        Attractor a;
        a.eigenvalue = Complex(e.at("eigenvalue")[0].get<double>(),
                               e.at("eigenvalue")[1].get<double>());
        a.is_p = e.value("p_attractor", false);
        a.residual = e.value("residual", 0.0);
        a.mat = block_from_json(e.at("matrix"));
        b.items.push_back(std::move(a));
    }
    return b;
}

json coloring_to_json(const EdgeColoring& c, const StateGraph& sg) {
    static const char* names[3] = {"r", "g", "b"};
    json per_structure = json::object();
    json per_loop = json::array();
    for (int i = 0; i < sg.dim(); ++i) {
        const auto& e = sg.edges[i];
        if (e.is_loop()) {
            per_loop.push_back({{"vertex", sg.structure.vertex_names[e.origin]},
                                {"color", names[c.color[i]]}});
        } else if (i < sg.partner(i)) {
            per_structure[sg.structure.edges[e.structure_edge].label] = names[c.color[i]];
        }
    }
    return json{{"edges", per_structure}, {"loops", per_loop}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw ParseError("cannot open for writing: " + path);
    f << content;
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open: " + path);
    try {
        return json::parse(f, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace perqwalk
