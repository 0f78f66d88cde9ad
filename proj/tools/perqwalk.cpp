// perqwalk: coined quantum walks on finite graphs under dynamical percolation.
// Subcommands: simulate, attractors, color, transport, verify.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "perqwalk/io.hpp"
#include "perqwalk/transport.hpp"

using namespace perqwalk;
using nlohmann::json;

namespace {

struct Common {
    std::string graph_path;
    std::string walk_path;
    std::string scheme = "single_closed";
    std::string out;
    std::string format;  // empty = per-command default
    std::uint64_t seed = 0;
    int threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool needs_walk = true) {
    cmd->add_option("--graph", c.graph_path, "graph file")->required()->envname("PERQWALK_GRAPH");
    auto* w = cmd->add_option("--walk", c.walk_path, "walk spec JSON")->envname("PERQWALK_WALK");
    if (needs_walk) w->required();
    cmd->add_option("--scheme", c.scheme,
                    "scheme: single_open|single_closed|closed_vertex|full:p|JSON file")
        ->envname("PERQWALK_SCHEME");
    cmd->add_option("--out", c.out, "output path (default stdout)")->envname("PERQWALK_OUT");
    cmd->add_option("--format", c.format,
                    "csv|json (simulate defaults to csv, reports default to json)")
        ->envname("PERQWALK_FORMAT");
    cmd->add_option("--seed", c.seed, "RNG seed")->envname("PERQWALK_SEED");
    cmd->add_option("--threads", c.threads, "worker threads for channel sums")
        ->envname("PERQWALK_THREADS");
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
    } else {
        write_text_file(c.out, text);
    }
}

Vector initial_state(const std::string& desc, const StateGraph& sg) {
    Vector psi = Vector::Zero(sg.dim());
    if (desc.rfind("vertex:", 0) == 0) {
        int v = sg.structure.vertex_index(desc.substr(7));
        const auto& sl = sg.out_edges[v];
        for (int i : sl) psi(i) = Complex(1.0 / std::sqrt(double(sl.size())), 0);
        return psi;
    }
    if (desc.rfind("file:", 0) == 0) {
        json j = load_json_file(desc.substr(5));
        if (static_cast<int>(j.size()) != sg.dim())
            throw ValidationError("initial-state file dimension mismatch");
        for (int i = 0; i < sg.dim(); ++i)
            psi(i) = Complex(j[i][0].get<double>(), j[i][1].get<double>());
        double n = psi.norm();
        if (n < 1e-12) throw ValidationError("initial state is zero");
        return psi / n;
    }
    throw ValidationError("initial state must be vertex:NAME or file:PATH");
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

int cmd_simulate(const Common& c, int steps, const std::string& initial,
                 const std::vector<std::string>& sink_names, int trajectories) {
    auto g = parse_graph_file(c.graph_path);
    auto w = load_walk_spec(c.walk_path, g);
    auto scheme = parse_scheme_arg(c.scheme, g);
    Vector psi = initial_state(initial.empty() ? "vertex:" + g.vertex_names[0] : initial, w.graph);
    Matrix rho = psi * psi.adjoint();

    std::optional<Sink> sink;
    if (!sink_names.empty()) sink = Sink::from_names(g, sink_names);

    bool as_json = c.format == "json";
    std::ostringstream os;
    json series = json::array();
    if (!as_json) {
        os << "step,trace,purity";
        for (const auto& n : g.vertex_names) os << ",pop_" << n;
        os << "\n";
    }
    auto row = [&](int t, const Matrix& r) {
        double trace = r.trace().real();
        double purity = (r * r).trace().real();
        std::vector<double> pops(g.vertex_count(), 0.0);
        for (int v = 0; v < g.vertex_count(); ++v)
            for (int i : w.graph.out_edges[v]) pops[v] += r(i, i).real();
        if (as_json) {
            json pj = json::object();
            for (int v = 0; v < g.vertex_count(); ++v) pj[g.vertex_names[v]] = pops[v];
            series.push_back({{"step", t}, {"trace", trace}, {"purity", purity},
                              {"populations", pj}});
        } else {
            os << t << "," << fmt(trace) << "," << fmt(purity);
            for (double p : pops) os << "," << fmt(p);
            os << "\n";
        }
    };
    row(0, rho);
    if (trajectories > 0) {
        // Monte Carlo estimate: average projectors over seeded trajectory
        // streams; sinks are not supported on this path.
        if (sink) throw ValidationError("--trajectories does not combine with --sink");
        std::vector<Matrix> means(steps, Matrix::Zero(w.dim(), w.dim()));
        for (int k = 0; k < trajectories; ++k)
            sample_trajectory(psi, w, scheme, steps, c.seed, k,
                              [&](int t, const Vector& x) { means[t - 1] += x * x.adjoint(); });
        for (int t = 1; t <= steps; ++t) row(t, means[t - 1] / double(trajectories));
    } else {
        PreparedChannel ch(w, scheme);
        Matrix wrap;
        if (sink) wrap = Matrix::Identity(w.dim(), w.dim()) - sink_projector(w.graph, *sink);
        for (int t = 1; t <= steps; ++t) {
            rho = sink ? ch.apply_wrapped(rho, wrap, c.threads) : ch.apply(rho, c.threads);
            row(t, rho);
        }
    }
    emit(c, as_json ? json{{"series", series}}.dump(2) + "\n" : os.str());
    return 0;
}

int cmd_attractors(const Common& c, const std::string& check_path) {
    auto g = parse_graph_file(c.graph_path);
    auto w = load_walk_spec(c.walk_path, g);
    auto scheme = parse_scheme_arg(c.scheme, g);

    if (!check_path.empty()) {
        auto basis = attractor_basis_from_json(load_json_file(check_path));
        auto list = enumerate_scheme(scheme, g, 1 << 12);
        double worst = 0;
        for (const auto& a : basis.items)
            for (const auto& [k, p] : list) {
                Matrix u = step_operator(w, k);
                worst = std::max(worst,
                                 (u * a.mat * u.adjoint() - a.eigenvalue * a.mat).cwiseAbs().maxCoeff());
            }
        std::cout << "checked " << basis.size() << " attractors, max residual " << fmt(worst)
                  << "\n";
        return worst <= 1e-8 ? 0 : 2;
    }

    auto basis = brute_force_attractors(w, scheme);
    auto states = common_eigenstates(w);
    auto pats = p_attractors(states);

    std::map<std::pair<long, long>, std::pair<int, int>> by_lambda;  // rounded -> (total, p)
    auto key = [](Complex l) {
        return std::make_pair(std::lround(l.real() * 1e6), std::lround(l.imag() * 1e6));
    };
    for (const auto& a : basis.items) {
        auto& slot = by_lambda[key(a.eigenvalue)];
        ++slot.first;
    }
    for (auto& [kk, cnt] : by_lambda) {
        std::vector<Matrix> span;
        for (const auto& pa : pats)
            if (key(pa.eigenvalue) == kk) span.push_back(pa.mat);
        cnt.second = static_cast<int>(orthonormalize(span).size());
    }

    json summary = json::array();
    double worst = 0;
    for (const auto& a : basis.items) worst = std::max(worst, a.residual);
    for (const auto& [kk, cnt] : by_lambda)
        summary.push_back({{"eigenvalue", {kk.first / 1e6, kk.second / 1e6}},
                           {"dimension", cnt.first},
                           {"p_attractors", cnt.second},
                           {"non_p", cnt.first - cnt.second}});
    json out = attractor_basis_to_json(basis);
    out["summary"] = summary;
    out["total_dimension"] = basis.size();
    out["max_residual"] = worst;
    emit(c, out.dump(2) + "\n");
    return 0;
}

int cmd_color(const Common& c, bool from_structure, bool conjugate) {
    auto g = parse_graph_file(c.graph_path);
    if (from_structure) {
        auto colors = find_structure_3_coloring(g);
        if (!colors) {
            emit(c, "no proper 3-coloring of the structure graph exists\n");
            return 0;
        }
        StateGraph sg = build_state_graph(g, 3);
        auto perms = permutations_from_coloring(sg, *colors, conjugate);
        auto res = edge_3_color(sg, perms);
        if (!std::holds_alternative<EdgeColoring>(res))
            throw NumericalError("synthesized permutations failed to recolor the state graph");
        json j = coloring_to_json(std::get<EdgeColoring>(res), sg);
        json kinds = json::object();
        for (int v = 0; v < sg.vertex_count(); ++v)
            kinds[g.vertex_names[v]] = perms.kind_of(v) == Rotation::CW ? "cw" : "ccw";
        j["permutations"] = kinds;
        emit(c, j.dump(2) + "\n");
        return 0;
    }
    auto w = load_walk_spec(c.walk_path, g);
    auto res = edge_3_color(w.graph, w.permutation);
    if (std::holds_alternative<ColorConflict>(res)) {
        const auto& conflict = std::get<ColorConflict>(res);
        json j{{"conflict", conflict.describe(g)}};
        emit(c, j.dump(2) + "\n");
        return 0;
    }
    const auto& coloring = std::get<EdgeColoring>(res);
    auto es = eigenstate_from_coloring(coloring, w.graph, w.permutation, conjugate);
    json j = coloring_to_json(coloring, w.graph);
    j["eigenvalue"] = {es.alpha.real(), es.alpha.imag()};
    emit(c, j.dump(2) + "\n");
    return 0;
}

int cmd_transport(const Common& c, const std::string& source, const std::string& sink_name,
                  int steps, bool nonpercolated) {
    auto g = parse_graph_file(c.graph_path);
    auto w = load_walk_spec(c.walk_path, g);
    auto scheme = parse_scheme_arg(c.scheme, g);
    Sink sink = Sink::from_names(g, {sink_name});
    int src = g.vertex_index(source);

    auto trapped = trapped_basis(w.graph);
    std::vector<Vector> states;
    for (const auto& t : trapped) states.push_back(t.state());
    auto sr = sr_filter(states, w.graph, sink);
    if (nonpercolated) {
        // the extension states sit in their own eigenvalue sector
        auto extra = sr_filter(nonpercolated_trapped_extension(w, trapped), w.graph, sink);
        sr.insert(sr.end(), extra.begin(), extra.end());
    }
    auto range = efficiency_range_at_vertex(w.graph, src, sr);

    const auto& sl = w.graph.out_edges[src];
    Vector sym = Vector::Zero(w.dim());
    for (int i : sl) sym(i) = Complex(1.0 / std::sqrt(double(sl.size())), 0);
    double q_sym = transfer_efficiency(sym, sr);

    json rep;
    rep["source"] = source;
    rep["sink"] = sink_name;
    rep["percolated"] = !nonpercolated;
    rep["sr_trapped_count"] = sr.size();
    rep["analytic"] = {{"symmetric", q_sym}, {"min", range.min_q}, {"max", range.max_q}};

    std::map<std::string, std::vector<double>> survival_series;
    if (steps > 0) {
        json sims = json::object();
        Vector other = Vector::Zero(w.dim());
        if (sl.size() >= 2) {
            other(sl[0]) = Complex(1.0 / std::sqrt(2.0), 0);
            other(sl[1]) = Complex(-1.0 / std::sqrt(2.0), 0);
        }
        for (auto& [name, psi] : {std::pair<std::string, Vector>{"symmetric", sym},
                                  {"orthogonal", other}}) {
            if (psi.norm() < 0.5) continue;
            std::vector<double>& p = survival_series[name];
            if (nonpercolated) {
                Matrix u = step_operator(w, Configuration::all_open(g));
                Matrix it = Matrix::Identity(w.dim(), w.dim()) - sink_projector(w.graph, sink);
                Vector x = psi;
                p.push_back(1.0);
                for (int t = 0; t < steps; ++t) {
                    x = it * (u * x);
                    p.push_back(x.squaredNorm());
                }
            } else {
                auto run = evolve_with_sink(psi * psi.adjoint(), w, scheme, sink, steps, c.threads);
                p = run.survival;
            }
            sims[name] = 1.0 - p.back();
        }
        rep["simulated_q"] = sims;
        rep["steps"] = steps;
    }
    if (c.format == "csv" && !survival_series.empty()) {
        // time series of survival p and absorbed q per initial state
        std::ostringstream os;
        os << "step";
        for (const auto& [name, p] : survival_series) os << ",p_" << name << ",q_" << name;
        os << "\n";
        for (int t = 0; t <= steps; ++t) {
            os << t;
            for (const auto& [name, p] : survival_series)
                os << "," << fmt(p[t]) << "," << fmt(1.0 - p[t]);
            os << "\n";
        }
        emit(c, os.str());
        return 0;
    }
    emit(c, rep.dump(2) + "\n");
    return 0;
}

int cmd_verify(const Common& c, const std::vector<std::string>& sink_names, int steps) {
    auto g = parse_graph_file(c.graph_path);
    auto w = load_walk_spec(c.walk_path, g, /*validate=*/false);
    auto scheme = parse_scheme_arg(c.scheme, g);
    bool all_ok = true;
    auto report = [&](const std::string& name, bool ok, const std::string& extra = "") {
        std::cout << (ok ? "PASS" : "FAIL") << "  " << name;
        if (!extra.empty()) std::cout << "  (" << extra << ")";
        std::cout << "\n";
        all_ok = all_ok && ok;
    };

    bool coin_ok = true;
    std::string coin_msg;
    try {
        w.validate();
    } catch (const std::exception& e) {
        coin_ok = false;
        coin_msg = e.what();
    }
    report("coin and permutation blocks valid (unitarity 1e-12)", coin_ok, coin_msg);
    if (!coin_ok) return 2;

    auto list = enumerate_scheme(scheme, g, 1 << 12);
    double worst_u = 0, worst_r = 0;
    for (const auto& [k, p] : list) {
        Matrix u = step_operator(w, k);
        worst_u = std::max(worst_u, (u.adjoint() * u - Matrix::Identity(w.dim(), w.dim()))
                                        .cwiseAbs()
                                        .maxCoeff());
        Matrix r = reflecting_shift(w.graph, k);
        worst_r = std::max(worst_r, (r * r - Matrix::Identity(w.dim(), w.dim()))
                                        .cwiseAbs()
                                        .maxCoeff());
        worst_r = std::max(worst_r, (r - r.adjoint()).cwiseAbs().maxCoeff());
    }
    report("step operators unitary for every configuration", worst_u <= 1e-12, fmt(worst_u));
    report("reflecting shifts Hermitian involutions", worst_r <= 1e-12, fmt(worst_r));

    bool grover_ok = true;
    Matrix g3 = grover_coin(3);
    std::vector<int> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end());
    do {
        Matrix q = Matrix::Zero(3, 3);
        for (int i = 0; i < 3; ++i) q(idx[i], i) = 1;
        if (((q * g3 * q.adjoint()) - g3).cwiseAbs().maxCoeff() != 0.0) grover_ok = false;
    } while (std::next_permutation(idx.begin(), idx.end()));
    report("Grover coin commutes with every permutation", grover_ok);

    Vector psi = Vector::Zero(w.dim());
    psi(0) = 1;
    Matrix rho = psi * psi.adjoint();
    PreparedChannel ch(w, scheme);
    double drift = 0;
    for (int t = 0; t < steps; ++t) {
        rho = ch.apply(rho, c.threads);
        drift = std::max(drift, std::abs(rho.trace().real() - 1.0));
    }
    report("channel preserves trace over " + std::to_string(steps) + " steps", drift <= 1e-9,
           fmt(drift));

    if (!sink_names.empty()) {
        Sink sink = Sink::from_names(g, sink_names);
        bool mono = true;
        try {
            evolve_with_sink(rho, w, scheme, sink, 100, c.threads);
        } catch (const NumericalError&) {
            mono = false;
        }
        report("sink trace non-increasing over 100 steps", mono);
    }

    bool deg3 = true;
    for (int v = 0; v < w.graph.vertex_count(); ++v) deg3 = deg3 && w.graph.degree(v) == 3;
    if (deg3) {
        bool dep = condition_rank_dependent(w.graph);
        bool bip = is_bipartite(g).has_value();
        bool loopfree = w.graph.loop_count() == 0;
        report("condition-rank deficiency matches bipartite/3-regular/loop-free criterion",
               dep == (bip && loopfree));
    }

    bool equiv = equivalent_to_full(scheme, g);
    report(std::string("scheme '") + scheme.name() + "' certified equivalent to full percolation",
           equiv);

    return all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coined quantum walks on percolated graphs"};
    app.require_subcommand(1);

    Common c;
    int steps = 100;
    std::string initial;
    std::vector<std::string> sink_names;
    std::string check_path;
    bool from_structure = false, conjugate = false, nonpercolated = false;
    std::string source = "v0", sink_one = "v7";

    int trajectories = 0;
    auto* sim = app.add_subcommand("simulate", "evolve the percolated channel, emit CSV series");
    add_common(sim, c);
    sim->add_option("--steps", steps, "number of steps");
    sim->add_option("--initial", initial, "vertex:NAME or file:PATH");
    sim->add_option("--sink", sink_names, "sink vertex names");
    sim->add_option("--trajectories", trajectories,
                    "Monte Carlo trajectories instead of the exact channel");

    auto* att = app.add_subcommand("attractors", "attractor basis dump and per-eigenvalue summary");
    add_common(att, c);
    att->add_option("--check", check_path, "verify a previously dumped basis instead");

    auto* col = app.add_subcommand("color", "edge-3-coloring / conflict certificate");
    add_common(col, c, /*needs_walk=*/false);
    col->add_flag("--from-structure-coloring", from_structure,
                  "search a structure coloring and synthesize permutations");
    col->add_flag("--conjugate", conjugate, "use the conjugate eigenvalue");

    auto* tra = app.add_subcommand("transport", "source-to-sink efficiency report");
    add_common(tra, c);
    tra->add_option("--source", source, "source vertex")->required();
    tra->add_option("--sink", sink_one, "sink vertex")->required();
    tra->add_option("--steps", steps, "simulated steps (0 = analytic only)");
    tra->add_flag("--nonpercolated", nonpercolated, "all edges open, extended trapped set");

    auto* ver = app.add_subcommand("verify", "run the invariant suite, print pass/fail lines");
    add_common(ver, c);
    ver->add_option("--sink", sink_names, "sink vertex names (adds monotonicity check)");
    ver->add_option("--steps", steps, "trace-preservation steps")->default_val(1000);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(c, steps, initial, sink_names, trajectories);
        if (att->parsed()) return cmd_attractors(c, check_path);
        if (col->parsed()) return cmd_color(c, from_structure, conjugate);
        if (tra->parsed()) return cmd_transport(c, source, sink_one, steps, nonpercolated);
        if (ver->parsed()) return cmd_verify(c, sink_names, steps);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
