#include "perqwalk/transport.hpp"

#include <algorithm>
#include <cmath>

namespace perqwalk {

Sink Sink::from_names(const StructureGraph& g, const std::vector<std::string>& names) {
    Sink s;
    for (const auto& n : names) s.vertices.push_back(g.vertex_index(n));
    return s;
}

Matrix sink_projector(const StateGraph& sg, const Sink& sink) {
    Matrix t = Matrix::Zero(sg.dim(), sg.dim());
    for (int v : sink.vertices) {
        if (v < 0 || v >= sg.vertex_count()) throw ValidationError("sink vertex out of range");
        for (int i : sg.out_edges[v]) t(i, i) = 1;
    }
    return t;
}

SinkRun evolve_with_sink(const Matrix& rho0, const WalkSpec& w, const PercolationScheme& s,
                         const Sink& sink, int steps, int threads) {
    PreparedChannel ch(w, s);
    Matrix it = Matrix::Identity(w.dim(), w.dim()) - sink_projector(w.graph, sink);
    SinkRun run;
    run.survival.reserve(steps + 1);
    Matrix rho = rho0;
    run.survival.push_back(rho.trace().real());
    for (int t = 0; t < steps; ++t) {
        rho = ch.apply_wrapped(rho, it, threads);
        double p = rho.trace().real();
        if (p > run.survival.back() + 1e-12)
            throw NumericalError("sink run lost trace monotonicity");
        run.survival.push_back(p);
    }
    run.final_rho = std::move(rho);
    return run;
}

std::vector<Vector> sr_filter(const std::vector<Vector>& trapped, const StateGraph& sg,
                              const Sink& sink) {
    std::vector<Vector> cur = trapped;
    double scale = 0;
    for (const auto& t : trapped) scale = std::max(scale, t.norm());
    const double tol = 1e-12 * std::max(1.0, scale);
    for (int v : sink.vertices) {
        for (int i : sg.out_edges[v]) {
            std::vector<int> overlapping;
            for (std::size_t k = 0; k < cur.size(); ++k)
                if (std::abs(cur[k](i)) > tol) overlapping.push_back(static_cast<int>(k));
            if (overlapping.empty()) continue;
            if (overlapping.size() == 1) {
                cur.erase(cur.begin() + overlapping.front());
                continue;
            }
            // several states overlap this sink base state: keep the
            // combinations with zero amplitude there, dropping one dimension
            int pivot = overlapping.front();
            for (int k : overlapping)
                if (std::abs(cur[k](i)) > std::abs(cur[pivot](i))) pivot = k;
            Complex pv = cur[pivot](i);
            for (int k : overlapping)
                if (k != pivot) cur[k] -= (cur[k](i) / pv) * cur[pivot];
            cur.erase(cur.begin() + pivot);
        }
    }
    Matrix t = sink_projector(sg, sink);
    for (const auto& s : cur)
        if ((t * s).norm() > 1e-12 * std::max(1.0, s.norm()))
            throw NumericalError("sr filtering left a state with sink overlap");
    return cur;
}

std::vector<Vector> sr_trapped_basis(const std::vector<TrappedState>& trapped,
                                     const StateGraph& sg, const Sink& sink) {
    std::vector<Vector> vs;
    vs.reserve(trapped.size());
    for (const auto& t : trapped) vs.push_back(t.state());
    return sr_filter(vs, sg, sink);
}

double transfer_efficiency(const Vector& psi0, const std::vector<Vector>& sr_states) {
    if (std::abs(psi0.norm() - 1.0) > 1e-10)
        throw ValidationError("initial state must be normalized");
    auto q = orthonormalize_vectors(sr_states);
    double trapped = 0;
    for (const auto& b : q) trapped += std::norm(b.dot(psi0));
    double eff = 1.0 - trapped;
    return std::clamp(eff, 0.0, 1.0);
}

EfficiencyRange efficiency_range_at_vertex(const StateGraph& sg, int vertex,
                                           const std::vector<Vector>& sr_states) {
    auto q = orthonormalize_vectors(sr_states);
    const auto& sl = sg.out_edges[vertex];
    int d = static_cast<int>(sl.size());
    // Gram matrix of the sr-span projector restricted to the vertex subspace
    Matrix m = Matrix::Zero(d, d);
    for (const auto& b : q)
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) += b(sl[i]) * std::conj(b(sl[j]));
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    return {std::clamp(1.0 - hi, 0.0, 1.0), std::clamp(1.0 - lo, 0.0, 1.0)};
}

std::vector<Vector> nonpercolated_trapped_extension(const WalkSpec& w,
                                                    const std::vector<TrappedState>& trapped) {
    const StateGraph& sg = w.graph;
    Matrix u = step_operator(w, Configuration::all_open(sg.structure));
    std::vector<Vector> out;
    for (const auto& t : trapped) {
        if (t.kind != TrappedKind::A || t.defining_face.empty()) continue;
        Vector psi = Vector::Zero(sg.dim());
        for (const auto& h : t.defining_face) {
            int i = sg.directed_index(h.edge, h.origin);
            psi(i) += 1;              // along the face walk
            psi(sg.partner(i)) -= 1;  // against it
        }
        // unit-modulus eigenvector of the all-open step operator
        Complex lam = psi.dot(u * psi) / psi.squaredNorm();
        lam /= std::abs(lam);
        double r = (u * psi - lam * psi).cwiseAbs().maxCoeff();
        if (r > 1e-10)
            throw NumericalError("non-percolated extension state failed eigenvector check");
        out.push_back(std::move(psi));
    }
    return out;
}

}  // namespace perqwalk
