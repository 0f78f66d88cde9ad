#include "perqwalk/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace perqwalk {

PercolationScheme PercolationScheme::full(double p) {
    PercolationScheme s;
    s.kind = Kind::Full;
    s.p = p;
    return s;
}

PercolationScheme PercolationScheme::explicit_list(std::vector<std::pair<Configuration, double>> e) {
    PercolationScheme s;
    s.kind = Kind::Explicit;
    s.entries = std::move(e);
    return s;
}

void PercolationScheme::validate(const StructureGraph& g) const {
    switch (kind) {
        case Kind::Full:
            if (!(p > 0.0 && p < 1.0))
                throw ValidationError("full percolation requires 0 < p < 1");
            break;
        case Kind::Explicit: {
            if (entries.empty()) throw ValidationError("explicit scheme has no configurations");
            double sum = 0;
            for (const auto& [k, prob] : entries) {
                if (static_cast<int>(k.open.size()) != g.edge_count())
                    throw ValidationError("configuration size does not match the graph");
                if (prob <= 0) throw ValidationError("configuration probabilities must be positive");
                sum += prob;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw ValidationError("configuration probabilities must sum to 1");
            break;
        }
        default:
            break;
    }
}

const char* PercolationScheme::name() const {
    switch (kind) {
        case Kind::Full: return "full";
        case Kind::SingleOpen: return "single_open";
        case Kind::SingleClosed: return "single_closed";
        case Kind::ClosedVertex: return "closed_vertex";
        case Kind::Explicit: return "explicit";
    }
    return "?";
}

std::vector<std::pair<Configuration, double>> enumerate_scheme(const PercolationScheme& s,
                                                               const StructureGraph& g,
                                                               std::size_t cap) {
    s.validate(g);
    int ne = g.edge_count();
    std::vector<std::pair<Configuration, double>> out;
    switch (s.kind) {
        case PercolationScheme::Kind::Full: {
            if (ne >= 63 || (std::size_t(1) << ne) > cap)
                throw ValidationError("full-percolation enumeration exceeds the configuration cap; "
                                      "use a restricted scheme or Monte Carlo sampling");
            std::size_t total = std::size_t(1) << ne;
            for (std::size_t mask = 0; mask < total; ++mask) {
                Configuration k = Configuration::all_closed(g);
                int nopen = 0;
                for (int e = 0; e < ne; ++e)
                    if (mask >> e & 1) {
                        k.open[e] = true;
                        ++nopen;
                    }
                out.emplace_back(std::move(k),
                                 std::pow(s.p, nopen) * std::pow(1.0 - s.p, ne - nopen));
            }
            break;
        }
        case PercolationScheme::Kind::SingleOpen:
            for (int e = 0; e < ne; ++e) {
                Configuration k = Configuration::all_closed(g);
                k.open[e] = true;
                out.emplace_back(std::move(k), 1.0 / ne);
            }
            break;
        case PercolationScheme::Kind::SingleClosed:
            for (int e = 0; e < ne; ++e) {
                Configuration k = Configuration::all_open(g);
                k.open[e] = false;
                out.emplace_back(std::move(k), 1.0 / ne);
            }
            break;
        case PercolationScheme::Kind::ClosedVertex:
            for (int v = 0; v < g.vertex_count(); ++v) {
                Configuration k = Configuration::all_open(g);
                for (int e : g.incident(v)) k.open[e] = false;
                out.emplace_back(std::move(k), 1.0 / g.vertex_count());
            }
            break;
        case PercolationScheme::Kind::Explicit:
            out = s.entries;
            break;
    }
    if (out.size() > cap) throw ValidationError("scheme enumeration exceeds the configuration cap");
    return out;
}

bool configurations_equivalent_to_full(const std::vector<Configuration>& ks, int edge_count) {
    for (int e = 0; e < edge_count; ++e) {
        for (int f = e + 1; f < edge_count; ++f) {
            bool pat[2][2] = {{false, false}, {false, false}};
            for (const auto& k : ks) pat[k.is_open(e)][k.is_open(f)] = true;
            int count = pat[0][0] + pat[0][1] + pat[1][0] + pat[1][1];
            if (count < 3) return false;
        }
    }
    return true;
}

bool equivalent_to_full(const PercolationScheme& s, const StructureGraph& g) {
    if (s.kind == PercolationScheme::Kind::Full) {
        s.validate(g);
        return true;
    }
    auto list = enumerate_scheme(s, g);
    std::vector<Configuration> ks;
    ks.reserve(list.size());
    for (auto& [k, p] : list) ks.push_back(std::move(k));
    return configurations_equivalent_to_full(ks, g.edge_count());
}

PreparedChannel::PreparedChannel(const WalkSpec& w, const PercolationScheme& s, std::size_t cap) {
    for (auto& [k, p] : enumerate_scheme(s, w.graph.structure, cap))
        terms_.emplace_back(step_operator(w, k), p);
}

namespace {

Matrix weighted_conjugation_sum(const std::vector<std::pair<Matrix, double>>& terms,
                                const Matrix& rho, const Matrix* wrapper, int threads) {
    int n = static_cast<int>(rho.rows());
    auto partial = [&](std::size_t lo, std::size_t hi) {
        Matrix acc = Matrix::Zero(n, n);
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& [u, p] = terms[i];
            if (wrapper) {
                Matrix ku = *wrapper * u;
                acc.noalias() += p * (ku * rho * ku.adjoint());
            } else {
                acc.noalias() += p * (u * rho * u.adjoint());
            }
        }
        return acc;
    };
    if (threads <= 1 || terms.size() < 2) return partial(0, terms.size());
    int nt = std::min<std::size_t>(threads, terms.size());
    std::vector<Matrix> parts(nt);
    std::vector<std::thread> pool;
    std::size_t chunk = (terms.size() + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        std::size_t lo = t * chunk, hi = std::min(terms.size(), lo + chunk);
        pool.emplace_back([&, t, lo, hi] { parts[t] = partial(lo, hi); });
    }
    for (auto& th : pool) th.join();
    Matrix acc = Matrix::Zero(n, n);
    for (const auto& m : parts) acc += m;  // fixed order keeps results reproducible
    return acc;
}

}  // namespace

Matrix PreparedChannel::apply(const Matrix& rho, int threads) const {
    return weighted_conjugation_sum(terms_, rho, nullptr, threads);
}

Matrix PreparedChannel::apply_wrapped(const Matrix& rho, const Matrix& wrapper, int threads) const {
    return weighted_conjugation_sum(terms_, rho, &wrapper, threads);
}

void hermiticity_check(const Matrix& rho, double tol) {
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw NumericalError("density matrix lost hermiticity");
}

void validate_density(const Matrix& rho) {
    hermiticity_check(rho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw NumericalError("density matrix is not positive semidefinite");
}

Matrix channel_step(const Matrix& rho, const WalkSpec& w, const PercolationScheme& s, int threads) {
    validate_density(rho);
    PreparedChannel ch(w, s);
    return ch.apply(rho, threads);
}

std::vector<Matrix> evolve(const Matrix& rho0, const WalkSpec& w, const PercolationScheme& s,
                           int steps, int threads) {
    validate_density(rho0);
    PreparedChannel ch(w, s);
    std::vector<Matrix> out;
    out.reserve(steps + 1);
    out.push_back(rho0);
    double tr0 = rho0.trace().real();
    for (int t = 0; t < steps; ++t) {
        out.push_back(ch.apply(out.back(), threads));
        if (std::abs(out.back().trace().real() - tr0) > 1e-10)
            throw NumericalError("channel stopped preserving the trace");
    }
    return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(seed ^ splitmix64(stream * 0xda3e39cb94b95bdbULL + 1))) {}

std::uint64_t CounterRng::next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

double CounterRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

Vector sample_trajectory(const Vector& psi0, const WalkSpec& w, const PercolationScheme& s,
                         int steps, std::uint64_t seed, std::uint64_t stream,
                         const TrajectoryObserver& observer) {
    const auto& g = w.graph.structure;
    s.validate(g);
    CounterRng rng(seed, stream);
    Vector psi = psi0;
    if (s.kind == PercolationScheme::Kind::Full) {
        // per-edge Bernoulli draws; no enumeration needed
        for (int t = 0; t < steps; ++t) {
            Configuration k = Configuration::all_closed(g);
            for (int e = 0; e < g.edge_count(); ++e) k.open[e] = rng.next_double() < s.p;
            psi = step_operator(w, k) * psi;
            if (observer) observer(t + 1, psi);
        }
        return psi;
    }
    auto list = enumerate_scheme(s, g);
    std::vector<Matrix> ops;
    std::vector<double> cdf;
    double acc = 0;
    for (auto& [k, p] : list) {
        ops.push_back(step_operator(w, k));
        acc += p;
        cdf.push_back(acc);
    }
    for (int t = 0; t < steps; ++t) {
        double r = rng.next_double() * acc;
        std::size_t i = std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin();
        if (i >= ops.size()) i = ops.size() - 1;
        psi = ops[i] * psi;
        if (observer) observer(t + 1, psi);
    }
    return psi;
}

}  // namespace perqwalk
