#include "perqwalk/attractors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>

namespace perqwalk {

namespace {

Eigen::JacobiSVD<Matrix> svd_of(const Matrix& a) {
    return Eigen::JacobiSVD<Matrix>(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
}

int rank_from_svd(const Eigen::JacobiSVD<Matrix>& svd, double rtol, double atol) {
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 0;
    double tol = std::max(rtol * s(0), atol);
    int r = 0;
    while (r < s.size() && s(r) > tol) ++r;
    return r;
}

void cluster_insert(std::vector<Complex>& xs, Complex v, double tol) {
    for (const auto& x : xs)
        if (std::abs(x - v) < tol) return;
    xs.push_back(v);
}

// vec is column-major; vec(U X U^dagger) = (conj(U) (x) U) vec(X).
Matrix conj_apply(const Matrix& u, const Eigen::Ref<const Matrix>& cols, int n) {
    Matrix out(cols.rows(), cols.cols());
    for (int c = 0; c < cols.cols(); ++c) {
        Eigen::Map<const Matrix> x(cols.col(c).data(), n, n);
        Matrix y = u * x * u.adjoint();
        out.col(c) = Eigen::Map<const Vector>(y.data(), n * n);
    }
    return out;
}

}  // namespace

Matrix nullspace(const Matrix& a, double rtol, double atol) {
    if (a.rows() == 0) return Matrix::Identity(a.cols(), a.cols());
    auto svd = svd_of(a);
    int r = rank_from_svd(svd, rtol, atol);
    return svd.matrixV().rightCols(a.cols() - r);
}

int numeric_rank(const Matrix& a, double rtol, double atol) {
    if (a.rows() == 0 || a.cols() == 0) return 0;
    auto svd = svd_of(a);
    return rank_from_svd(svd, rtol, atol);
}

std::vector<CommonEigenstate> common_eigenstates(const WalkSpec& w) {
    const StateGraph& sg = w.graph;
    int n = sg.dim();
    // Work in the U3 form; the empty configuration reduces the eigenproblem to CP.
    WalkSpec w3 = w;
    w3.variant = Variant::U3;
    Matrix cp = coin_operator(w3) * permutation_operator(w3);

    std::vector<Complex> alphas;
    for (int v = 0; v < sg.vertex_count(); ++v) {
        const auto& sl = sg.out_edges[v];
        int d = static_cast<int>(sl.size());
        Matrix blk(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) blk(i, j) = cp(sl[i], sl[j]);
        Eigen::ComplexEigenSolver<Matrix> es(blk, false);
        for (int i = 0; i < d; ++i) cluster_insert(alphas, es.eigenvalues()(i), 1e-8);
    }
    std::sort(alphas.begin(), alphas.end(), [](Complex a, Complex b) {
        return std::arg(a) < std::arg(b);
    });

    int ne = sg.structure.edge_count();
    Matrix shift_rows = Matrix::Zero(ne, n);
    for (int e = 0; e < ne; ++e) {
        int i = sg.directed_index(e, sg.structure.edges[e].a);
        shift_rows(e, i) = 1;
        shift_rows(e, sg.partner(i)) = -1;
    }

    std::vector<CommonEigenstate> out;
    Matrix p = permutation_operator(w3);
    for (Complex a : alphas) {
        Matrix sys(n + ne, n);
        sys.topRows(n) = cp - a * Matrix::Identity(n, n);
        sys.bottomRows(ne) = shift_rows;
        Matrix ns = nullspace(sys);
        for (int k = 0; k < ns.cols(); ++k) {
            Vector phi = ns.col(k);
            if (w.variant == Variant::U1) phi = p * phi;  // C^dagger phi == P phi
            out.push_back({a / std::abs(a), phi});
        }
    }
    return out;
}

std::vector<Attractor> p_attractors(const std::vector<CommonEigenstate>& states) {
    std::vector<Attractor> out;
    for (const auto& a : states)
        for (const auto& b : states) {
            Attractor x;
            x.eigenvalue = a.alpha * std::conj(b.alpha);
            x.mat = a.state * b.state.adjoint();
            x.is_p = true;
            out.push_back(std::move(x));
        }
    return out;
}

namespace {

std::vector<Complex> candidate_eigenvalues(const std::vector<Matrix>& us,
                                           const std::vector<double>& ws,
                                           const BruteForceOptions& opts) {
    int n = static_cast<int>(us.front().rows());
    std::vector<Complex> cands;
    if (n <= opts.superop_dim_limit) {
        Matrix s = Matrix::Zero(n * n, n * n);
        for (std::size_t k = 0; k < us.size(); ++k) {
            Matrix kron(n * n, n * n);
            const Matrix uc = us[k].conjugate();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    kron.block(i * n, j * n, n, n) = uc(i, j) * us[k];
            s += ws[k] * kron;
        }
        Eigen::ComplexEigenSolver<Matrix> es(s, false);
        if (es.info() != Eigen::Success) throw NumericalError("superoperator eigensolver failed");
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            Complex l = es.eigenvalues()(i);
            if (std::abs(l) >= 1.0 - opts.peripheral_tol)
                cluster_insert(cands, l / std::abs(l), 1e-6);
        }
    } else {
        // Unit-circle products alpha_i * conj(alpha_j) per configuration,
        // intersected across configurations; a superset of the asymptotic
        // spectrum that avoids the n^2-dimensional eigensolve.
        bool first = true;
        for (const auto& u : us) {
            Eigen::ComplexEigenSolver<Matrix> es(u, false);
            if (es.info() != Eigen::Success) throw NumericalError("step-operator eigensolver failed");
            std::vector<Complex> here;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Complex l = es.eigenvalues()(i) * std::conj(es.eigenvalues()(j));
                    cluster_insert(here, l / std::abs(l), 1e-6);
                }
            if (first) {
                cands = here;
                first = false;
            } else {
                std::vector<Complex> kept;
                for (Complex c : cands)
                    for (Complex h : here)
                        if (std::abs(c - h) < 1e-6) {
                            kept.push_back(c);
                            break;
                        }
                cands = kept;
            }
        }
    }
    std::sort(cands.begin(), cands.end(), [](Complex a, Complex b) {
        if (std::abs(a.real() - b.real()) > 1e-9) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    return cands;
}

// Nullspace basis of a tall constraint matrix through its small Gram matrix.
// Zero eigenvalues of the Gram only resolve down to machine epsilon times its
// norm, so the cut sits at 1e-12 relative; the spectra here are cleanly
// gapped, and every kept vector still has to pass the attractor-equation
// residual check afterwards.
Matrix nullspace_via_gram(const Matrix& cons) {
    if (cons.cols() == 0) return Matrix::Zero(0, 0);
    Matrix gram = cons.adjoint() * cons;
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    if (es.info() != Eigen::Success) throw NumericalError("Gram eigensolver failed");
    double top = std::max(0.0, es.eigenvalues().maxCoeff());
    double tol = std::max(top * 1e-12, 1e-24);
    int null_dim = 0;
    while (null_dim < gram.rows() && es.eigenvalues()(null_dim) <= tol) ++null_dim;
    return es.eigenvectors().leftCols(null_dim);
}

// Orthonormal basis of the lambda-eigenspace of X -> U X U^dagger from the
// Schur form of the unitary U (columns are vec'd |q_i><q_j| pairs).
Matrix conjugation_eigenspace(const Matrix& u, Complex lambda) {
    int n = static_cast<int>(u.rows());
    Eigen::ComplexSchur<Matrix> schur(u);
    if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition failed");
    const Matrix& q = schur.matrixU();
    Vector diag = schur.matrixT().diagonal();
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(diag(i) * std::conj(diag(j)) - lambda) < 1e-7) pairs.emplace_back(i, j);
    Matrix b(n * n, pairs.size());
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        Matrix x = q.col(pairs[c].first) * q.col(pairs[c].second).adjoint();
        b.col(c) = Eigen::Map<const Vector>(x.data(), n * n);
    }
    return b;
}

}  // namespace

AttractorBasis attractor_space(const WalkSpec& w, std::vector<Configuration> configs,
                               const BruteForceOptions& opts) {
    if (configs.empty()) throw ValidationError("attractor space needs at least one configuration");
    if (configs.size() > opts.max_configs)
        throw ValidationError("scheme enumeration too large for the spectral oracle");
    int n = w.dim();
    std::vector<Matrix> us;
    std::vector<double> ws;
    for (const auto& k : configs) {
        us.push_back(step_operator(w, k));
        ws.push_back(1.0 / configs.size());
    }
    auto cands = candidate_eigenvalues(us, ws, opts);

    AttractorBasis basis;
    for (Complex lambda : cands) {
        Matrix b = conjugation_eigenspace(us[0], lambda);
        for (std::size_t k = 1; k < us.size() && b.cols() > 0; ++k) {
            Matrix cons = conj_apply(us[k], b, n) - lambda * b;
            b = b * nullspace_via_gram(cons);
        }
        if (b.cols() == 0) continue;
        // re-orthonormalize (columns stay near-orthonormal; tighten anyway)
        Eigen::HouseholderQR<Matrix> qr(b);
        Matrix q = qr.householderQ() * Matrix::Identity(n * n, b.cols());
        for (int c = 0; c < q.cols(); ++c) {
            Attractor x;
            x.eigenvalue = lambda;
            x.mat = Eigen::Map<const Matrix>(q.col(c).data(), n, n);
            double r = 0;
            for (const auto& u : us)
                r = std::max(r, (u * x.mat * u.adjoint() - lambda * x.mat).cwiseAbs().maxCoeff());
            if (r > opts.residual_tol)
                throw NumericalError("attractor residual above tolerance: " + std::to_string(r));
            x.residual = r;
            x.is_p = is_p_attractor(x.mat, w.graph);
            basis.items.push_back(std::move(x));
        }
    }
    return basis;
}

AttractorBasis brute_force_attractors(const WalkSpec& w, const PercolationScheme& s,
                                      const BruteForceOptions& opts) {
    auto list = enumerate_scheme(s, w.graph.structure, opts.max_configs);
    std::vector<Configuration> configs;
    for (auto& [k, p] : list) configs.push_back(std::move(k));
    if (opts.add_empty) {
        Configuration empty = Configuration::all_closed(w.graph.structure);
        if (std::find(configs.begin(), configs.end(), empty) == configs.end())
            configs.push_back(empty);
    }
    if (!configurations_equivalent_to_full(configs, w.graph.structure.edge_count()))
        throw ValidationError("scheme not certified equivalent to full percolation");
    return attractor_space(w, std::move(configs), opts);
}

bool is_p_attractor(const Matrix& x, const StateGraph& sg, double tol) {
    for (int i = 0; i < sg.dim(); ++i) {
        int j = sg.partner(i);
        if (j == i) continue;
        if (std::abs(x(i, i) - x(i, j)) > tol) return false;
    }
    return true;
}

Matrix asymptotic_state(const Matrix& rho0, const AttractorBasis& basis, long t) {
    int n = static_cast<int>(rho0.rows());
    // Gram check
    for (int i = 0; i < basis.size(); ++i)
        for (int j = i; j < basis.size(); ++j) {
            Complex g = (basis.items[i].mat.adjoint() * basis.items[j].mat).trace();
            double want = i == j ? 1.0 : 0.0;
            if (std::abs(g - want) > 1e-8)
                throw ValidationError("attractor basis is not Hilbert-Schmidt orthonormal");
        }
    Matrix out = Matrix::Zero(n, n);
    for (const auto& a : basis.items) {
        Complex lam = a.eigenvalue / std::abs(a.eigenvalue);
        Complex weight = (rho0 * a.mat.adjoint()).trace();
        out += std::pow(lam, static_cast<double>(t)) * weight * a.mat;
    }
    return out;
}

Attractor convert_variant(const Attractor& x, const WalkSpec& w) {
    Matrix c = coin_operator(w);
    Matrix p = permutation_operator(w);
    Attractor out;
    out.eigenvalue = x.eigenvalue;
    out.is_p = x.is_p;
    Complex lam = x.eigenvalue / std::abs(x.eigenvalue);
    Matrix alt;
    if (w.variant == Variant::U1) {
        out.mat = c * x.mat * c.adjoint();
        alt = lam * (p.adjoint() * x.mat * p);
    } else {
        out.mat = c.adjoint() * x.mat * c;
        alt = std::conj(lam) * (p * x.mat * p.adjoint());
    }
    double d = (out.mat - alt).cwiseAbs().maxCoeff();
    if (d > 1e-9)
        throw NumericalError("coin- and permutation-conjugated conversions disagree: " +
                             std::to_string(d));
    return out;
}

std::vector<Matrix> orthonormalize(const std::vector<Matrix>& xs, double drop_tol) {
    std::vector<Matrix> out;
    for (const auto& x0 : xs) {
        Matrix y = x0;
        double norm0 = std::sqrt(std::abs((x0.adjoint() * x0).trace()));
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : out) y -= (b.adjoint() * y).trace() * b;
        double n = std::sqrt(std::abs((y.adjoint() * y).trace()));
        if (n > drop_tol * std::max(1.0, norm0)) out.push_back(y / n);
    }
    return out;
}

std::vector<Vector> orthonormalize_vectors(const std::vector<Vector>& xs, double drop_tol) {
    std::vector<Vector> out;
    for (const auto& x0 : xs) {
        Vector y = x0;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : out) y -= b.dot(y) * b;
        double n = y.norm();
        if (n > drop_tol * std::max(1.0, x0.norm())) out.push_back(y / n);
    }
    return out;
}

double span_projection_residual(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
    double worst = 0;
    for (const auto& x : a) {
        Matrix y = x;
        for (const auto& z : b) y -= (z.adjoint() * x).trace() * z;
        worst = std::max(worst, std::sqrt(std::abs((y.adjoint() * y).trace())));
    }
    return worst;
}

}  // namespace perqwalk
