#pragma once

#include <vector>

#include "perqwalk/percolation.hpp"
#include "perqwalk/walk.hpp"

namespace perqwalk {

struct CommonEigenstate {
    Complex alpha;  // unit-modulus eigenvalue of every U_K
    Vector state;
};

struct Attractor {
    Complex eigenvalue;
    Matrix mat;
    bool is_p = false;
    double residual = 0;  // max over certified configurations
};

struct AttractorBasis {
    std::vector<Attractor> items;
    int size() const { return static_cast<int>(items.size()); }
};

// Rank-revealing helpers. Threshold: singular values below
// max(rtol * sigma_max, atol) count as zero; the absolute floor keeps
// numerically-zero matrices from reporting full rank.
Matrix nullspace(const Matrix& a, double rtol = 1e-10, double atol = 1e-12);
int numeric_rank(const Matrix& a, double rtol = 1e-10, double atol = 1e-12);

// Simultaneous eigenvectors of every U_K, solved from the empty-configuration
// eigenproblem of CP stacked with the pair-equality rows. For U1 walks the
// states are returned already converted (phi -> P phi).
std::vector<CommonEigenstate> common_eigenstates(const WalkSpec& w);

// All outer products |phi_a><phi_b| tagged by lambda = alpha * conj(beta).
std::vector<Attractor> p_attractors(const std::vector<CommonEigenstate>& states);

struct BruteForceOptions {
    std::size_t max_configs = 40;
    bool add_empty = true;        // ensure the all-closed configuration is present
    double peripheral_tol = 1e-8;  // |lambda| >= 1 - tol
    double residual_tol = 1e-9;
    // Candidate eigenvalues come from the channel superoperator spectrum up to
    // this Hilbert dimension; above it the per-configuration spectral products
    // are intersected instead (same candidate set, no n^2 eigensolve).
    int superop_dim_limit = 28;
};

// Spectral oracle: solves U_K X U_K^dagger = lambda X over an explicit scheme
// certified equivalent to full percolation.
AttractorBasis brute_force_attractors(const WalkSpec& w, const PercolationScheme& s,
                                      const BruteForceOptions& opts = {});

// Same solver without the equivalence certification; the result is the exact
// solution set for precisely the supplied configurations.
AttractorBasis attractor_space(const WalkSpec& w, std::vector<Configuration> configs,
                               const BruteForceOptions& opts = {});

// X is a p-attractor iff X_ii == X_{i,partner(i)} for every paired edge.
bool is_p_attractor(const Matrix& x, const StateGraph& sg, double tol = 1e-10);

// rho_asym(t) = sum lambda^t Tr(rho0 X^dagger) X over an HS-orthonormal basis.
Matrix asymptotic_state(const Matrix& rho0, const AttractorBasis& basis, long t);

// Maps attractors between the two operator orderings (conjugation by C) and
// cross-checks the equivalent local-permutation form.
Attractor convert_variant(const Attractor& x, const WalkSpec& w);

// Hilbert-Schmidt modified Gram-Schmidt with re-orthogonalization; drops
// near-dependent inputs.
std::vector<Matrix> orthonormalize(const std::vector<Matrix>& xs, double drop_tol = 1e-10);
std::vector<Vector> orthonormalize_vectors(const std::vector<Vector>& xs, double drop_tol = 1e-10);

// Max residual of projecting each element of `a` onto the span of `b`
// (both HS-orthonormal); 0 when span(a) is contained in span(b).
double span_projection_residual(const std::vector<Matrix>& a, const std::vector<Matrix>& b);

}  // namespace perqwalk
