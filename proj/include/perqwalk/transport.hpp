#pragma once

#include <vector>

#include "perqwalk/grover3.hpp"
#include "perqwalk/percolation.hpp"

namespace perqwalk {

struct Sink {
    std::vector<int> vertices;

    static Sink from_names(const StructureGraph& g, const std::vector<std::string>& names);
};

// Orthogonal projector onto the sink subspace (all outgoing edges of the
// sink vertices).
Matrix sink_projector(const StateGraph& sg, const Sink& sink);

struct SinkRun {
    std::vector<double> survival;  // p(t) = Tr rho(t), index 0..steps
    Matrix final_rho;
    double absorbed(int t) const { return 1.0 - survival.at(t); }
};

// rho -> sum_K pi_K (I-T) U_K rho U_K^dagger (I-T); the sink absorbs after
// each unitary step, so p(t) is non-increasing.
SinkRun evolve_with_sink(const Matrix& rho0, const WalkSpec& w, const PercolationScheme& s,
                         const Sink& sink, int steps, int threads = 1);

// Filters trapped states down to the ones with no sink overlap, walking the
// sink base states one at a time (keep / remove / recombine). Inputs must
// share one eigenvalue sector: combinations across sectors are not invariant
// under the step operator, so filter each sector separately and take the
// union.
std::vector<Vector> sr_filter(const std::vector<Vector>& trapped, const StateGraph& sg,
                              const Sink& sink);
std::vector<Vector> sr_trapped_basis(const std::vector<TrappedState>& trapped,
                                     const StateGraph& sg, const Sink& sink);

// q = 1 - |Pi psi0|^2 over the orthonormalized span of the sr-trapped states.
double transfer_efficiency(const Vector& psi0, const std::vector<Vector>& sr_states);

// Extremes of q over unit initial states inside one vertex subspace, from the
// eigenvalues of the projected Gram matrix.
struct EfficiencyRange {
    double min_q;
    double max_q;
};
EfficiencyRange efficiency_range_at_vertex(const StateGraph& sg, int vertex,
                                           const std::vector<Vector>& sr_states);

// Extra localized eigenvectors present only without percolation: for each
// A-type face state the variant whose two partner amplitudes carry opposite
// signs. Each is verified as a unit-modulus eigenvector of the all-open step
// operator (they are stationary for the non-percolated walk only).
std::vector<Vector> nonpercolated_trapped_extension(const WalkSpec& w,
                                                    const std::vector<TrappedState>& trapped);

}  // namespace perqwalk
