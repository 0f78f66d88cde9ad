#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "perqwalk/walk.hpp"

namespace perqwalk {

struct PercolationScheme {
    enum class Kind { Full, SingleOpen, SingleClosed, ClosedVertex, Explicit };
    Kind kind = Kind::Full;
    double p = 0.5;  // Full only
    std::vector<std::pair<Configuration, double>> entries;  // Explicit only

    static PercolationScheme full(double p);
    static PercolationScheme single_open() { return {Kind::SingleOpen}; }
    static PercolationScheme single_closed() { return {Kind::SingleClosed}; }
    static PercolationScheme closed_vertex() { return {Kind::ClosedVertex}; }
    static PercolationScheme explicit_list(std::vector<std::pair<Configuration, double>> e);
    void validate(const StructureGraph& g) const;
    const char* name() const;
};

// Materializes the (configuration, probability) list. Throws ValidationError
// above `cap` configurations (full percolation blows up as 2^#E).
std::vector<std::pair<Configuration, double>> enumerate_scheme(const PercolationScheme& s,
                                                               const StructureGraph& g,
                                                               std::size_t cap = std::size_t(1)
                                                                                 << 20);

// Sufficient condition from the restricted-percolation analysis: for every
// unordered pair of structure edges the scheme's support shows at least 3 of
// the 4 joint open/closed patterns.
bool equivalent_to_full(const PercolationScheme& s, const StructureGraph& g);
bool configurations_equivalent_to_full(const std::vector<Configuration>& ks, int edge_count);

// Precomputed step operators for one walk + scheme, reusable across steps.
class PreparedChannel {
public:
    PreparedChannel(const WalkSpec& w, const PercolationScheme& s, std::size_t cap = std::size_t(1) << 20);

    // rho -> sum_K pi_K U_K rho U_K^dagger
    Matrix apply(const Matrix& rho, int threads = 1) const;
    // Kraus-style application with a wrapper W: rho -> sum_K pi_K (W U_K) rho (W U_K)^dagger
    Matrix apply_wrapped(const Matrix& rho, const Matrix& wrapper, int threads = 1) const;

    const std::vector<std::pair<Matrix, double>>& terms() const { return terms_; }

private:
    std::vector<std::pair<Matrix, double>> terms_;
};

Matrix channel_step(const Matrix& rho, const WalkSpec& w, const PercolationScheme& s,
                    int threads = 1);
std::vector<Matrix> evolve(const Matrix& rho0, const WalkSpec& w, const PercolationScheme& s,
                           int steps, int threads = 1);

// Counter-based generator (splitmix64 over a keyed counter); cheap to seed and
// to split into independent per-trajectory streams.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);
    std::uint64_t next_u64();
    double next_double();  // uniform [0, 1)

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// One sampled trajectory: draws a configuration per step, applies U_K.
// Deterministic for a given (seed, stream). The observer, when set, sees the
// state after every step.
using TrajectoryObserver = std::function<void(int step, const Vector& psi)>;
Vector sample_trajectory(const Vector& psi0, const WalkSpec& w, const PercolationScheme& s,
                         int steps, std::uint64_t seed, std::uint64_t stream = 0,
                         const TrajectoryObserver& observer = {});

void hermiticity_check(const Matrix& rho, double tol = 1e-12);
// Hermitian to 1e-12, eigenvalues above the -1e-10 floor.
void validate_density(const Matrix& rho);

}  // namespace perqwalk
