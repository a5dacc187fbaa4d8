#pragma once

#include <cstddef>
#include <vector>

namespace smc {

// amplitudes of the symmetric superposition over collective excitation number,
// stored as log|c_k| so N up to 1e7 stays representable
struct DickeWeights {
    std::size_t n_spins = 0;
    std::vector<double> log_weights; // size n_spins + 1, natural log

    void validate() const; // sum of squared weights equals 1 within 1e-9
};

// |c_k|^2 = C(N, k) / 2^N, renormalized in log space so the squared weights
// sum to exactly 1 in double precision
DickeWeights dicke_weights(std::size_t n_spins);

struct GhzWeight {
    double log2_weight = 0.0; // log2 of the extremal-component probability
    double probability = 0.0; // 2^log2_weight, 0 after underflow
};

// probability of the all-aligned component: exactly 2^-N
GhzWeight ghz_component_weight(std::size_t n_spins);

struct OrientationDistribution {
    std::size_t n_spins = 0;
    double theta_per_spin_rad = 0.0;
    double mean_rad = 0.0;  // N theta / 2
    double sigma_rad = 0.0; // sqrt(N)/2 |theta|
    // enumerated only for moderate N; empty above the enumeration cap
    std::vector<double> angles_rad;
    std::vector<double> masses;
};

// distribution of the collective deflection when each flipped spin
// contributes theta_per_spin; closed-form moments always, point masses
// enumerated when N <= enumeration_cap
OrientationDistribution orientation_distribution(std::size_t n_spins, double theta_per_spin_rad,
                                                 std::size_t enumeration_cap = 1000000);

} // namespace smc
