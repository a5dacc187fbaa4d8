#include "smc/dicke.hpp"

#include <cmath>
#include <limits>

#include "smc/errors.hpp"

namespace smc {

namespace {

constexpr std::size_t max_spins = 10000000;
const double ln2 = std::log(2.0);

// log C(n, k) through lgamma; exact enough that the final renormalization
// only has to absorb ~1e-13 of drift
double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log(sum exp(v_i)) without overflow
double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

} // namespace

void DickeWeights::validate() const {
    if (n_spins < 1) throw InvalidInput("need at least one spin");
    if (log_weights.size() != n_spins + 1)
        throw InvalidInput("weight table must have one entry per excitation number");
    std::vector<double> sq(log_weights.size());
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
        if (std::isnan(log_weights[k])) throw InvalidInput("weights must not be NaN");
        sq[k] = 2.0 * log_weights[k];
    }
    const double total = std::exp(log_sum_exp(sq));
    if (std::fabs(total - 1.0) > 1e-9) throw InvalidInput("squared weights must sum to 1");
}

DickeWeights dicke_weights(std::size_t n_spins) {
    if (n_spins < 1) throw InvalidInput("need at least one spin");
    if (n_spins > max_spins) throw InvalidInput("spin number exceeds the enumerable range");
    const double n = double(n_spins);
    DickeWeights out;
    out.n_spins = n_spins;
    out.log_weights.resize(n_spins + 1);
    // fill the lower half, mirror the rest; C(n,k) = C(n,n-k) exactly
    for (std::size_t k = 0; k <= n_spins / 2; ++k)
        out.log_weights[k] = 0.5 * log_binomial(n, double(k)) - 0.5 * n * ln2;
    for (std::size_t k = n_spins / 2 + 1; k <= n_spins; ++k)
        out.log_weights[k] = out.log_weights[n_spins - k];
    std::vector<double> sq(out.log_weights.size());
    for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = 2.0 * out.log_weights[k];
    const double drift = log_sum_exp(sq);
    for (double& w : out.log_weights) w -= 0.5 * drift;
    return out;
}

GhzWeight ghz_component_weight(std::size_t n_spins) {
    if (n_spins < 1) throw InvalidInput("need at least one spin");
    GhzWeight out;
    out.log2_weight = -double(n_spins);
    out.probability = std::exp2(out.log2_weight);
    return out;
}

OrientationDistribution orientation_distribution(std::size_t n_spins, double theta_per_spin_rad,
                                                 std::size_t enumeration_cap) {
    if (n_spins < 1) throw InvalidInput("need at least one spin");
    if (!std::isfinite(theta_per_spin_rad))
        throw InvalidInput("per-spin deflection must be finite");
    OrientationDistribution out;
    out.n_spins = n_spins;
    out.theta_per_spin_rad = theta_per_spin_rad;
    const double n = double(n_spins);
    out.mean_rad = n * theta_per_spin_rad / 2.0;
    out.sigma_rad = std::sqrt(n) / 2.0 * std::fabs(theta_per_spin_rad);
    if (n_spins <= enumeration_cap) {
        const DickeWeights w = dicke_weights(n_spins);
        out.angles_rad.resize(n_spins + 1);
        out.masses.resize(n_spins + 1);
        for (std::size_t k = 0; k <= n_spins; ++k) {
            out.angles_rad[k] = double(k) * theta_per_spin_rad;
            out.masses[k] = std::exp(2.0 * w.log_weights[k]);
        }
    }
    return out;
}

} // namespace smc
