#pragma once

#include <cstdint>
#include <vector>

#include "smc/libration.hpp"

namespace smc {

// linear angle-to-scatter detection model: the rate moves with theta around
// a reference angle, clipped to the span where the response is linear, and
// the collected light is attenuated before counting
struct DetectionParams {
    double base_rate_hz = 0.0;        // counts/s at the reference angle, before attenuation
    double slope_hz_per_rad = 0.0;    // counts/s per rad, before attenuation
    double attenuation = 1e4;         // >= 1
    double bin_width_s = 1e-3;
    double linear_range_rad = 1.0;    // deviation clip span
    double theta_ref_rad = 0.0;

    void validate() const;
};

struct PhotonTrace {
    std::vector<double> bin_edges_s;        // size n+1, strictly increasing
    std::vector<std::uint64_t> counts;      // size n

    void validate() const;
};

struct ExpectedTrace {
    std::vector<double> bin_edges_s;
    std::vector<double> expected_counts;
};

// noise-free per-bin expectations for a piecewise-linear angle trajectory
ExpectedTrace expected_trace(const LibrationTrajectory& trajectory,
                             const DetectionParams& detection);

// Poisson-sampled counts; deterministic for a fixed seed
PhotonTrace sample_trace(const LibrationTrajectory& trajectory,
                         const DetectionParams& detection,
                         std::uint64_t seed);

// mean count rate (counts/s as recorded) over bins centred in [start, end)
double mean_rate(const PhotonTrace& trace, double start_s, double end_s);

// C = (late - early) / late on window mean rates
double smc_contrast(const PhotonTrace& trace,
                    std::pair<double, double> early_window_s,
                    std::pair<double, double> late_window_s);

// trapezoidal integral of (rate - baseline) over bin centres in [start, end]
double t1_signal_integral(const PhotonTrace& trace, double start_s, double end_s = 5e-3,
                          double baseline_rate = 0.0);

} // namespace smc
