#include "smc/readout.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "smc/errors.hpp"
#include "smc/rng.hpp"

namespace smc {

namespace {

// integral of the piecewise-linear angle trajectory over [a, b]
double integrate_theta(const LibrationTrajectory& tr, double a, double b) {
    const auto& t = tr.times_s;
    const auto& th = tr.theta_rad;
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < t.size(); ++s) {
        const double lo = std::max(a, t[s]);
        const double hi = std::min(b, t[s + 1]);
        if (hi <= lo) continue;
        const double span = t[s + 1] - t[s];
        auto value = [&](double x) {
            const double u = (x - t[s]) / span;
            return th[s] + u * (th[s + 1] - th[s]);
        };
        acc += 0.5 * (value(lo) + value(hi)) * (hi - lo);
    }
    return acc;
}

std::vector<std::size_t> bins_in_window(const PhotonTrace& trace, double start, double end) {
    if (!(start < end)) throw InvalidInput("window start must precede its end");
    if (start < trace.bin_edges_s.front() || end > trace.bin_edges_s.back()) {
        throw InvalidInput("window extends outside the trace");
    }
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k + 1 < trace.bin_edges_s.size(); ++k) {
        const double c = 0.5 * (trace.bin_edges_s[k] + trace.bin_edges_s[k + 1]);
        if (c >= start && c < end) idx.push_back(k);
    }
    if (idx.empty()) throw InvalidInput("window contains no bins");
    return idx;
}

} // namespace

void DetectionParams::validate() const {
    if (!(base_rate_hz >= 0.0) || !std::isfinite(base_rate_hz)) {
        throw InvalidInput("base rate must be >= 0");
    }
    if (!std::isfinite(slope_hz_per_rad)) throw InvalidInput("slope must be finite");
    if (!(attenuation >= 1.0) || !std::isfinite(attenuation)) {
        throw InvalidInput("attenuation must be >= 1");
    }
    if (!(bin_width_s > 0.0) || !std::isfinite(bin_width_s)) {
        throw InvalidInput("bin width must be positive");
    }
    if (!(linear_range_rad > 0.0)) throw InvalidInput("linear range must be positive");
    if (!std::isfinite(theta_ref_rad)) throw InvalidInput("reference angle must be finite");
}

void PhotonTrace::validate() const {
    if (bin_edges_s.size() < 2 || counts.size() + 1 != bin_edges_s.size()) {
        throw InvalidInput("trace needs n counts and n+1 edges");
    }
    for (std::size_t k = 1; k < bin_edges_s.size(); ++k) {
        if (!(bin_edges_s[k] > bin_edges_s[k - 1])) {
            throw InvalidInput("bin edges must increase strictly");
        }
    }
}

ExpectedTrace expected_trace(const LibrationTrajectory& trajectory,
                             const DetectionParams& detection) {
    detection.validate();
    if (trajectory.times_s.size() < 2 ||
        trajectory.times_s.size() != trajectory.theta_rad.size()) {
        throw InvalidInput("trajectory needs matching times and angles");
    }
    const double t0 = trajectory.times_s.front();
    const double span = trajectory.times_s.back() - t0;
    const auto n_bins = static_cast<std::size_t>(
        std::floor(span / detection.bin_width_s + 1e-9));
    if (n_bins < 1) throw InvalidInput("trajectory shorter than one bin");

    ExpectedTrace out;
    out.bin_edges_s.resize(n_bins + 1);
    out.expected_counts.resize(n_bins);
    for (std::size_t k = 0; k <= n_bins; ++k) {
        out.bin_edges_s[k] = t0 + static_cast<double>(k) * detection.bin_width_s;
    }
    for (std::size_t k = 0; k < n_bins; ++k) {
        const double a = out.bin_edges_s[k];
        const double b = out.bin_edges_s[k + 1];
        const double theta_bar = integrate_theta(trajectory, a, b) / (b - a);
        const double dev = std::clamp(theta_bar - detection.theta_ref_rad,
                                      -detection.linear_range_rad, detection.linear_range_rad);
        const double rate = std::max(detection.base_rate_hz +
                                         detection.slope_hz_per_rad * dev, 0.0);
        out.expected_counts[k] = rate * (b - a) / detection.attenuation;
    }
    return out;
}

PhotonTrace sample_trace(const LibrationTrajectory& trajectory,
                         const DetectionParams& detection,
                         std::uint64_t seed) {
    const auto expect = expected_trace(trajectory, detection);
    PhotonTrace trace;
    trace.bin_edges_s = expect.bin_edges_s;
    trace.counts.resize(expect.expected_counts.size());
    auto engine = stream_engine(seed, 0);
    for (std::size_t k = 0; k < trace.counts.size(); ++k) {
        const double mean = expect.expected_counts[k];
        if (mean <= 0.0) {
            trace.counts[k] = 0;
            continue;
        }
        std::poisson_distribution<std::uint64_t> poisson(mean);
        trace.counts[k] = poisson(engine);
    }
    return trace;
}

double mean_rate(const PhotonTrace& trace, double start_s, double end_s) {
    trace.validate();
    const auto idx = bins_in_window(trace, start_s, end_s);
    double counts = 0.0, time = 0.0;
    for (std::size_t k : idx) {
        counts += static_cast<double>(trace.counts[k]);
        time += trace.bin_edges_s[k + 1] - trace.bin_edges_s[k];
    }
    return counts / time;
}

double smc_contrast(const PhotonTrace& trace,
                    std::pair<double, double> early_window_s,
                    std::pair<double, double> late_window_s) {
    trace.validate();
    const bool overlap = early_window_s.first < late_window_s.second &&
                         late_window_s.first < early_window_s.second;
    if (overlap) throw InvalidInput("contrast windows must be disjoint");
    const double early = mean_rate(trace, early_window_s.first, early_window_s.second);
    const double late = mean_rate(trace, late_window_s.first, late_window_s.second);
    if (late == 0.0) throw InvalidInput("late window has zero rate");
    return (late - early) / late;
}

double t1_signal_integral(const PhotonTrace& trace, double start_s, double end_s,
                          double baseline_rate) {
    trace.validate();
    if (!std::isfinite(baseline_rate)) throw InvalidInput("baseline must be finite");
    const auto idx = bins_in_window(trace, start_s, end_s);
    if (idx.size() < 2) throw InvalidInput("integration window needs at least two bins");
    double acc = 0.0;
    for (std::size_t q = 0; q + 1 < idx.size(); ++q) {
        const std::size_t a = idx[q];
        const std::size_t b = idx[q + 1];
        auto centre = [&](std::size_t k) {
            return 0.5 * (trace.bin_edges_s[k] + trace.bin_edges_s[k + 1]);
        };
        auto rate = [&](std::size_t k) {
            return static_cast<double>(trace.counts[k]) /
                       (trace.bin_edges_s[k + 1] - trace.bin_edges_s[k]) -
                   baseline_rate;
        };
        acc += 0.5 * (rate(a) + rate(b)) * (centre(b) - centre(a));
    }
    return acc;
}

} // namespace smc
