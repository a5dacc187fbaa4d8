#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "smc/libration.hpp"
#include "smc/linalg.hpp"
#include "smc/pulse.hpp"

namespace smc {

// crystal orientation relative to the field direction (lab z). theta_nv tips
// the tetrad's reference axis away from z, phi_k spins the tetrad about that
// axis first: axes = R_y(theta_nv) R_z(phi_k) n_base
struct CrystalOrientation {
    double theta_nv_rad = 0.0;
    double phi_k_rad = 0.0;

    void validate() const;
    CrystalOrientation canonical() const; // both angles wrapped to [0, 2pi)
};

// four defect axis classes as unit vectors, pairwise dot -1/3
std::array<Vec3, 4> nv_axes(const CrystalOrientation& orientation);

// angular error of the field direction in crystal coordinates. the spectrum
// pins nothing else: rotations about the field are unobservable, the axes
// are unsigned, and the lattice point group permutes them, so the distance
// is minimized over that whole equivalence group
double orientation_error(const CrystalOrientation& a, const CrystalOrientation& b);

struct SpectrumPeaks {
    // 8 entries ordered (class 0 minus, class 0 plus, class 1 minus, ...)
    std::vector<double> centers_hz;
    std::vector<double> widths_hz;
    std::vector<double> amplitudes; // signed; negative for dips

    void validate() const;
};

// widths/amplitudes: one value broadcast to all 8 lines, or exactly 8
SpectrumPeaks forward_spectrum(double b_magnitude_t, const CrystalOrientation& orientation,
                               const std::vector<double>& widths_hz,
                               const std::vector<double>& amplitudes);

// curve(f) = 1 + sum_k a_k w_k^2 / ((f - c_k)^2 + w_k^2)
std::vector<double> spectrum_curve(const SpectrumPeaks& peaks,
                                   const std::vector<double>& freq_hz);

struct PeakAssignment {
    std::size_t measured_index = 0;
    int axis_class = 0; // 0..3
    int branch = 0;     // 0 = 0->-1, 1 = 0->+1
};

struct FitResult {
    double b_t = 0.0;
    CrystalOrientation orientation;
    double residual_hz = 0.0; // RMS over matched peaks
    std::vector<PeakAssignment> assignment;
    bool converged = false;
};

struct FitOptions {
    std::size_t angle_grid = 16;     // starts per angle
    std::size_t field_grid = 5;      // field magnitudes bracketing the peak span
    std::size_t coarse_iterations = 120;
    std::size_t polish_iterations = 500;
    std::size_t polish_count = 8;    // best starts refined further
    double residual_flag_hz = 5e6;   // above this the result is non-converged
    double min_spread_hz = 1e6;      // model lines closer than this: unidentifiable
    int workers = 0;

    void validate() const;
};

// multi-start derivative-free inversion of 4..8 measured line centers
FitResult fit_vector_field(const std::vector<double>& measured_centers_hz,
                           const FitOptions& options = {});

// cost of the order-preserving assignment of measured to model lines (RMS);
// used by the fitter and exposed for oracle checks
double assignment_cost_hz(const std::vector<double>& measured_hz,
                          const std::vector<double>& model_hz);

// node-exact monotone cubic interpolant (no overshoot between nodes)
struct MonotoneCubicSpline {
    std::vector<double> x, y, tangent;

    double operator()(double xq) const; // throws outside [x.front(), x.back()]
    static MonotoneCubicSpline build(std::vector<double> x, std::vector<double> y);
};

struct AngleFrequencyCalibration {
    int target_class = 0;
    std::vector<double> angle_rad;  // rotation toward the field, from 0
    std::vector<double> f_minus_hz;
    MonotoneCubicSpline angle_to_frequency;
    MonotoneCubicSpline frequency_to_angle;

    double frequency_from_angle(double angle) const { return angle_to_frequency(angle); }
    double angle_from_frequency(double f_hz) const { return frequency_to_angle(f_hz); }
};

// tips the target class toward the field about n x B / |n x B| and tabulates
// its 0->-1 transition; target_class = -1 picks the lowest-frequency class
AngleFrequencyCalibration angle_frequency_calibration(const FitResult& fit, int target_class,
                                                      double angle_range_rad,
                                                      std::size_t n_points);

struct PumpProbeResult {
    std::vector<double> t_d_s;
    std::vector<double> f2_hz;
    std::vector<double> contrast;        // row-major [i_t * n_f + j]
    std::vector<double> peak_center_hz;  // refined argmax per delay
    std::vector<double> peak_amplitude;  // refined peak height per delay
    std::vector<double> theta_track_rad; // calibration inverse of the track

    double at(std::size_t i_t, std::size_t j_f) const { return contrast[i_t * f2_hz.size() + j_f]; }
};

// probe response exp(-t_d/T1) * Lorentzian(f2 - f(theta(t_d)); probe_width)
PumpProbeResult pump_probe_simulate(const FitResult& fit, const TrapParams& trap,
                                    const SpinTorqueModel& torque,
                                    const RelaxationParams& relax,
                                    const std::vector<double>& t_d_s,
                                    const std::vector<double>& f2_hz,
                                    double probe_width_hz,
                                    int target_class = -1,
                                    int workers = 0);

} // namespace smc
