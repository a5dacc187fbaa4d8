#pragma once

#include <string>
#include <vector>

namespace smc {

// everything the shot-noise / back-action budget needs in one bag.
// rotation_time_s is carried for completeness; the budget entries below do
// not depend on it (rotation happens between preparation and readout).
struct SensitivityInputs {
    double delta_x_counts = 1e4;     // detectable count difference per shot
    double x0_counts = 1e4;          // baseline counts per shot
    double contrast = 0.5;           // fractional modulation of the resonance
    double ramsey_time_s = 1e-7;     // phase accumulation time per shot
    double dead_time_s = 1e-2;       // repolarization + readout per shot
    double rotation_time_s = 0.0;
    double n_spins = 1e8;
    double field_t = 0.027;
    double inertia_kg_m2 = 1e-23;
    double omega0_rad_s = 6283.185307179586; // 2 pi kHz
    double gas_temp_k = 300.0;
    double gamma_g_per_s = 6280.0;
    double theta_span_rad = 0.06981317007977318; // 4 degrees
    double conversion_time_s = 1e-4; // torque-to-angle integration window
    double attenuation = 1e4;        // optical attenuation in front of the detector
    double t2_star_s = 1e-6;         // dephasing-limited phase time
    double t2_star_dead_time_s = 1e-4;
    double measurement_time_s = 1.0; // bandwidth window for the resonant-force floor
    double gamma_e_hz_per_t = 28.0e9;

    void validate() const;
};

// ramsey fringe: delta_x * cos^2(pi gamma dB t); the linearized flavor is the
// mid-fringe small-phase slope delta_x * pi gamma dB t
double ramsey_signal(double delta_x_counts, double field_offset_t, double time_s,
                     double gamma_e_hz_per_t = 28.0e9, bool linearized = false);

// sqrt(2 t_dead / delta_x) / (gamma t): tesla per sqrt(Hz)
double shot_noise_field_sensitivity(double delta_x_counts, double ramsey_time_s,
                                    double dead_time_s, double gamma_e_hz_per_t = 28.0e9);

struct AngleSensitivity {
    double rad_per_sqrt_hz = 0.0;
    bool degenerate = false; // contrast at unity or vanishing span: no slope to read
};

// sqrt(x0 (1+C)/2) * span * sqrt(t_dead) / (x0 (1-C))
AngleSensitivity shot_noise_angle_sensitivity(double x0_counts, double contrast,
                                              double theta_span_rad, double dead_time_s);

// spin-projection torque white noise: h gamma B sqrt(N/2) sqrt(t_dead)
double projection_torque_noise(double n_spins, double field_t, double dead_time_s,
                               double gamma_e_hz_per_t = 28.0e9);

// the same noise converted to angle through t^2 / (2 I)
double projection_angle_noise(double n_spins, double field_t, double dead_time_s,
                              double inertia_kg_m2, double conversion_time_s,
                              double gamma_e_hz_per_t = 28.0e9);

// sqrt(2/N): projection noise relative to the full ensemble signal
double relative_projection_noise(double n_spins);

// gas-collision angle jitter referred to the trap frequency:
// sqrt(kB T / (I omega0^2)) sqrt(t_dead)
double thermal_angle_noise(double gas_temp_k, double inertia_kg_m2, double omega0_rad_s,
                           double dead_time_s);

// thermomechanical torque floor on resonance: sqrt(4 kB T I gamma / t_meas)
double resonant_torque_limit(double gas_temp_k, double inertia_kg_m2, double gamma_g_per_s,
                             double measurement_time_s);

struct NoiseBudgetRow {
    std::string label;
    double value = 0.0;
    std::string unit;
};

// the full budget evaluated on one set of inputs, fixed row order
std::vector<NoiseBudgetRow> sensitivity_table(const SensitivityInputs& inputs);

} // namespace smc
