#include "smc/noise.hpp"

#include <cmath>
#include <limits>

#include "smc/constants.hpp"
#include "smc/errors.hpp"

namespace smc {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be positive");
}

void require_non_negative(double v, const char* what) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be non-negative");
}

} // namespace

void SensitivityInputs::validate() const {
    require_positive(delta_x_counts, "detectable count difference");
    require_positive(x0_counts, "baseline counts");
    require_non_negative(contrast, "contrast");
    if (contrast > 1.0) throw InvalidInput("contrast cannot exceed 1");
    require_positive(ramsey_time_s, "phase accumulation time");
    require_positive(dead_time_s, "dead time");
    require_non_negative(rotation_time_s, "rotation time");
    require_positive(n_spins, "spin number");
    require_positive(field_t, "field magnitude");
    require_positive(inertia_kg_m2, "moment of inertia");
    require_positive(omega0_rad_s, "trap frequency");
    require_positive(gas_temp_k, "gas temperature");
    require_positive(gamma_g_per_s, "gas damping rate");
    require_positive(theta_span_rad, "angular span");
    require_positive(conversion_time_s, "conversion time");
    require_positive(attenuation, "attenuation");
    require_positive(t2_star_s, "dephasing time");
    require_positive(t2_star_dead_time_s, "dephasing-limited dead time");
    require_positive(measurement_time_s, "measurement time");
    require_positive(gamma_e_hz_per_t, "gyromagnetic ratio");
    if (delta_x_counts > x0_counts)
        throw InvalidInput("detectable count difference cannot exceed the baseline counts");
}

double ramsey_signal(double delta_x_counts, double field_offset_t, double time_s,
                     double gamma_e_hz_per_t, bool linearized) {
    require_positive(delta_x_counts, "detectable count difference");
    require_non_negative(time_s, "phase accumulation time");
    require_positive(gamma_e_hz_per_t, "gyromagnetic ratio");
    if (!std::isfinite(field_offset_t)) throw InvalidInput("field offset must be finite");
    const double phase = pi * gamma_e_hz_per_t * field_offset_t * time_s;
    if (linearized) return delta_x_counts * phase;
    const double c = std::cos(phase);
    return delta_x_counts * c * c;
}

double shot_noise_field_sensitivity(double delta_x_counts, double ramsey_time_s,
                                    double dead_time_s, double gamma_e_hz_per_t) {
    require_positive(delta_x_counts, "detectable count difference");
    require_positive(ramsey_time_s, "phase accumulation time");
    require_positive(dead_time_s, "dead time");
    require_positive(gamma_e_hz_per_t, "gyromagnetic ratio");
    return std::sqrt(2.0 * dead_time_s / delta_x_counts) / (gamma_e_hz_per_t * ramsey_time_s);
}

AngleSensitivity shot_noise_angle_sensitivity(double x0_counts, double contrast,
                                              double theta_span_rad, double dead_time_s) {
    require_positive(x0_counts, "baseline counts");
    require_non_negative(contrast, "contrast");
    if (contrast > 1.0) throw InvalidInput("contrast cannot exceed 1");
    require_non_negative(theta_span_rad, "angular span");
    require_positive(dead_time_s, "dead time");
    AngleSensitivity out;
    if (theta_span_rad <= 0.0 || 1.0 - contrast < 1e-12) {
        out.degenerate = true;
        out.rad_per_sqrt_hz = std::numeric_limits<double>::infinity();
        return out;
    }
    out.rad_per_sqrt_hz = std::sqrt(x0_counts * (1.0 + contrast) / 2.0) * theta_span_rad *
                          std::sqrt(dead_time_s) / (x0_counts * (1.0 - contrast));
    return out;
}

double projection_torque_noise(double n_spins, double field_t, double dead_time_s,
                               double gamma_e_hz_per_t) {
    require_positive(n_spins, "spin number");
    require_positive(field_t, "field magnitude");
    require_positive(dead_time_s, "dead time");
    require_positive(gamma_e_hz_per_t, "gyromagnetic ratio");
    return hbar * 2.0 * pi * gamma_e_hz_per_t * field_t * std::sqrt(n_spins / 2.0) *
           std::sqrt(dead_time_s);
}

double projection_angle_noise(double n_spins, double field_t, double dead_time_s,
                              double inertia_kg_m2, double conversion_time_s,
                              double gamma_e_hz_per_t) {
    require_positive(inertia_kg_m2, "moment of inertia");
    require_positive(conversion_time_s, "conversion time");
    const double torque = projection_torque_noise(n_spins, field_t, dead_time_s, gamma_e_hz_per_t);
    return torque / inertia_kg_m2 * conversion_time_s * conversion_time_s / 2.0;
}

double relative_projection_noise(double n_spins) {
    require_positive(n_spins, "spin number");
    return std::sqrt(2.0 / n_spins);
}

double thermal_angle_noise(double gas_temp_k, double inertia_kg_m2, double omega0_rad_s,
                           double dead_time_s) {
    require_positive(gas_temp_k, "gas temperature");
    require_positive(inertia_kg_m2, "moment of inertia");
    require_positive(omega0_rad_s, "trap frequency");
    require_positive(dead_time_s, "dead time");
    return std::sqrt(k_boltzmann * gas_temp_k / (inertia_kg_m2 * omega0_rad_s * omega0_rad_s)) *
           std::sqrt(dead_time_s);
}

double resonant_torque_limit(double gas_temp_k, double inertia_kg_m2, double gamma_g_per_s,
                             double measurement_time_s) {
    require_positive(gas_temp_k, "gas temperature");
    require_positive(inertia_kg_m2, "moment of inertia");
    require_positive(gamma_g_per_s, "gas damping rate");
    require_positive(measurement_time_s, "measurement time");
    return std::sqrt(4.0 * k_boltzmann * gas_temp_k * inertia_kg_m2 * gamma_g_per_s /
                     measurement_time_s);
}

std::vector<NoiseBudgetRow> sensitivity_table(const SensitivityInputs& in) {
    in.validate();
    std::vector<NoiseBudgetRow> rows;
    rows.push_back({"field_shot_noise",
                    shot_noise_field_sensitivity(in.delta_x_counts, in.ramsey_time_s,
                                                 in.dead_time_s, in.gamma_e_hz_per_t),
                    "T/sqrt(Hz)"});
    rows.push_back({"field_shot_noise_unattenuated",
                    shot_noise_field_sensitivity(in.delta_x_counts * in.attenuation,
                                                 in.ramsey_time_s, in.dead_time_s,
                                                 in.gamma_e_hz_per_t),
                    "T/sqrt(Hz)"});
    rows.push_back({"field_shot_noise_coherence_limited",
                    shot_noise_field_sensitivity(in.delta_x_counts * in.attenuation, in.t2_star_s,
                                                 in.t2_star_dead_time_s, in.gamma_e_hz_per_t),
                    "T/sqrt(Hz)"});
    rows.push_back({"angle_shot_noise",
                    shot_noise_angle_sensitivity(in.x0_counts, in.contrast, in.theta_span_rad,
                                                 in.dead_time_s)
                        .rad_per_sqrt_hz,
                    "rad/sqrt(Hz)"});
    rows.push_back({"torque_projection_noise",
                    projection_torque_noise(in.n_spins, in.field_t, in.dead_time_s,
                                            in.gamma_e_hz_per_t),
                    "N*m/sqrt(Hz)"});
    rows.push_back({"angle_projection_noise",
                    projection_angle_noise(in.n_spins, in.field_t, in.dead_time_s,
                                           in.inertia_kg_m2, in.conversion_time_s,
                                           in.gamma_e_hz_per_t),
                    "rad/sqrt(Hz)"});
    rows.push_back({"relative_projection_noise", relative_projection_noise(in.n_spins), "1"});
    rows.push_back({"angle_thermal_noise",
                    thermal_angle_noise(in.gas_temp_k, in.inertia_kg_m2, in.omega0_rad_s,
                                        in.dead_time_s),
                    "rad/sqrt(Hz)"});
    rows.push_back({"torque_thermal_resonant",
                    resonant_torque_limit(in.gas_temp_k, in.inertia_kg_m2, in.gamma_g_per_s,
                                          in.measurement_time_s),
                    "N*m"});
    return rows;
}

} // namespace smc
