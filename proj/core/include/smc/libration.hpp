#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace smc {

// sinusoidal modulation of the trap stiffness:
//   omega^2(t) = omega^2 * (1 + depth * cos(2 pi f_ac t + phase))
struct DriveModulation {
    double f_ac_hz = 0.0;
    double depth = 0.0;
    double phase_rad = 0.0;
};

struct TrapParams {
    double inertia_kg_m2 = 0.0;
    double omega_rad_s = 0.0;   // librational trap frequency
    double gamma_g_per_s = 0.0; // gas damping rate
    std::optional<DriveModulation> drive;

    void validate() const;
    // instantaneous stiffness omega^2(t), including any drive modulation
    double omega_sq_at(double t_s) const;
};

// torque from N spins flipped at onset_time, decaying with the spin T1:
//   tau(t, theta) = N * tau_s * exp(-(t-onset)/T1) * sin(phi - theta)
// where tau_s is the single-spin scale hbar * 2 pi * gamma_e * B.
struct SpinTorqueModel {
    double n_spins = 0.0;
    double field_t = 0.0;
    double phi_rad = 0.0;
    double t1_s = std::numeric_limits<double>::infinity();
    double onset_time_s = 0.0;

    void validate() const;
    double amplitude_n_m() const; // N * tau_s
    double torque_n_m(double t_s, double theta_rad) const;
};

struct LibrationState {
    double theta_rad = 0.0;
    double theta_dot_rad_s = 0.0;
};

struct LibrationTrajectory {
    std::vector<double> times_s;
    std::vector<double> theta_rad;
    std::vector<double> theta_dot_rad_s;
};

struct ParticleShape {
    enum class Kind { sphere, cube_average, ellipsoid };
    Kind kind = Kind::sphere;
    double aspect = 1.0; // ellipsoid symmetry semi-axis / equatorial radius

    static ParticleShape sphere() { return {Kind::sphere, 1.0}; }
    static ParticleShape cube_average() { return {Kind::cube_average, 1.0}; }
    static ParticleShape ellipsoid(double aspect) { return {Kind::ellipsoid, aspect}; }
};

// rotational inertia about the libration axis
double moment_of_inertia(double radius_m, double density_kg_m3, const ParticleShape& shape);

// noiseless equation of motion, classic RK4 with a fixed internal step.
// t_grid must increase strictly from 0; state0 is reported at t = 0.
LibrationTrajectory deterministic_evolve(const LibrationState& state0,
                                         const TrapParams& trap,
                                         const SpinTorqueModel& torque,
                                         const std::vector<double>& t_grid);

struct EnsembleMoments {
    std::vector<double> times_s;
    std::vector<double> mean_theta_rad;
    std::vector<double> var_theta_rad2; // sample variance across trajectories
};

// Euler-Maruyama ensemble with velocity kicks sqrt(2 gamma_g kB T / I) dW.
// Per-trajectory counter-based streams: results do not depend on workers.
// temperature = 0 with a point start falls back to the deterministic
// solution (variance 0). initial_sigma spreads the start as a Gaussian in
// (theta, theta_dot), matching a finite-width initial density.
EnsembleMoments langevin_ensemble(const LibrationState& state0,
                                  const TrapParams& trap,
                                  const SpinTorqueModel& torque,
                                  const std::vector<double>& t_grid,
                                  double temperature_k,
                                  std::size_t n_traj,
                                  std::uint64_t seed,
                                  int workers = 0,
                                  const LibrationState& initial_sigma = {0.0, 0.0});

// probability density on a uniform (theta, theta_dot) grid, row-major with
// theta as the slow index: values[i * theta_dot_grid.size() + j]
struct PhaseSpacePdf {
    std::vector<double> theta_grid;     // rad
    std::vector<double> theta_dot_grid; // rad/s
    std::vector<double> values;

    std::size_t n_theta() const { return theta_grid.size(); }
    std::size_t n_theta_dot() const { return theta_dot_grid.size(); }
    double& at(std::size_t i, std::size_t j) { return values[i * theta_dot_grid.size() + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * theta_dot_grid.size() + j]; }

    // checks uniform grids, non-negative values, trapezoidal mass within 1e-6 of 1
    void validate() const;
};

std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

// normalized bivariate gaussian sampled on the grid (sigmas must be positive)
PhaseSpacePdf gaussian_pdf(const std::vector<double>& theta_grid,
                           const std::vector<double>& theta_dot_grid,
                           double mean_theta_rad, double mean_theta_dot_rad_s,
                           double sigma_theta_rad, double sigma_theta_dot_rad_s);

// thermal equilibrium density exp(-(I v^2/2 + I w^2 th^2/2)/kB T) on the grid
PhaseSpacePdf boltzmann_pdf(const std::vector<double>& theta_grid,
                            const std::vector<double>& theta_dot_grid,
                            const TrapParams& trap, double temperature_k);

struct PhaseSpaceGrid {
    std::vector<double> theta;
    std::vector<double> theta_dot;
};

// grid sized from a deterministic pre-run plus 6 thermal sigmas of padding,
// so the evolving density never presses against the boundary
PhaseSpaceGrid auto_phase_space_grid(const LibrationState& state0,
                                     const TrapParams& trap,
                                     const SpinTorqueModel& torque,
                                     double temperature_k,
                                     double t_end_s,
                                     std::size_t n_theta = 257,
                                     std::size_t n_theta_dot = 257);

// Fokker-Planck evolution of pdf0, one snapshot per entry of t_grid.
// Flux-limited upwind advection in theta, exponentially fitted drift plus
// diffusion in theta_dot, explicit two-stage stepping under a combined CFL
// bound. Mass is watched: drift beyond 1e-4 or boundary pile-up beyond 1e-3
// raises a numerics error.
std::vector<PhaseSpacePdf> fokker_planck_evolve(const PhaseSpacePdf& pdf0,
                                                const TrapParams& trap,
                                                const SpinTorqueModel& torque,
                                                double temperature_k,
                                                const std::vector<double>& t_grid,
                                                int workers = 0);

double first_moment(const PhaseSpacePdf& pdf);    // <theta>
double theta_variance(const PhaseSpacePdf& pdf);  // Var(theta)

// least squares of theta = a t^2 through the origin; returns 2 a I
double kinematic_torque_fit(const std::vector<double>& times_s,
                            const std::vector<double>& angles_rad,
                            double inertia_kg_m2);

double spins_from_torque(double torque_n_m, double field_magnitude_t);

} // namespace smc
