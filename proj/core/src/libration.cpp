#include "smc/libration.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "smc/constants.hpp"
#include "smc/errors.hpp"
#include "smc/parallel.hpp"
#include "smc/rng.hpp"
#include "smc/spin.hpp"

namespace smc {

namespace {

bool finite(double x) { return std::isfinite(x); }

void check_time_grid(const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw InvalidInput("time grid is empty");
    if (t_grid.front() != 0.0) throw InvalidInput("time grid must start at 0");
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        if (!finite(t_grid[k]) || t_grid[k] <= t_grid[k - 1]) {
            throw InvalidInput("time grid must increase strictly");
        }
    }
}

struct Rhs {
    const TrapParams& trap;
    const SpinTorqueModel& torque;

    double accel(double t, double theta, double v) const {
        double a = -trap.gamma_g_per_s * v - trap.omega_sq_at(t) * theta;
        a += torque.torque_n_m(t, theta) / trap.inertia_kg_m2;
        return a;
    }
};

bool torque_active(const SpinTorqueModel& torque) {
    return torque.n_spins > 0.0 && torque.field_t > 0.0;
}

// internal step: small enough to hold the RK4 energy drift of the bare
// oscillator below ~3e-7 per 100 periods and to resolve damping, T1 decay
// and any stiffness drive
double rk4_base_step(const TrapParams& trap, const SpinTorqueModel& torque) {
    double dt = std::numeric_limits<double>::infinity();
    if (trap.omega_rad_s > 0.0) dt = std::min(dt, 2.0 * pi / (200.0 * trap.omega_rad_s));
    if (trap.gamma_g_per_s > 0.0) dt = std::min(dt, 1.0 / (20.0 * trap.gamma_g_per_s));
    if (torque_active(torque) && std::isfinite(torque.t1_s)) dt = std::min(dt, torque.t1_s / 20.0);
    if (trap.drive && trap.drive->f_ac_hz > 0.0) dt = std::min(dt, 1.0 / (20.0 * trap.drive->f_ac_hz));
    return dt;
}

void rk4_span(const Rhs& rhs, double t0, double t1, double base_step,
              double& theta, double& v) {
    const double span = t1 - t0;
    if (span <= 0.0) return;
    std::size_t n = 1;
    if (std::isfinite(base_step) && base_step > 0.0) {
        n = static_cast<std::size_t>(std::ceil(span / base_step));
        n = std::max<std::size_t>(n, 1);
    }
    const double h = span / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) * h;
        const double k1t = v;
        const double k1v = rhs.accel(t, theta, v);
        const double k2t = v + 0.5 * h * k1v;
        const double k2v = rhs.accel(t + 0.5 * h, theta + 0.5 * h * k1t, v + 0.5 * h * k1v);
        const double k3t = v + 0.5 * h * k2v;
        const double k3v = rhs.accel(t + 0.5 * h, theta + 0.5 * h * k2t, v + 0.5 * h * k2v);
        const double k4t = v + h * k3v;
        const double k4v = rhs.accel(t + h, theta + h * k3t, v + h * k3v);
        theta += h / 6.0 * (k1t + 2.0 * k2t + 2.0 * k3t + k4t);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
}

} // namespace

void TrapParams::validate() const {
    if (!(inertia_kg_m2 > 0.0) || !finite(inertia_kg_m2)) {
        throw InvalidInput("trap inertia must be positive");
    }
    if (!(omega_rad_s >= 0.0) || !finite(omega_rad_s)) {
        throw InvalidInput("trap frequency must be >= 0");
    }
    if (!(gamma_g_per_s >= 0.0) || !finite(gamma_g_per_s)) {
        throw InvalidInput("gas damping rate must be >= 0");
    }
    if (drive) {
        if (!(drive->f_ac_hz > 0.0) || !finite(drive->f_ac_hz)) {
            throw InvalidInput("drive frequency must be positive");
        }
        if (!(std::abs(drive->depth) < 1.0)) {
            throw InvalidInput("drive depth magnitude must be < 1");
        }
        if (!finite(drive->phase_rad)) throw InvalidInput("drive phase must be finite");
    }
}

double TrapParams::omega_sq_at(double t_s) const {
    double w2 = omega_rad_s * omega_rad_s;
    if (drive) {
        w2 *= 1.0 + drive->depth * std::cos(2.0 * pi * drive->f_ac_hz * t_s + drive->phase_rad);
    }
    return w2;
}

void SpinTorqueModel::validate() const {
    if (!(n_spins >= 0.0) || !finite(n_spins)) throw InvalidInput("spin count must be >= 0");
    if (!(field_t >= 0.0) || !finite(field_t)) throw InvalidInput("field magnitude must be >= 0");
    if (!finite(phi_rad)) throw InvalidInput("equilibrium angle must be finite");
    if (!(t1_s > 0.0)) throw InvalidInput("t1 must be positive");
    if (!(onset_time_s >= 0.0) || !finite(onset_time_s)) {
        throw InvalidInput("onset time must be >= 0");
    }
}

double SpinTorqueModel::amplitude_n_m() const {
    return n_spins * per_spin_torque_scale(field_t);
}

double SpinTorqueModel::torque_n_m(double t_s, double theta_rad) const {
    if (n_spins == 0.0 || field_t == 0.0 || t_s < onset_time_s) return 0.0;
    const double decay = std::exp(-(t_s - onset_time_s) / t1_s);
    return amplitude_n_m() * decay * std::sin(phi_rad - theta_rad);
}

double moment_of_inertia(double radius_m, double density_kg_m3, const ParticleShape& shape) {
    if (!(radius_m > 0.0) || !finite(radius_m)) throw InvalidInput("radius must be positive");
    if (!(density_kg_m3 > 0.0) || !finite(density_kg_m3)) {
        throw InvalidInput("density must be positive");
    }
    const double r2 = radius_m * radius_m;
    const double sphere_mass = 4.0 / 3.0 * pi * radius_m * r2 * density_kg_m3;
    switch (shape.kind) {
        case ParticleShape::Kind::sphere:
            return 0.4 * sphere_mass * r2;
        case ParticleShape::Kind::cube_average:
            // mean of a cube of side 2r and the inscribed sphere, sphere mass
            return 0.5 * (1.0 / 6.0 + 2.0 / 5.0) * sphere_mass * r2;
        case ParticleShape::Kind::ellipsoid: {
            if (!(shape.aspect > 0.0) || !finite(shape.aspect)) {
                throw InvalidInput("ellipsoid aspect must be positive");
            }
            // semi-axes (r, r, aspect*r), libration about a transverse axis
            const double mass = sphere_mass * shape.aspect;
            return 0.2 * mass * r2 * (1.0 + shape.aspect * shape.aspect);
        }
    }
    throw InvalidInput("unknown particle shape");
}

LibrationTrajectory deterministic_evolve(const LibrationState& state0,
                                         const TrapParams& trap,
                                         const SpinTorqueModel& torque,
                                         const std::vector<double>& t_grid) {
    trap.validate();
    torque.validate();
    check_time_grid(t_grid);
    if (!finite(state0.theta_rad) || !finite(state0.theta_dot_rad_s)) {
        throw InvalidInput("initial state must be finite");
    }

    const Rhs rhs{trap, torque};
    const double base_step = rk4_base_step(trap, torque);

    const bool conservative = trap.gamma_g_per_s == 0.0 && !trap.drive && !torque_active(torque) &&
                              trap.omega_rad_s > 0.0;
    const double w2 = trap.omega_rad_s * trap.omega_rad_s;
    const double e0 = state0.theta_dot_rad_s * state0.theta_dot_rad_s +
                      w2 * state0.theta_rad * state0.theta_rad;

    LibrationTrajectory out;
    out.times_s = t_grid;
    out.theta_rad.resize(t_grid.size());
    out.theta_dot_rad_s.resize(t_grid.size());

    double theta = state0.theta_rad;
    double v = state0.theta_dot_rad_s;
    out.theta_rad[0] = theta;
    out.theta_dot_rad_s[0] = v;

    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        double t0 = t_grid[k - 1];
        const double t1 = t_grid[k];
        // land a step boundary exactly on the torque switch-on
        if (torque_active(torque) && torque.onset_time_s > t0 && torque.onset_time_s < t1) {
            rk4_span(rhs, t0, torque.onset_time_s, base_step, theta, v);
            t0 = torque.onset_time_s;
        }
        rk4_span(rhs, t0, t1, base_step, theta, v);
        if (!finite(theta) || !finite(v)) throw NumericsError("libration integration diverged");
        if (conservative && e0 > 0.0) {
            const double e = v * v + w2 * theta * theta;
            if (e > e0 * (1.0 + 1e-3)) {
                throw NumericsError("libration integration unstable: energy grew");
            }
        }
        out.theta_rad[k] = theta;
        out.theta_dot_rad_s[k] = v;
    }
    return out;
}

EnsembleMoments langevin_ensemble(const LibrationState& state0,
                                  const TrapParams& trap,
                                  const SpinTorqueModel& torque,
                                  const std::vector<double>& t_grid,
                                  double temperature_k,
                                  std::size_t n_traj,
                                  std::uint64_t seed,
                                  int workers,
                                  const LibrationState& initial_sigma) {
    trap.validate();
    torque.validate();
    check_time_grid(t_grid);
    if (!(temperature_k >= 0.0) || !finite(temperature_k)) {
        throw InvalidInput("temperature must be >= 0");
    }
    if (n_traj < 1) throw InvalidInput("need at least one trajectory");
    if (!finite(state0.theta_rad) || !finite(state0.theta_dot_rad_s)) {
        throw InvalidInput("initial state must be finite");
    }
    if (!(initial_sigma.theta_rad >= 0.0) || !(initial_sigma.theta_dot_rad_s >= 0.0) ||
        !finite(initial_sigma.theta_rad) || !finite(initial_sigma.theta_dot_rad_s)) {
        throw InvalidInput("initial spread must be finite and >= 0");
    }
    const bool spread_start =
        initial_sigma.theta_rad > 0.0 || initial_sigma.theta_dot_rad_s > 0.0;

    const std::size_t n_out = t_grid.size();
    EnsembleMoments out;
    out.times_s = t_grid;
    out.mean_theta_rad.resize(n_out);
    out.var_theta_rad2.assign(n_out, 0.0);

    if (temperature_k == 0.0 && !spread_start) {
        // noiseless limit: every trajectory is the deterministic solution
        const auto det = deterministic_evolve(state0, trap, torque, t_grid);
        out.mean_theta_rad = det.theta_rad;
        return out;
    }

    double dt_base = std::numeric_limits<double>::infinity();
    if (trap.omega_rad_s > 0.0) dt_base = std::min(dt_base, 1.0 / trap.omega_rad_s);
    if (trap.gamma_g_per_s > 0.0) dt_base = std::min(dt_base, 1.0 / trap.gamma_g_per_s);
    if (torque_active(torque) && std::isfinite(torque.t1_s)) dt_base = std::min(dt_base, torque.t1_s);
    if (trap.drive && trap.drive->f_ac_hz > 0.0) dt_base = std::min(dt_base, 1.0 / trap.drive->f_ac_hz);
    if (!std::isfinite(dt_base)) dt_base = t_grid.back();
    dt_base /= 1000.0;

    // fixed substep schedule shared by every trajectory
    std::vector<std::size_t> n_sub(n_out - 1);
    std::vector<double> h_sub(n_out - 1);
    for (std::size_t k = 0; k + 1 < n_out; ++k) {
        const double span = t_grid[k + 1] - t_grid[k];
        auto n = static_cast<std::size_t>(std::ceil(span / dt_base));
        n_sub[k] = std::max<std::size_t>(n, 1);
        h_sub[k] = span / static_cast<double>(n_sub[k]);
    }

    const Rhs rhs{trap, torque};
    const double kick_scale =
        std::sqrt(2.0 * trap.gamma_g_per_s * k_boltzmann * temperature_k / trap.inertia_kg_m2);

    std::vector<double> slab(n_traj * n_out);
    parallel_for(n_traj, workers, [&](std::size_t i) {
        auto engine = stream_engine(seed, static_cast<std::uint64_t>(i));
        std::normal_distribution<double> normal(0.0, 1.0);
        double theta = state0.theta_rad;
        double v = state0.theta_dot_rad_s;
        if (spread_start) {
            theta += initial_sigma.theta_rad * normal(engine);
            v += initial_sigma.theta_dot_rad_s * normal(engine);
        }
        slab[i * n_out] = theta;
        for (std::size_t k = 0; k + 1 < n_out; ++k) {
            const double h = h_sub[k];
            const double sqrt_h = std::sqrt(h);
            double t = t_grid[k];
            for (std::size_t s = 0; s < n_sub[k]; ++s) {
                const double a = rhs.accel(t, theta, v);
                const double theta_new = theta + v * h;
                v += a * h + kick_scale * sqrt_h * normal(engine);
                theta = theta_new;
                t += h;
            }
            slab[i * n_out + k + 1] = theta;
        }
    });

    for (std::size_t k = 0; k < n_out; ++k) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n_traj; ++i) mean += slab[i * n_out + k];
        mean /= static_cast<double>(n_traj);
        double ss = 0.0;
        for (std::size_t i = 0; i < n_traj; ++i) {
            const double d = slab[i * n_out + k] - mean;
            ss += d * d;
        }
        if (!finite(mean)) throw NumericsError("langevin ensemble diverged");
        out.mean_theta_rad[k] = mean;
        out.var_theta_rad2[k] = n_traj > 1 ? ss / static_cast<double>(n_traj - 1) : 0.0;
    }
    return out;
}

double kinematic_torque_fit(const std::vector<double>& times_s,
                            const std::vector<double>& angles_rad,
                            double inertia_kg_m2) {
    if (times_s.size() != angles_rad.size()) throw InvalidInput("times and angles sizes differ");
    if (times_s.size() < 3) throw InvalidInput("need at least 3 samples");
    if (!(inertia_kg_m2 > 0.0)) throw InvalidInput("inertia must be positive");
    double s4 = 0.0;
    double s2y = 0.0;
    const auto [lo, hi] = std::minmax_element(times_s.begin(), times_s.end());
    if (*lo == *hi) throw InvalidInput("torque fit is degenerate: all times equal");
    for (std::size_t k = 0; k < times_s.size(); ++k) {
        if (!finite(times_s[k]) || !finite(angles_rad[k])) {
            throw InvalidInput("samples must be finite");
        }
        const double t2 = times_s[k] * times_s[k];
        s4 += t2 * t2;
        s2y += t2 * angles_rad[k];
    }
    if (!(s4 > 0.0)) throw InvalidInput("torque fit is degenerate");
    const double a = s2y / s4;
    return 2.0 * a * inertia_kg_m2;
}

double spins_from_torque(double torque_n_m, double field_magnitude_t) {
    if (!(field_magnitude_t > 0.0)) throw InvalidInput("field magnitude must be positive");
    return torque_n_m / per_spin_torque_scale(field_magnitude_t);
}

} // namespace smc
