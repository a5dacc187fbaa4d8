#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "smc/constants.hpp"
#include "smc/errors.hpp"
#include "smc/libration.hpp"
#include "smc/spin.hpp"
#include "oracles.hpp"

using namespace smc;

namespace {
const double inf = std::numeric_limits<double>::infinity();

TrapParams make_trap(double inertia, double omega, double gamma) {
    TrapParams t;
    t.inertia_kg_m2 = inertia;
    t.omega_rad_s = omega;
    t.gamma_g_per_s = gamma;
    return t;
}

SpinTorqueModel no_torque() { return {}; }

std::vector<double> times(double t_end, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = t_end * double(k) / double(n - 1);
    return g;
}
} // namespace

TEST_CASE("moment of inertia for the supported shapes") {
    // sphere: 2/5 m r^2
    const double r = 5e-6, rho = 3515.0;
    const double m_sph = 4.0 / 3.0 * pi * r * r * r * rho;
    CHECK(moment_of_inertia(r, rho, ParticleShape::sphere()) ==
          doctest::Approx(0.4 * m_sph * r * r).epsilon(1e-14));
    CHECK(moment_of_inertia(r, rho, ParticleShape::sphere()) ==
          doctest::Approx(1.84045e-23).epsilon(1e-5));

    // cube/sphere average used for faceted particles
    CHECK(moment_of_inertia(r, rho, ParticleShape::cube_average()) ==
          doctest::Approx(1.30365e-23).epsilon(1e-5));

    // flattened ellipsoid, transverse libration axis
    CHECK(moment_of_inertia(10e-6, rho, ParticleShape::ellipsoid(0.5)) ==
          doctest::Approx(1.84045e-22).epsilon(1e-5));

    CHECK_THROWS_AS(moment_of_inertia(-1e-6, rho, ParticleShape::sphere()), InvalidInput);
    CHECK_THROWS_AS(moment_of_inertia(r, 0.0, ParticleShape::sphere()), InvalidInput);
    CHECK_THROWS_AS(moment_of_inertia(r, rho, ParticleShape::ellipsoid(-0.5)), InvalidInput);
}

TEST_CASE("deterministic evolution matches the damped oscillator closed form") {
    TrapParams trap = make_trap(1e-23, 2300.0, 500.0);
    const double theta0 = 0.01, v0 = 5.0;
    auto grid = times(5e-3, 41);
    auto traj = deterministic_evolve({theta0, v0}, trap, no_torque(), grid);
    REQUIRE(traj.theta_rad.size() == grid.size());
    CHECK(traj.theta_rad[0] == theta0);
    CHECK(traj.theta_dot_rad_s[0] == v0);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double want =
            oracle::damped_oscillator_theta(theta0, v0, trap.omega_rad_s,
                                            trap.gamma_g_per_s, grid[k]);
        CHECK(std::abs(traj.theta_rad[k] - want) < 1e-8);
    }
}

TEST_CASE("undamped oscillator conserves energy over 100 periods") {
    TrapParams trap = make_trap(1e-23, 2.0 * pi * 1000.0, 0.0);
    const double period = 2.0 * pi / trap.omega_rad_s;
    const double theta0 = 0.02;
    auto traj = deterministic_evolve({theta0, 0.0}, trap, no_torque(),
                                     times(100.0 * period, 201));
    const double w2 = trap.omega_rad_s * trap.omega_rad_s;
    const double e0 = w2 * theta0 * theta0;
    const double theta_end = traj.theta_rad.back();
    const double v_end = traj.theta_dot_rad_s.back();
    const double e_end = v_end * v_end + w2 * theta_end * theta_end;
    CHECK(std::abs(e_end - e0) / e0 < 1e-6);
}

TEST_CASE("constant spin torque settles at the balance angle") {
    TrapParams trap = make_trap(1e-23, 2300.0, 2000.0);
    SpinTorqueModel torque;
    torque.n_spins = 5e7;
    torque.field_t = 0.02;
    torque.phi_rad = 1.0;
    torque.t1_s = inf; // non-decaying
    const double amp = torque.amplitude_n_m();
    CHECK(amp == doctest::Approx(5e7 * per_spin_torque_scale(0.02)).epsilon(1e-14));

    auto traj = deterministic_evolve({0.0, 0.0}, trap, torque, {0.0, 0.02});
    const double want = oracle::torque_balance_angle(trap.inertia_kg_m2, trap.omega_rad_s,
                                                     amp, torque.phi_rad);
    CHECK(traj.theta_rad.back() == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("torque onset and decay behave as advertised") {
    SpinTorqueModel torque;
    torque.n_spins = 1e7;
    torque.field_t = 0.0271;
    torque.phi_rad = 0.5;
    torque.t1_s = 0.6e-3;
    torque.onset_time_s = 1e-3;

    CHECK(torque.torque_n_m(0.5e-3, 0.0) == 0.0); // before onset
    const double at_onset = torque.torque_n_m(1e-3, 0.0);
    CHECK(at_onset == doctest::Approx(torque.amplitude_n_m() * std::sin(0.5)).epsilon(1e-12));
    CHECK(torque.torque_n_m(1e-3 + 0.6e-3, 0.0) ==
          doctest::Approx(at_onset * std::exp(-1.0)).epsilon(1e-12));
    // restoring form: vanishes at theta = phi
    CHECK(torque.torque_n_m(2e-3, 0.5) == 0.0);
}

TEST_CASE("zero drive depth is the same trap as no drive") {
    TrapParams bare = make_trap(1e-23, 2300.0, 300.0);
    TrapParams driven = bare;
    driven.drive = DriveModulation{2300.0 / pi, 0.0, 0.3};
    CHECK(driven.omega_sq_at(0.37e-3) == doctest::Approx(bare.omega_sq_at(0.37e-3)));

    auto grid = times(2e-3, 21);
    auto a = deterministic_evolve({0.01, 0.0}, bare, no_torque(), grid);
    auto b = deterministic_evolve({0.01, 0.0}, driven, no_torque(), grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(std::abs(a.theta_rad[k] - b.theta_rad[k]) < 1e-8);
    }
}

TEST_CASE("stiffness modulation follows the drive formula") {
    TrapParams trap = make_trap(1e-23, 2300.0, 0.0);
    trap.drive = DriveModulation{750.0, 0.2, 0.4};
    const double t = 1.3e-4;
    const double want = 2300.0 * 2300.0 * (1.0 + 0.2 * std::cos(2.0 * pi * 750.0 * t + 0.4));
    CHECK(trap.omega_sq_at(t) == doctest::Approx(want).epsilon(1e-14));
    trap.drive->depth = 1.5;
    CHECK_THROWS_AS(trap.validate(), InvalidInput);
}

TEST_CASE("time grid and parameter validation") {
    TrapParams trap = make_trap(1e-23, 2300.0, 0.0);
    CHECK_THROWS_AS(deterministic_evolve({0.0, 0.0}, trap, no_torque(), {}), InvalidInput);
    CHECK_THROWS_AS(deterministic_evolve({0.0, 0.0}, trap, no_torque(), {0.5, 1.0}),
                    InvalidInput);
    CHECK_THROWS_AS(deterministic_evolve({0.0, 0.0}, trap, no_torque(), {0.0, 1.0, 1.0}),
                    InvalidInput);
    TrapParams bad = trap;
    bad.inertia_kg_m2 = 0.0;
    CHECK_THROWS_AS(deterministic_evolve({0.0, 0.0}, bad, no_torque(), {0.0, 1.0}),
                    InvalidInput);
    SpinTorqueModel torque;
    torque.t1_s = 0.0;
    CHECK_THROWS_AS(torque.validate(), InvalidInput);
}

TEST_CASE("langevin at zero temperature reproduces the deterministic path") {
    TrapParams trap = make_trap(1e-23, 2300.0, 800.0);
    SpinTorqueModel torque;
    torque.n_spins = 1e7;
    torque.field_t = 0.0271;
    torque.phi_rad = 0.3;
    torque.t1_s = 0.6e-3;
    auto grid = times(2e-3, 17);
    auto det = deterministic_evolve({0.005, 0.0}, trap, torque, grid);
    auto ens = langevin_ensemble({0.005, 0.0}, trap, torque, grid, 0.0, 64, 42);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(ens.mean_theta_rad[k] == det.theta_rad[k]); // exact delegation
        CHECK(ens.var_theta_rad2[k] == 0.0);
    }
}

TEST_CASE("gaussian initial spread propagates like the linear moment flow") {
    TrapParams trap = make_trap(1.8404e-22, 2300.0, 800.0);
    const double sigma_theta = 1e-3;
    auto grid = times(1.5e-3, 7);
    const std::size_t n_traj = 4000;
    auto ens = langevin_ensemble({0.01, 0.0}, trap, no_torque(), grid, 0.0, n_traj, 5,
                                 0, {sigma_theta, 0.0});

    oracle::MomentState init;
    init.mean_theta = 0.01;
    init.var_theta = sigma_theta * sigma_theta;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        auto ref = oracle::linear_moments(init, trap.omega_rad_s, trap.gamma_g_per_s, 0.0,
                                          0.0, 1.0, grid[k]);
        CHECK(std::abs(ens.mean_theta_rad[k] - ref.mean_theta) < 2e-4);
        CHECK(ens.var_theta_rad2[k] == doctest::Approx(ref.var_theta).epsilon(0.12));
    }
}

TEST_CASE("langevin moments do not depend on the worker count") {
    TrapParams trap = make_trap(1.8404e-22, 2300.0, 6280.0);
    auto grid = times(5e-4, 5);
    auto a = langevin_ensemble({0.002, 0.0}, trap, no_torque(), grid, 300.0, 96, 9, 1);
    auto b = langevin_ensemble({0.002, 0.0}, trap, no_torque(), grid, 300.0, 96, 9, 4);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(a.mean_theta_rad[k] == b.mean_theta_rad[k]);
        CHECK(a.var_theta_rad2[k] == b.var_theta_rad2[k]);
    }
}

TEST_CASE("kinematic torque fit inverts theta = a t^2 exactly") {
    const double a = 1.09e6, inertia = 1.3037e-23;
    std::vector<double> t, th;
    for (int k = 0; k <= 20; ++k) {
        t.push_back(k * 5e-8);
        th.push_back(a * t.back() * t.back());
    }
    CHECK(kinematic_torque_fit(t, th, inertia) ==
          doctest::Approx(2.0 * a * inertia).epsilon(1e-12));

    CHECK_THROWS_AS(kinematic_torque_fit({0.0, 1.0}, {0.0, 1.0}, inertia), InvalidInput);
    CHECK_THROWS_AS(kinematic_torque_fit({1.0, 1.0, 1.0}, {0.0, 1.0, 2.0}, inertia),
                    InvalidInput);
}

TEST_CASE("spins_from_torque inverts the per-spin scale") {
    const double b = 0.02715;
    const double tau = 5.68e-17;
    const double n = spins_from_torque(tau, b);
    CHECK(n * per_spin_torque_scale(b) == doctest::Approx(tau).epsilon(1e-12));
    CHECK_THROWS_AS(spins_from_torque(tau, 0.0), InvalidInput);
}
