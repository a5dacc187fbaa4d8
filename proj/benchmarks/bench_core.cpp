// microbenchmarks for the hot paths: eigensolves, the forward model, the
// assignment cost, and one step of each dynamics solver

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <vector>

#include "smc/constants.hpp"
#include "smc/dicke.hpp"
#include "smc/libration.hpp"
#include "smc/mdmr.hpp"
#include "smc/pulse.hpp"
#include "smc/spin.hpp"

namespace {

const smc::CrystalOrientation anchor{225.0 * smc::pi / 180.0, 292.98 * smc::pi / 180.0};
constexpr double anchor_b = 0.02715;

smc::TrapParams bench_trap() {
    smc::TrapParams trap;
    trap.inertia_kg_m2 = 1.84e-22;
    trap.omega_rad_s = 2300.0;
    trap.gamma_g_per_s = 6280.0;
    return trap;
}

smc::SpinTorqueModel bench_torque() {
    smc::SpinTorqueModel torque;
    torque.n_spins = 1e8;
    torque.field_t = anchor_b;
    torque.phi_rad = smc::pi / 2.0;
    torque.t1_s = 7e-3;
    return torque;
}

void BM_eigensolve(benchmark::State& state) {
    const auto axes = smc::nv_axes(anchor);
    const smc::FieldVector field = anchor_b * smc::Vec3::UnitZ();
    const smc::NvAxis axis = smc::NvAxis::from_direction(axes[0]);
    for (auto _ : state) {
        const auto freqs = smc::transition_frequencies(smc::build_hamiltonian(field, axis));
        benchmark::DoNotOptimize(freqs.f_minus_hz);
    }
}
BENCHMARK(BM_eigensolve);

void BM_forward_spectrum(benchmark::State& state) {
    for (auto _ : state) {
        const auto peaks = smc::forward_spectrum(anchor_b, anchor, {5e6}, {-0.01});
        benchmark::DoNotOptimize(peaks.centers_hz.data());
    }
}
BENCHMARK(BM_forward_spectrum);

void BM_assignment_cost(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> f(2.3e9, 3.5e9);
    std::vector<double> measured(8), model(8);
    for (auto& v : measured) v = f(rng);
    for (auto& v : model) v = f(rng);
    std::sort(measured.begin(), measured.end());
    std::sort(model.begin(), model.end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(smc::assignment_cost_hz(measured, model));
    }
}
BENCHMARK(BM_assignment_cost);

void BM_angle_calibration(benchmark::State& state) {
    smc::FitResult fit;
    fit.b_t = anchor_b;
    fit.orientation = anchor;
    fit.converged = true;
    for (auto _ : state) {
        const auto cal = smc::angle_frequency_calibration(fit, -1, 0.3, 512);
        benchmark::DoNotOptimize(cal.f_minus_hz.data());
    }
}
BENCHMARK(BM_angle_calibration)->Unit(benchmark::kMillisecond);

void BM_langevin_ensemble(benchmark::State& state) {
    const auto trap = bench_trap();
    const auto torque = bench_torque();
    const std::vector<double> t = smc::uniform_grid(0.0, 1e-3, 5);
    for (auto _ : state) {
        const auto moments =
            smc::langevin_ensemble({0.0, 0.0}, trap, torque, t, 300.0,
                                   std::size_t(state.range(0)), 9, 1);
        benchmark::DoNotOptimize(moments.mean_theta_rad.data());
    }
}
BENCHMARK(BM_langevin_ensemble)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_fokker_planck(benchmark::State& state) {
    const auto trap = bench_trap();
    const auto torque = bench_torque();
    const std::size_t n = std::size_t(state.range(0));
    const auto grid =
        smc::auto_phase_space_grid({0.0, 0.0}, trap, torque, 300.0, 0.2e-3, n, n);
    const auto pdf0 = smc::gaussian_pdf(grid.theta, grid.theta_dot, 0.0, 0.0,
                                        3.0 * (grid.theta[1] - grid.theta[0]),
                                        3.0 * (grid.theta_dot[1] - grid.theta_dot[0]));
    for (auto _ : state) {
        const auto snaps =
            smc::fokker_planck_evolve(pdf0, trap, torque, 300.0, {0.0, 0.2e-3}, 1);
        benchmark::DoNotOptimize(snaps.back().values.data());
    }
}
BENCHMARK(BM_fokker_planck)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_dicke_weights(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    for (auto _ : state) {
        const auto w = smc::dicke_weights(n);
        benchmark::DoNotOptimize(w.log_weights.data());
    }
}
BENCHMARK(BM_dicke_weights)->Arg(1000)->Arg(1000000);

void BM_echo_amplitude(benchmark::State& state) {
    smc::RelaxationParams relax;
    relax.t1_s = 0.6e-3;
    relax.t2_s = 1.22e-6;
    relax.t2_star_s = 90e-9;
    const double sigma = smc::detuning_sigma_from_t2_star(relax.t2_star_s);
    for (auto _ : state) {
        benchmark::DoNotOptimize(smc::echo_amplitude(1e-6, relax, sigma, 400, 11));
    }
}
BENCHMARK(BM_echo_amplitude);

} // namespace

BENCHMARK_MAIN();
