#include "smc/experiments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "smc/constants.hpp"
#include "smc/dicke.hpp"
#include "smc/errors.hpp"
#include "smc/libration.hpp"
#include "smc/mdmr.hpp"
#include "smc/noise.hpp"
#include "smc/pulse.hpp"
#include "smc/readout.hpp"
#include "smc/rng.hpp"

namespace smc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

struct RunState {
    std::uint64_t seed = 1;
    int workers = 0;
};

RunState run_state(RunConfig& cfg) {
    RunState s;
    s.seed = std::uint64_t(cfg.get_int_or("run.seed", 1));
    s.workers = int(cfg.get_int_or("run.workers", 0));
    return s;
}

std::string fmt(double v) { return format_double(v); }

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt(v[i]);
    }
    return out;
}

TrapParams trap_from(RunConfig& cfg) {
    TrapParams trap;
    if (cfg.has("trap.inertia")) {
        trap.inertia_kg_m2 = cfg.get_quantity("trap.inertia");
    } else {
        const double radius = cfg.get_quantity("trap.radius");
        const double density = cfg.get_quantity_or("trap.density", diamond_density);
        const std::string shape = cfg.get_string_or("trap.shape", "sphere");
        ParticleShape ps;
        if (shape == "sphere") {
            ps = ParticleShape::sphere();
        } else if (shape == "cube_average") {
            ps = ParticleShape::cube_average();
        } else if (shape == "ellipsoid") {
            ps = ParticleShape::ellipsoid(cfg.get_quantity("trap.aspect"));
        } else {
            throw ConfigError("unknown shape '" + shape + "' (sphere, cube_average, ellipsoid)",
                              0, "trap.shape");
        }
        trap.inertia_kg_m2 = moment_of_inertia(radius, density, ps);
    }
    trap.omega_rad_s = cfg.get_quantity("trap.omega");
    trap.gamma_g_per_s = cfg.get_quantity_or("trap.gamma_g", 0.0);
    if (cfg.has("trap.drive_f_ac")) {
        DriveModulation d;
        d.f_ac_hz = cfg.get_quantity("trap.drive_f_ac");
        d.depth = cfg.get_quantity("trap.drive_depth");
        d.phase_rad = cfg.get_quantity_or("trap.drive_phase", 0.0);
        trap.drive = d;
    }
    trap.validate();
    return trap;
}

SpinTorqueModel torque_from(RunConfig& cfg) {
    SpinTorqueModel torque;
    torque.n_spins = cfg.get_quantity_or("torque.n_spins", 0.0);
    torque.field_t = cfg.get_quantity_or("torque.field", 0.0);
    torque.phi_rad = cfg.get_quantity_or("torque.phi", 0.0);
    torque.t1_s = cfg.get_quantity_or("torque.t1", inf);
    torque.onset_time_s = cfg.get_quantity_or("torque.onset", 0.0);
    torque.validate();
    return torque;
}

RelaxationParams relax_from(RunConfig& cfg) {
    RelaxationParams relax;
    relax.t1_s = cfg.get_quantity_or("relax.t1", inf);
    relax.t2_s = cfg.get_quantity_or("relax.t2", inf);
    relax.t2_star_s = cfg.get_quantity_or("relax.t2_star", inf);
    relax.validate();
    return relax;
}

std::size_t grid_count(RunConfig& cfg, const std::string& key, std::int64_t fallback) {
    const std::int64_t n = cfg.get_int_or(key, fallback);
    if (n < 2) throw ConfigError("'" + key + "' must be at least 2", 0, key);
    return std::size_t(n);
}

// least squares of ln y on t over the positive samples; returns the 1/e time
double fit_exponential_decay(const std::vector<double>& t, const std::vector<double>& y,
                             std::size_t& n_used) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    n_used = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        const double ly = std::log(y[i]);
        sx += t[i];
        sy += ly;
        sxx += t[i] * t[i];
        sxy += t[i] * ly;
        ++n_used;
    }
    if (n_used < 3) throw NumericsError("too few positive samples to fit a decay");
    const double n = double(n_used);
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-300) throw NumericsError("degenerate abscissae in decay fit");
    const double slope = (n * sxy - sx * sy) / denom;
    if (!(slope < 0.0)) throw NumericsError("signal does not decay");
    return -1.0 / slope;
}

OutputTable experiment_spectrum(RunConfig& cfg) {
    const double b = cfg.get_quantity("spectrum.field");
    const CrystalOrientation orientation{cfg.get_quantity("spectrum.theta_nv"),
                                         cfg.get_quantity("spectrum.phi_k")};
    const double width = cfg.get_quantity_or("spectrum.width", 10e6);
    const double amplitude = cfg.get_quantity_or("spectrum.amplitude", -0.3);
    const double f_lo = cfg.get_quantity_or("spectrum.f_lo", 2.2e9);
    const double f_hi = cfg.get_quantity_or("spectrum.f_hi", 3.6e9);
    const std::size_t n = grid_count(cfg, "spectrum.n_points", 1401);
    if (!(f_hi > f_lo)) throw ConfigError("spectrum needs f_hi > f_lo", 0, "spectrum.f_hi");

    const SpectrumPeaks peaks = forward_spectrum(b, orientation, {width}, {amplitude});
    const std::vector<double> grid = uniform_grid(f_lo, f_hi, n);
    const std::vector<double> curve = spectrum_curve(peaks, grid);

    const auto axes = nv_axes(orientation);
    std::vector<double> class_angles_deg(4);
    for (std::size_t k = 0; k < 4; ++k)
        class_angles_deg[k] = std::acos(std::min(1.0, std::fabs(axes[k].z()))) * 180.0 / pi;

    OutputTable out;
    out.columns = {"frequency_hz", "signal"};
    out.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.rows.push_back({grid[i], curve[i]});
    out.meta.emplace_back("field_t", fmt(b));
    out.meta.emplace_back("peak_centers_hz", join_doubles(peaks.centers_hz));
    out.meta.emplace_back("class_angles_deg", join_doubles(class_angles_deg));
    return out;
}

OutputTable experiment_fit(RunConfig& cfg, const RunState& run) {
    std::vector<double> measured;
    OutputTable out;
    bool synthetic = false;
    double true_b = 0.0;
    CrystalOrientation true_orientation;
    if (cfg.has("fit.centers")) {
        measured = cfg.get_list("fit.centers");
    } else {
        synthetic = true;
        true_b = cfg.get_quantity("fit.field");
        true_orientation = CrystalOrientation{cfg.get_quantity("fit.theta_nv"),
                                              cfg.get_quantity("fit.phi_k")};
        const double noise = cfg.get_quantity_or("fit.noise", 1e6);
        const SpectrumPeaks peaks = forward_spectrum(true_b, true_orientation, {1e6}, {-0.1});
        measured = peaks.centers_hz;
        if (noise > 0.0) {
            auto engine = stream_engine(run.seed, 7);
            std::normal_distribution<double> gauss(0.0, noise);
            for (double& f : measured) f += gauss(engine);
        }
    }

    FitOptions options;
    options.residual_flag_hz = cfg.get_quantity_or("fit.residual_flag", 5e6);
    options.workers = run.workers;
    const FitResult fit = fit_vector_field(measured, options);

    const SpectrumPeaks model = forward_spectrum(fit.b_t, fit.orientation, {1e6}, {-0.1});
    out.columns = {"measured_index", "measured_hz", "axis_class", "branch", "model_hz"};
    for (const PeakAssignment& a : fit.assignment) {
        const double model_hz = model.centers_hz[std::size_t(2 * a.axis_class + a.branch)];
        out.rows.push_back({double(a.measured_index), measured[a.measured_index],
                            double(a.axis_class), double(a.branch), model_hz});
    }
    out.meta.emplace_back("field_t", fmt(fit.b_t));
    out.meta.emplace_back("field_gauss", fmt(fit.b_t * 1e4));
    out.meta.emplace_back("theta_nv_rad", fmt(fit.orientation.theta_nv_rad));
    out.meta.emplace_back("phi_k_rad", fmt(fit.orientation.phi_k_rad));
    out.meta.emplace_back("residual_hz", fmt(fit.residual_hz));
    out.meta.emplace_back("converged", fit.converged ? "true" : "false");
    if (synthetic) {
        out.meta.emplace_back("true_field_t", fmt(true_b));
        out.meta.emplace_back("field_error_gauss", fmt((fit.b_t - true_b) * 1e4));
        out.meta.emplace_back("orientation_error_rad",
                              fmt(orientation_error(fit.orientation, true_orientation)));
    }
    return out;
}

OutputTable experiment_rabi(RunConfig& cfg) {
    const double rabi = cfg.get_quantity("rabi.rabi");
    const double t_max = cfg.get_quantity_or("rabi.t_max", 1e-6);
    const std::size_t n = grid_count(cfg, "rabi.n_points", 201);
    const double pump = cfg.get_quantity_or("rabi.pump_efficiency", 1.0);
    const RelaxationParams relax = relax_from(cfg);

    const std::vector<double> t = uniform_grid(0.0, t_max, n);
    const std::vector<double> p = rabi_trace(t, rabi, relax, pump);
    OutputTable out;
    out.columns = {"t_s", "population"};
    for (std::size_t i = 0; i < n; ++i) out.rows.push_back({t[i], p[i]});
    out.meta.emplace_back("rabi_hz", fmt(rabi));
    return out;
}

OutputTable experiment_echo(RunConfig& cfg, const RunState& run) {
    const double tau_max = cfg.get_quantity_or("echo.tau_max", 3e-6);
    const std::size_t n = grid_count(cfg, "echo.n_points", 25);
    const int n_samples = int(cfg.get_int_or("echo.n_samples", 400));
    const double stretch = cfg.get_quantity_or("echo.stretch", 1.0);
    const RelaxationParams relax = relax_from(cfg);
    const double sigma =
        std::isfinite(relax.t2_star_s) ? detuning_sigma_from_t2_star(relax.t2_star_s) : 0.0;

    const std::vector<double> taus = uniform_grid(0.0, tau_max, n);
    OutputTable out;
    out.columns = {"tau_s", "amplitude"};
    for (double tau : taus)
        out.rows.push_back({tau, echo_amplitude(tau, relax, sigma, n_samples, run.seed, stretch)});
    out.meta.emplace_back("t2_s", fmt(relax.t2_s));
    out.meta.emplace_back("stretch", fmt(stretch));
    return out;
}

OutputTable experiment_t1(RunConfig& cfg, const RunState& run) {
    const double delay_max = cfg.get_quantity_or("t1.delay_max", 2.4e-3);
    const std::size_t n_delays = grid_count(cfg, "t1.n_points", 13);
    const double pump = cfg.get_quantity_or("t1.pump_efficiency", 1.0);
    const RelaxationParams relax = relax_from(cfg);
    if (!std::isfinite(relax.t1_s))
        throw ConfigError("the relaxation protocol needs a finite relax.t1", 0, "relax.t1");
    const TrapParams trap = trap_from(cfg);
    const SpinTorqueModel torque_base = torque_from(cfg);

    DetectionParams det;
    det.base_rate_hz = cfg.get_quantity_or("detect.base_rate", 1e11);
    det.slope_hz_per_rad = cfg.get_quantity_or("detect.slope", 2e11);
    det.bin_width_s = cfg.get_quantity_or("detect.bin", 1e-3);
    det.attenuation = cfg.get_quantity_or("detect.attenuation", 1e4);
    det.linear_range_rad = cfg.get_quantity_or("detect.linear_range", 0.5);
    det.validate();
    const double window_end = cfg.get_quantity_or("detect.window_end", 5e-3);
    const double baseline = det.base_rate_hz / det.attenuation;

    const std::vector<double> delays = uniform_grid(0.0, delay_max, n_delays);
    const std::size_t n_bins = std::size_t(std::floor(window_end / det.bin_width_s + 1e-9));
    const std::vector<double> t_grid = uniform_grid(0.0, window_end, 4 * n_bins + 1);

    std::vector<double> integrals(n_delays);
    for (std::size_t i = 0; i < n_delays; ++i) {
        const double p0 = t1_population_at_pulse(delays[i], relax, pump);
        SpinTorqueModel torque = torque_base;
        // population inversion relative to the thermal mixture drives the torque
        torque.n_spins = torque_base.n_spins * std::max(3.0 * p0 - 1.0, 0.0) / 2.0;
        const LibrationTrajectory traj = deterministic_evolve({0.0, 0.0}, trap, torque, t_grid);
        const PhotonTrace trace = sample_trace(traj, det, run.seed + i);
        integrals[i] = t1_signal_integral(trace, 0.0, window_end, baseline);
    }

    std::size_t n_used = 0;
    const double fitted_t1 = fit_exponential_decay(delays, integrals, n_used);

    OutputTable out;
    out.columns = {"delay_s", "f_integral"};
    for (std::size_t i = 0; i < n_delays; ++i) out.rows.push_back({delays[i], integrals[i]});
    out.meta.emplace_back("fitted_t1_s", fmt(fitted_t1));
    out.meta.emplace_back("configured_t1_s", fmt(relax.t1_s));
    out.meta.emplace_back("n_delays_used", fmt(double(n_used)));
    return out;
}

OutputTable experiment_pump_probe(RunConfig& cfg, const RunState& run) {
    const TrapParams trap = trap_from(cfg);
    const SpinTorqueModel torque = torque_from(cfg);
    FitResult fit;
    fit.b_t = torque.field_t;
    fit.orientation = CrystalOrientation{cfg.get_quantity("pump-probe.theta_nv"),
                                         cfg.get_quantity("pump-probe.phi_k")}
                          .canonical();
    fit.converged = true;

    RelaxationParams relax = RelaxationParams::none();
    relax.t1_s = cfg.get_quantity_or("pump-probe.t1", torque.t1_s);

    const double probe_width = cfg.get_quantity_or("pump-probe.probe_width", 5e6);
    const double f2_lo = cfg.get_quantity("pump-probe.f2_lo");
    const double f2_hi = cfg.get_quantity("pump-probe.f2_hi");
    const std::size_t n_f2 = grid_count(cfg, "pump-probe.n_f2", 361);
    const double t_max = cfg.get_quantity_or("pump-probe.t_max", 300e-6);
    const std::size_t n_t = grid_count(cfg, "pump-probe.n_t", 31);
    const int target_class = int(cfg.get_int_or("pump-probe.target_class", -1));
    const bool emit_map = cfg.get_bool_or("pump-probe.emit_map", false);
    if (!(f2_hi > f2_lo)) throw ConfigError("pump-probe needs f2_hi > f2_lo", 0, "pump-probe.f2_hi");

    const std::vector<double> t_d = uniform_grid(0.0, t_max, n_t);
    const std::vector<double> f2 = uniform_grid(f2_lo, f2_hi, n_f2);
    const PumpProbeResult res = pump_probe_simulate(fit, trap, torque, relax, t_d, f2,
                                                    probe_width, target_class, run.workers);

    OutputTable out;
    if (emit_map) {
        out.columns = {"t_d_s", "f2_hz", "contrast"};
        out.rows.reserve(n_t * n_f2);
        for (std::size_t i = 0; i < n_t; ++i)
            for (std::size_t j = 0; j < n_f2; ++j)
                out.rows.push_back({t_d[i], f2[j], res.at(i, j)});
    } else {
        out.columns = {"t_d_s", "peak_center_hz", "theta_rad", "amplitude"};
        for (std::size_t i = 0; i < n_t; ++i)
            out.rows.push_back({t_d[i], res.peak_center_hz[i], res.theta_track_rad[i],
                                res.peak_amplitude[i]});
    }
    out.meta.emplace_back("frequency_shift_hz",
                          fmt(std::fabs(res.peak_center_hz.back() - res.peak_center_hz.front())));
    out.meta.emplace_back("theta_final_rad", fmt(res.theta_track_rad.back()));
    return out;
}

OutputTable experiment_langevin(RunConfig& cfg, const RunState& run) {
    const TrapParams trap = trap_from(cfg);
    const SpinTorqueModel torque = torque_from(cfg);
    const double temperature = cfg.get_quantity_or("langevin.temperature", 300.0);
    const std::size_t n_traj = std::size_t(cfg.get_int_or("langevin.n_traj", 1000));
    const double t_end = cfg.get_quantity_or("langevin.t_end", 20e-3);
    const std::size_t n_times = grid_count(cfg, "langevin.n_times", 41);

    const std::vector<double> t = uniform_grid(0.0, t_end, n_times);
    const EnsembleMoments moments =
        langevin_ensemble({0.0, 0.0}, trap, torque, t, temperature, n_traj, run.seed, run.workers);

    OutputTable out;
    out.columns = {"t_s", "mean_theta_rad", "var_theta_rad2"};
    for (std::size_t i = 0; i < n_times; ++i)
        out.rows.push_back({moments.times_s[i], moments.mean_theta_rad[i],
                            moments.var_theta_rad2[i]});
    out.meta.emplace_back("n_traj", fmt(double(n_traj)));
    out.meta.emplace_back("temperature_k", fmt(temperature));
    return out;
}

OutputTable experiment_fokker_planck(RunConfig& cfg, const RunState& run) {
    const TrapParams trap = trap_from(cfg);
    const SpinTorqueModel torque = torque_from(cfg);
    const double temperature = cfg.get_quantity_or("fokker-planck.temperature", 300.0);
    const double t_end = cfg.get_quantity_or("fokker-planck.t_end", 6e-3);
    const std::size_t n_times = grid_count(cfg, "fokker-planck.n_times", 13);
    const std::size_t n_theta = grid_count(cfg, "fokker-planck.n_theta", 257);
    const std::size_t n_theta_dot = grid_count(cfg, "fokker-planck.n_theta_dot", 257);

    const PhaseSpaceGrid grid = auto_phase_space_grid({0.0, 0.0}, trap, torque, temperature,
                                                      t_end, n_theta, n_theta_dot);
    const double d_theta = grid.theta[1] - grid.theta[0];
    const double d_v = grid.theta_dot[1] - grid.theta_dot[0];
    const double sigma_theta = cfg.get_quantity_or("fokker-planck.init_sigma_theta", 3.0 * d_theta);
    const double sigma_v = cfg.get_quantity_or("fokker-planck.init_sigma_theta_dot", 3.0 * d_v);
    const PhaseSpacePdf pdf0 =
        gaussian_pdf(grid.theta, grid.theta_dot, 0.0, 0.0, sigma_theta, sigma_v);

    const std::vector<double> t = uniform_grid(0.0, t_end, n_times);
    const std::vector<PhaseSpacePdf> snaps =
        fokker_planck_evolve(pdf0, trap, torque, temperature, t, run.workers);

    OutputTable out;
    out.columns = {"t_s", "mean_theta_rad", "var_theta_rad2"};
    for (std::size_t i = 0; i < n_times; ++i)
        out.rows.push_back({t[i], first_moment(snaps[i]), theta_variance(snaps[i])});
    out.meta.emplace_back("theta_span_rad", fmt(grid.theta.back() - grid.theta.front()));
    out.meta.emplace_back("theta_dot_span_rad_s", fmt(grid.theta_dot.back() - grid.theta_dot.front()));
    out.meta.emplace_back("temperature_k", fmt(temperature));
    return out;
}

OutputTable experiment_sensitivity(RunConfig& cfg) {
    SensitivityInputs in;
    in.delta_x_counts = cfg.get_quantity_or("sensitivity.delta_x", in.delta_x_counts);
    in.x0_counts = cfg.get_quantity_or("sensitivity.x0", in.x0_counts);
    in.contrast = cfg.get_quantity_or("sensitivity.contrast", in.contrast);
    in.ramsey_time_s = cfg.get_quantity_or("sensitivity.ramsey_time", in.ramsey_time_s);
    in.dead_time_s = cfg.get_quantity_or("sensitivity.dead_time", in.dead_time_s);
    in.rotation_time_s = cfg.get_quantity_or("sensitivity.rotation_time", in.rotation_time_s);
    in.n_spins = cfg.get_quantity_or("sensitivity.n_spins", in.n_spins);
    in.field_t = cfg.get_quantity_or("sensitivity.field", in.field_t);
    in.inertia_kg_m2 = cfg.get_quantity_or("sensitivity.inertia", in.inertia_kg_m2);
    in.omega0_rad_s = cfg.get_quantity_or("sensitivity.omega0", in.omega0_rad_s);
    in.gas_temp_k = cfg.get_quantity_or("sensitivity.gas_temp", in.gas_temp_k);
    in.gamma_g_per_s = cfg.get_quantity_or("sensitivity.gamma_g", in.gamma_g_per_s);
    in.theta_span_rad = cfg.get_quantity_or("sensitivity.theta_span", in.theta_span_rad);
    in.conversion_time_s = cfg.get_quantity_or("sensitivity.conversion_time", in.conversion_time_s);
    in.attenuation = cfg.get_quantity_or("sensitivity.attenuation", in.attenuation);
    in.t2_star_s = cfg.get_quantity_or("sensitivity.t2_star", in.t2_star_s);
    in.t2_star_dead_time_s =
        cfg.get_quantity_or("sensitivity.t2_star_dead_time", in.t2_star_dead_time_s);
    in.measurement_time_s =
        cfg.get_quantity_or("sensitivity.measurement_time", in.measurement_time_s);
    in.gamma_e_hz_per_t = cfg.get_quantity_or("sensitivity.gamma_e", in.gamma_e_hz_per_t);

    const std::vector<NoiseBudgetRow> rows = sensitivity_table(in);
    OutputTable out;
    out.label_column = "quantity";
    out.columns = {"value"};
    for (const NoiseBudgetRow& r : rows) {
        out.row_labels.push_back(r.label);
        out.rows.push_back({r.value});
        out.meta.emplace_back("unit_" + r.label, r.unit);
    }
    return out;
}

OutputTable experiment_dicke(RunConfig& cfg) {
    const std::int64_t n = cfg.get_int("dicke.n_spins");
    if (n < 1) throw ConfigError("dicke.n_spins must be at least 1", 0, "dicke.n_spins");
    const DickeWeights weights = dicke_weights(std::size_t(n));
    const GhzWeight ghz = ghz_component_weight(std::size_t(n));

    OutputTable out;
    const std::size_t emit_cap = 10000;
    if (std::size_t(n) <= emit_cap) {
        out.columns = {"k", "log_weight", "weight_sq"};
        for (std::size_t k = 0; k < weights.log_weights.size(); ++k)
            out.rows.push_back({double(k), weights.log_weights[k],
                                std::exp(2.0 * weights.log_weights[k])});
    } else {
        out.columns = {"k", "log_weight"};
    }
    double total = 0.0;
    for (double lw : weights.log_weights) total += std::exp(2.0 * lw);
    out.meta.emplace_back("n_spins", fmt(double(n)));
    out.meta.emplace_back("normalization", fmt(total));
    out.meta.emplace_back("ghz_log2_weight", fmt(ghz.log2_weight));
    out.meta.emplace_back("ghz_probability", fmt(ghz.probability));
    if (cfg.has("dicke.theta_per_spin")) {
        const double theta = cfg.get_quantity("dicke.theta_per_spin");
        const OrientationDistribution dist = orientation_distribution(std::size_t(n), theta);
        out.meta.emplace_back("mean_rad", fmt(dist.mean_rad));
        out.meta.emplace_back("sigma_rad", fmt(dist.sigma_rad));
    }
    return out;
}

} // namespace

std::vector<std::string> experiment_names() {
    return {"spectrum", "fit",      "rabi",          "echo",        "t1",
            "pump-probe", "langevin", "fokker-planck", "sensitivity", "dicke"};
}

OutputTable run_experiment(const std::string& name, RunConfig& cfg) {
    const RunState run = run_state(cfg);
    OutputTable out;
    if (name == "spectrum") {
        out = experiment_spectrum(cfg);
    } else if (name == "fit") {
        out = experiment_fit(cfg, run);
    } else if (name == "rabi") {
        out = experiment_rabi(cfg);
    } else if (name == "echo") {
        out = experiment_echo(cfg, run);
    } else if (name == "t1") {
        out = experiment_t1(cfg, run);
    } else if (name == "pump-probe") {
        out = experiment_pump_probe(cfg, run);
    } else if (name == "langevin") {
        out = experiment_langevin(cfg, run);
    } else if (name == "fokker-planck") {
        out = experiment_fokker_planck(cfg, run);
    } else if (name == "sensitivity") {
        out = experiment_sensitivity(cfg);
    } else if (name == "dicke") {
        out = experiment_dicke(cfg);
    } else {
        std::string known;
        for (const std::string& e : experiment_names()) {
            if (!known.empty()) known += ", ";
            known += e;
        }
        throw ConfigError("unknown experiment '" + name + "' (known: " + known + ")");
    }
    cfg.require_consumed();
    return out;
}

std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void write_csv(std::ostream& os, const OutputTable& table, const RunConfig& cfg) {
    os << "# smc " << version_string << "\n";
    for (const auto& [k, v] : cfg.entries()) os << "# " << k << " = " << v << "\n";
    for (const auto& [k, v] : table.meta) os << "# meta " << k << " = " << v << "\n";
    const bool labeled = !table.label_column.empty();
    if (labeled) {
        os << table.label_column;
        if (!table.columns.empty()) os << ",";
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) os << ",";
        os << table.columns[c];
    }
    os << "\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (labeled) {
            os << table.row_labels[r];
            if (!table.rows[r].empty()) os << ",";
        }
        for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
            if (c) os << ",";
            os << format_double(table.rows[r][c]);
        }
        os << "\n";
    }
}

void write_json(std::ostream& os, const OutputTable& table, const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["version"] = version_string;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [k, v] : cfg.entries()) config[k] = v;
    j["config"] = std::move(config);
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : table.meta) meta[k] = v;
    j["meta"] = std::move(meta);
    nlohmann::ordered_json columns = nlohmann::ordered_json::array();
    if (!table.label_column.empty()) columns.push_back(table.label_column);
    for (const std::string& c : table.columns) columns.push_back(c);
    j["columns"] = std::move(columns);
    nlohmann::ordered_json data = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        nlohmann::ordered_json row = nlohmann::ordered_json::array();
        if (!table.label_column.empty()) row.push_back(table.row_labels[r]);
        for (double v : table.rows[r]) row.push_back(v);
        data.push_back(std::move(row));
    }
    j["data"] = std::move(data);
    os << j.dump(2) << "\n";
}

} // namespace smc
