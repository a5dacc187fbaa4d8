#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "smc/constants.hpp"
#include "smc/errors.hpp"
#include "smc/libration.hpp"
#include "smc/parallel.hpp"

namespace smc {

namespace {

double grid_step(const std::vector<double>& g, const char* what) {
    if (g.size() < 2) throw InvalidInput(std::string(what) + " grid needs at least 2 points");
    const double d = g[1] - g[0];
    if (!(d > 0.0) || !std::isfinite(d)) {
        throw InvalidInput(std::string(what) + " grid must increase strictly");
    }
    for (std::size_t k = 1; k < g.size(); ++k) {
        const double dk = g[k] - g[k - 1];
        if (std::abs(dk - d) > 1e-9 * d) {
            throw InvalidInput(std::string(what) + " grid must be uniform");
        }
    }
    return d;
}

// trapezoidal weight along one axis
double axis_weight(std::size_t k, std::size_t n, double d) {
    return (k == 0 || k + 1 == n) ? 0.5 * d : d;
}

double pdf_mass(const PhaseSpacePdf& pdf, double dth, double dv) {
    const std::size_t nt = pdf.n_theta();
    const std::size_t nv = pdf.n_theta_dot();
    double m = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        const double wi = axis_weight(i, nt, dth);
        double row = 0.0;
        for (std::size_t j = 0; j < nv; ++j) row += axis_weight(j, nv, dv) * pdf.at(i, j);
        m += wi * row;
    }
    return m;
}

// van Leer limited slope (harmonic form); zero at extrema
double limited_slope(double dm, double dp) {
    const double prod = dm * dp;
    if (!(prod > 0.0)) return 0.0;
    return 2.0 * prod / (dm + dp);
}

// exponentially fitted interface weighting for drift + diffusion in theta_dot:
// face value = (1-kappa) * lower + kappa * upper, exact for the local
// stationary exp(a v / D) profile
double cc_kappa(double w) {
    if (std::abs(w) < 1e-4) return 0.5 - w / 12.0;
    if (w > 700.0) return 1.0 / w;
    if (w < -700.0) return 1.0 + 1.0 / w;
    return 1.0 / w - 1.0 / std::expm1(w);
}

struct StepContext {
    const TrapParams* trap = nullptr;
    const SpinTorqueModel* torque = nullptr;
    std::size_t nt = 0, nv = 0;
    double dth = 0.0, dv = 0.0;
    double diffusion = 0.0; // gamma_g kB T / I
    const double* theta = nullptr;
    const double* vel = nullptr;
};

// one Euler stage: out = base + h * L(src, t) over rows [r0, r1)
void stage_rows(const StepContext& c, const double* src, const double* base, double* out,
                double t, double h, std::size_t r0, std::size_t r1) {
    const double gamma = c.trap->gamma_g_per_s;
    const double w2 = c.trap->omega_sq_at(t);
    const double inv_dth = 1.0 / c.dth;
    const double inv_dv = 1.0 / c.dv;
    const std::size_t nv = c.nv;

    // torque prefactor at this stage time (decay included), per unit inertia
    double torque_pref = 0.0;
    if (c.torque->n_spins > 0.0 && c.torque->field_t > 0.0 && t >= c.torque->onset_time_s) {
        torque_pref = c.torque->amplitude_n_m() *
                      std::exp(-(t - c.torque->onset_time_s) / c.torque->t1_s) /
                      c.trap->inertia_kg_m2;
    }

    std::vector<double> flo(nv), fhi(nv);
    auto theta_face = [&](std::size_t i_up, double* f) {
        // flux through the face between rows i_up and i_up+1; caller ensures bounds
        const double* pl = src + i_up * nv;
        const double* pu = src + (i_up + 1) * nv;
        for (std::size_t j = 0; j < nv; ++j) {
            const double vj = c.vel[j];
            double q;
            if (vj > 0.0) {
                const double dm = i_up > 0 ? pl[j] - src[(i_up - 1) * nv + j] : 0.0;
                q = pl[j] + 0.5 * limited_slope(dm, pu[j] - pl[j]);
            } else if (vj < 0.0) {
                const double dp = i_up + 2 < c.nt ? src[(i_up + 2) * nv + j] - pu[j] : 0.0;
                q = pu[j] - 0.5 * limited_slope(pu[j] - pl[j], dp);
            } else {
                q = 0.0;
            }
            f[j] = vj * q;
        }
    };

    if (r0 > 0) theta_face(r0 - 1, flo.data());
    else std::fill(flo.begin(), flo.end(), 0.0);

    for (std::size_t i = r0; i < r1; ++i) {
        if (i + 1 < c.nt) theta_face(i, fhi.data());
        else std::fill(fhi.begin(), fhi.end(), 0.0);

        const double alpha = -w2 * c.theta[i] + torque_pref * std::sin(c.torque->phi_rad - c.theta[i]);
        const double* p = src + i * nv;
        double* o = out + i * nv;
        const double* b = base + i * nv;

        double gprev = 0.0;
        for (std::size_t j = 0; j < nv; ++j) {
            double gnext = 0.0;
            if (j + 1 < nv) {
                const double a = alpha - gamma * (c.vel[j] + 0.5 * c.dv);
                if (c.diffusion > 0.0) {
                    const double kap = cc_kappa(a * c.dv / c.diffusion);
                    gnext = a * ((1.0 - kap) * p[j] + kap * p[j + 1]) -
                            c.diffusion * (p[j + 1] - p[j]) * inv_dv;
                } else {
                    gnext = a * (a > 0.0 ? p[j] : p[j + 1]);
                }
            }
            const double div = (fhi[j] - flo[j]) * inv_dth + (gnext - gprev) * inv_dv;
            o[j] = b[j] - h * div;
            gprev = gnext;
        }
        std::swap(flo, fhi);
    }
}

// clip tiny negatives in rows [r0, r1); flag anything worse
void clip_rows(double* p, std::size_t r0, std::size_t r1, std::size_t nv,
               std::atomic<int>& fail) {
    for (std::size_t k = r0 * nv; k < r1 * nv; ++k) {
        const double x = p[k];
        if (!std::isfinite(x)) {
            fail.store(2, std::memory_order_relaxed);
            return;
        }
        if (x < 0.0) {
            if (x < -1e-12) fail.store(1, std::memory_order_relaxed);
            p[k] = 0.0;
        }
    }
}

// advance the density over [t0, t0+span] with n equal SSP-RK2 steps,
// persistent worker threads synchronized by a barrier
void advance_piece(const StepContext& c, std::vector<double>& cur_v, double t0, double span,
                   std::size_t n_steps, std::size_t nthreads, std::atomic<int>& fail) {
    const double h = span / static_cast<double>(n_steps);
    std::vector<double> mid_v(cur_v.size()), nxt_v(cur_v.size());
    double* cur = cur_v.data();
    double* mid = mid_v.data();
    double* nxt = nxt_v.data();

    std::size_t step = 0;
    double t = t0;
    std::atomic<bool> stop{false};

    // completion runs once per finished stage; after the second stage of a
    // step it rotates the buffers and advances time
    int phase = 0;
    std::barrier sync(static_cast<std::ptrdiff_t>(nthreads), [&]() noexcept {
        if (phase == 0) {
            phase = 1;
        } else {
            phase = 0;
            std::swap(cur, nxt);
            ++step;
            t = t0 + static_cast<double>(step) * h;
            if (fail.load(std::memory_order_relaxed) != 0) stop.store(true);
        }
    });

    auto worker = [&](std::size_t r0, std::size_t r1) {
        while (true) {
            if (step >= n_steps || stop.load()) break;
            stage_rows(c, cur, cur, mid, t, h, r0, r1);
            clip_rows(mid, r0, r1, c.nv, fail);
            sync.arrive_and_wait();
            // nxt = 1/2 cur + 1/2 (mid + h L(mid, t+h))
            stage_rows(c, mid, mid, nxt, t + h, h, r0, r1);
            for (std::size_t k = r0 * c.nv; k < r1 * c.nv; ++k) {
                nxt[k] = 0.5 * cur[k] + 0.5 * nxt[k];
            }
            clip_rows(nxt, r0, r1, c.nv, fail);
            sync.arrive_and_wait();
        }
    };

    if (nthreads == 1) {
        worker(0, c.nt);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t w = 0; w < nthreads; ++w) {
            // even split, never an empty range (nthreads <= row count)
            const std::size_t r0 = w * c.nt / nthreads;
            const std::size_t r1 = (w + 1) * c.nt / nthreads;
            pool.emplace_back(worker, r0, r1);
        }
        for (auto& th : pool) th.join();
    }

    // cur/nxt alternate between the two vectors; land the result in cur_v
    if (cur == nxt_v.data()) cur_v.swap(nxt_v);
}

} // namespace

void PhaseSpacePdf::validate() const {
    const double dth = grid_step(theta_grid, "theta");
    const double dv = grid_step(theta_dot_grid, "theta_dot");
    if (values.size() != theta_grid.size() * theta_dot_grid.size()) {
        throw InvalidInput("pdf value count does not match the grid");
    }
    for (double x : values) {
        if (!std::isfinite(x) || x < 0.0) throw InvalidInput("pdf values must be non-negative");
    }
    const double m = pdf_mass(*this, dth, dv);
    if (std::abs(m - 1.0) > 1e-6) {
        throw InvalidInput("pdf is not normalized (trapezoidal mass " + std::to_string(m) + ")");
    }
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
    if (n < 2) throw InvalidInput("grid needs at least 2 points");
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw InvalidInput("grid bounds must be finite with hi > lo");
    }
    std::vector<double> g(n);
    const double d = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) g[k] = lo + static_cast<double>(k) * d;
    return g;
}

PhaseSpacePdf gaussian_pdf(const std::vector<double>& theta_grid,
                           const std::vector<double>& theta_dot_grid,
                           double mean_theta_rad, double mean_theta_dot_rad_s,
                           double sigma_theta_rad, double sigma_theta_dot_rad_s) {
    const double dth = grid_step(theta_grid, "theta");
    const double dv = grid_step(theta_dot_grid, "theta_dot");
    if (!(sigma_theta_rad > 0.0) || !(sigma_theta_dot_rad_s > 0.0)) {
        throw InvalidInput("gaussian widths must be positive");
    }
    PhaseSpacePdf pdf;
    pdf.theta_grid = theta_grid;
    pdf.theta_dot_grid = theta_dot_grid;
    pdf.values.resize(theta_grid.size() * theta_dot_grid.size());
    for (std::size_t i = 0; i < theta_grid.size(); ++i) {
        const double x = (theta_grid[i] - mean_theta_rad) / sigma_theta_rad;
        for (std::size_t j = 0; j < theta_dot_grid.size(); ++j) {
            const double y = (theta_dot_grid[j] - mean_theta_dot_rad_s) / sigma_theta_dot_rad_s;
            pdf.at(i, j) = std::exp(-0.5 * (x * x + y * y));
        }
    }
    const double m = pdf_mass(pdf, dth, dv);
    if (!(m > 0.0)) throw InvalidInput("gaussian has no support on the grid");
    for (double& x : pdf.values) x /= m;
    return pdf;
}

PhaseSpacePdf boltzmann_pdf(const std::vector<double>& theta_grid,
                            const std::vector<double>& theta_dot_grid,
                            const TrapParams& trap, double temperature_k) {
    trap.validate();
    if (!(temperature_k > 0.0)) throw InvalidInput("temperature must be positive");
    if (!(trap.omega_rad_s > 0.0)) throw InvalidInput("thermal state needs a confining trap");
    const double kt = k_boltzmann * temperature_k;
    const double sigma_v = std::sqrt(kt / trap.inertia_kg_m2);
    const double sigma_th = sigma_v / trap.omega_rad_s;
    return gaussian_pdf(theta_grid, theta_dot_grid, 0.0, 0.0, sigma_th, sigma_v);
}

PhaseSpaceGrid auto_phase_space_grid(const LibrationState& state0,
                                     const TrapParams& trap,
                                     const SpinTorqueModel& torque,
                                     double temperature_k,
                                     double t_end_s,
                                     std::size_t n_theta,
                                     std::size_t n_theta_dot) {
    trap.validate();
    torque.validate();
    if (!(t_end_s > 0.0)) throw InvalidInput("t_end must be positive");
    if (!(temperature_k >= 0.0)) throw InvalidInput("temperature must be >= 0");
    if (n_theta < 8 || n_theta_dot < 8) throw InvalidInput("grid too coarse");

    const auto track = deterministic_evolve(state0, trap, torque, uniform_grid(0.0, t_end_s, 513));
    const auto [th_lo, th_hi] =
        std::minmax_element(track.theta_rad.begin(), track.theta_rad.end());
    const auto [v_lo, v_hi] =
        std::minmax_element(track.theta_dot_rad_s.begin(), track.theta_dot_rad_s.end());

    const double kt = k_boltzmann * temperature_k;
    const double sigma_v = temperature_k > 0.0 ? std::sqrt(kt / trap.inertia_kg_m2) : 0.0;
    const double sigma_th =
        trap.omega_rad_s > 0.0 ? sigma_v / trap.omega_rad_s : 0.0;

    const double span_th = *th_hi - *th_lo;
    const double span_v = *v_hi - *v_lo;
    const double pad_th = 6.0 * sigma_th + 0.05 * span_th;
    const double pad_v = 6.0 * sigma_v + 0.05 * span_v;
    if (!(pad_th > 0.0) || !(pad_v > 0.0)) {
        throw InvalidInput("cannot size a grid: no thermal width and no motion");
    }
    PhaseSpaceGrid g;
    g.theta = uniform_grid(*th_lo - pad_th, *th_hi + pad_th, n_theta);
    g.theta_dot = uniform_grid(*v_lo - pad_v, *v_hi + pad_v, n_theta_dot);
    return g;
}

double first_moment(const PhaseSpacePdf& pdf) {
    const double dth = grid_step(pdf.theta_grid, "theta");
    const double dv = grid_step(pdf.theta_dot_grid, "theta_dot");
    const std::size_t nt = pdf.n_theta();
    const std::size_t nv = pdf.n_theta_dot();
    double m = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        const double wi = axis_weight(i, nt, dth);
        double row = 0.0;
        for (std::size_t j = 0; j < nv; ++j) row += axis_weight(j, nv, dv) * pdf.at(i, j);
        m += wi * row;
        acc += wi * row * pdf.theta_grid[i];
    }
    if (!(m > 0.0)) throw InvalidInput("pdf has zero mass");
    return acc / m;
}

double theta_variance(const PhaseSpacePdf& pdf) {
    const double mean = first_moment(pdf);
    const double dth = grid_step(pdf.theta_grid, "theta");
    const double dv = grid_step(pdf.theta_dot_grid, "theta_dot");
    const std::size_t nt = pdf.n_theta();
    const std::size_t nv = pdf.n_theta_dot();
    double m = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        const double wi = axis_weight(i, nt, dth);
        double row = 0.0;
        for (std::size_t j = 0; j < nv; ++j) row += axis_weight(j, nv, dv) * pdf.at(i, j);
        const double d = pdf.theta_grid[i] - mean;
        m += wi * row;
        acc += wi * row * d * d;
    }
    return acc / m;
}

std::vector<PhaseSpacePdf> fokker_planck_evolve(const PhaseSpacePdf& pdf0,
                                                const TrapParams& trap,
                                                const SpinTorqueModel& torque,
                                                double temperature_k,
                                                const std::vector<double>& t_grid,
                                                int workers) {
    trap.validate();
    torque.validate();
    pdf0.validate();
    if (!(temperature_k >= 0.0) || !std::isfinite(temperature_k)) {
        throw InvalidInput("temperature must be >= 0");
    }
    if (t_grid.empty() || t_grid.front() != 0.0) {
        throw InvalidInput("time grid must start at 0");
    }
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > t_grid[k - 1])) throw InvalidInput("time grid must increase strictly");
    }

    const double dth = grid_step(pdf0.theta_grid, "theta");
    const double dv = grid_step(pdf0.theta_dot_grid, "theta_dot");
    const double kt = k_boltzmann * temperature_k;
    const double diffusion = trap.gamma_g_per_s * kt / trap.inertia_kg_m2;

    if (diffusion > 0.0) {
        const double sigma_v = std::sqrt(kt / trap.inertia_kg_m2);
        if (pdf0.theta_dot_grid.back() - pdf0.theta_dot_grid.front() < 6.0 * sigma_v) {
            throw InvalidInput("theta_dot grid narrower than 6 thermal sigma");
        }
        if (trap.omega_rad_s > 0.0) {
            const double sigma_th = sigma_v / trap.omega_rad_s;
            if (pdf0.theta_grid.back() - pdf0.theta_grid.front() < 6.0 * sigma_th) {
                throw InvalidInput("theta grid narrower than 6 thermal sigma");
            }
        }
    }

    StepContext ctx;
    ctx.trap = &trap;
    ctx.torque = &torque;
    ctx.nt = pdf0.n_theta();
    ctx.nv = pdf0.n_theta_dot();
    ctx.dth = dth;
    ctx.dv = dv;
    ctx.diffusion = diffusion;
    ctx.theta = pdf0.theta_grid.data();
    ctx.vel = pdf0.theta_dot_grid.data();
    if (ctx.nt < 4 || ctx.nv < 4) throw InvalidInput("grid too coarse for the stencil");

    const std::size_t nthreads =
        std::min<std::size_t>(resolve_workers(workers), ctx.nt);

    // conservative step bound, fixed per output interval
    const double v_adv =
        std::max(std::abs(ctx.vel[0]), std::abs(ctx.vel[ctx.nv - 1]));
    const double th_max =
        std::max(std::abs(ctx.theta[0]), std::abs(ctx.theta[ctx.nt - 1]));
    const double depth = trap.drive ? std::abs(trap.drive->depth) : 0.0;
    const double a_bound = trap.gamma_g_per_s * (v_adv + 0.5 * dv) +
                           trap.omega_rad_s * trap.omega_rad_s * (1.0 + depth) * th_max +
                           torque.amplitude_n_m() / trap.inertia_kg_m2;
    const double inv_dt = v_adv / dth + a_bound / dv + 2.0 * diffusion / (dv * dv);

    std::vector<double> state = pdf0.values;
    std::atomic<int> fail{0};

    auto emit = [&](std::vector<PhaseSpacePdf>& sink) {
        PhaseSpacePdf snap;
        snap.theta_grid = pdf0.theta_grid;
        snap.theta_dot_grid = pdf0.theta_dot_grid;
        snap.values = state;
        const double m = pdf_mass(snap, dth, dv);
        if (std::abs(m - 1.0) > 1e-4) {
            throw NumericsError("probability mass drifted beyond 1e-4");
        }
        // pile-up against the domain edge means the grid was too small
        double ring = 0.0;
        for (std::size_t j = 0; j < ctx.nv; ++j) {
            ring += axis_weight(j, ctx.nv, dv) *
                    (0.5 * dth * (snap.at(0, j) + snap.at(ctx.nt - 1, j)));
        }
        for (std::size_t i = 1; i + 1 < ctx.nt; ++i) {
            ring += axis_weight(i, ctx.nt, dth) * 0.5 * dv *
                    (snap.at(i, 0) + snap.at(i, ctx.nv - 1));
        }
        if (ring > 1e-3) {
            throw NumericsError("probability mass leaked to the grid boundary");
        }
        for (double& x : snap.values) x /= m;
        sink.push_back(std::move(snap));
    };

    std::vector<PhaseSpacePdf> out;
    out.reserve(t_grid.size());
    emit(out); // t = 0

    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        double t0 = t_grid[k - 1];
        const double t1 = t_grid[k];
        // split at the torque switch-on so no step straddles it
        std::vector<std::pair<double, double>> pieces;
        if (torque.n_spins > 0.0 && torque.field_t > 0.0 && torque.onset_time_s > t0 &&
            torque.onset_time_s < t1) {
            pieces.emplace_back(t0, torque.onset_time_s);
            pieces.emplace_back(torque.onset_time_s, t1);
        } else {
            pieces.emplace_back(t0, t1);
        }
        for (auto [a, b] : pieces) {
            const double span = b - a;
            if (inv_dt <= 0.0) continue; // no dynamics at all
            const double dt = 0.4 / inv_dt;
            if (!(dt > 0.0) || !std::isfinite(dt)) {
                throw NumericsError("cannot satisfy the CFL bound on this grid");
            }
            const auto n_steps = static_cast<std::size_t>(std::ceil(span / dt));
            if (n_steps > 200'000'000) {
                throw NumericsError("CFL bound demands an absurd step count");
            }
            advance_piece(ctx, state, a, span, std::max<std::size_t>(n_steps, 1), nthreads, fail);
            const int f = fail.load();
            if (f == 1) throw NumericsError("density went negative beyond tolerance");
            if (f == 2) throw NumericsError("density diverged");
        }
        emit(out);
    }
    return out;
}

} // namespace smc
