#include "smc/mdmr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>

#include "smc/constants.hpp"
#include "smc/errors.hpp"
#include "smc/parallel.hpp"

namespace smc {

namespace {

constexpr double two_pi = 2.0 * pi;

double wrap_angle(double a) {
    double w = std::fmod(a, two_pi);
    if (w < 0.0) w += two_pi;
    // fmod can land exactly on two_pi after the correction
    if (w >= two_pi) w = 0.0;
    return w;
}

// a defect axis is an unsigned crystal direction; work with the sign that
// faces the field so the minus branch is always the red-shifted line
Vec3 facing_field(const Vec3& axis) {
    return axis.z() < 0.0 ? Vec3(-axis) : axis;
}

// 8 transition frequencies for one trial geometry; false when the eigensolver
// cannot label states (pathological inputs only)
bool model_lines(double b_t, double theta, double phi, std::array<double, 8>& out) {
    std::array<Vec3, 4> axes;
    try {
        axes = nv_axes(CrystalOrientation{theta, phi});
    } catch (const Error&) {
        return false;
    }
    const FieldVector field(0.0, 0.0, b_t);
    for (int k = 0; k < 4; ++k) {
        try {
            const auto tf = transition_frequencies(
                build_hamiltonian(field, NvAxis::from_direction(facing_field(axes[std::size_t(k)]))));
            out[std::size_t(2 * k)] = tf.f_minus_hz;
            out[std::size_t(2 * k + 1)] = tf.f_plus_hz;
        } catch (const Error&) {
            return false;
        }
    }
    return true;
}

// order-preserving assignment of sorted measured onto sorted model lines,
// sum of squared errors. dp over (measured matched, model lines considered).
double monotone_ssq(const double* meas, std::size_t m, const double* model, std::size_t n) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::array<double, 9> dp{};
    std::array<double, 9> next{};
    for (std::size_t j = 0; j <= n; ++j) dp[j] = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        next[0] = inf;
        for (std::size_t j = 1; j <= n; ++j) {
            const double d = meas[i - 1] - model[j - 1];
            const double matched = dp[j - 1] + d * d;
            const double skipped = next[j - 1];
            next[j] = matched < skipped ? matched : skipped;
        }
        dp = next;
    }
    return dp[n];
}

struct TrialCost {
    const std::vector<double>* meas_sorted;
    double b_ref;

    double operator()(const std::array<double, 3>& x) const {
        if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2]))
            return 1e300;
        std::array<double, 8> model;
        if (!model_lines(std::fabs(x[0]) * b_ref, x[1], x[2], model)) return 1e300;
        std::sort(model.begin(), model.end());
        return monotone_ssq(meas_sorted->data(), meas_sorted->size(), model.data(), 8);
    }
};

// classic reflect/expand/contract/shrink simplex in 3 parameters
template <typename F>
void nelder_mead(const F& cost, std::array<double, 3>& x, double& fx,
                 const std::array<double, 3>& step, std::size_t max_iter, double rel_tol) {
    std::array<std::array<double, 3>, 4> v;
    std::array<double, 4> f;
    v[0] = x;
    f[0] = cost(v[0]);
    for (int d = 0; d < 3; ++d) {
        v[std::size_t(d + 1)] = x;
        v[std::size_t(d + 1)][std::size_t(d)] += step[std::size_t(d)];
        f[std::size_t(d + 1)] = cost(v[std::size_t(d + 1)]);
    }
    std::array<int, 4> ord{0, 1, 2, 3};
    auto sort_ord = [&] {
        std::sort(ord.begin(), ord.end(), [&](int a, int b) { return f[std::size_t(a)] < f[std::size_t(b)]; });
    };
    for (std::size_t it = 0; it < max_iter; ++it) {
        sort_ord();
        const int ib = ord[0], iw = ord[3], is = ord[2];
        if (f[std::size_t(iw)] - f[std::size_t(ib)] <=
                rel_tol * (std::fabs(f[std::size_t(ib)]) + 1e-30) ||
            f[std::size_t(iw)] < 1e-6)
            break;
        std::array<double, 3> c{};
        for (int k = 0; k < 4; ++k) {
            if (k == iw) continue;
            for (int d = 0; d < 3; ++d) c[std::size_t(d)] += v[std::size_t(k)][std::size_t(d)] / 3.0;
        }
        auto blend = [&](double t) {
            std::array<double, 3> p;
            for (int d = 0; d < 3; ++d)
                p[std::size_t(d)] = c[std::size_t(d)] + t * (c[std::size_t(d)] - v[std::size_t(iw)][std::size_t(d)]);
            return p;
        };
        const auto xr = blend(1.0);
        const double fr = cost(xr);
        if (fr < f[std::size_t(ib)]) {
            const auto xe = blend(2.0);
            const double fe = cost(xe);
            if (fe < fr) { v[std::size_t(iw)] = xe; f[std::size_t(iw)] = fe; }
            else         { v[std::size_t(iw)] = xr; f[std::size_t(iw)] = fr; }
            continue;
        }
        if (fr < f[std::size_t(is)]) { v[std::size_t(iw)] = xr; f[std::size_t(iw)] = fr; continue; }
        if (fr < f[std::size_t(iw)]) {
            const auto xc = blend(0.5);
            const double fc = cost(xc);
            if (fc <= fr) { v[std::size_t(iw)] = xc; f[std::size_t(iw)] = fc; continue; }
        } else {
            const auto xc = blend(-0.5);
            const double fc = cost(xc);
            if (fc < f[std::size_t(iw)]) { v[std::size_t(iw)] = xc; f[std::size_t(iw)] = fc; continue; }
        }
        for (int k = 0; k < 4; ++k) {
            if (k == ib) continue;
            for (int d = 0; d < 3; ++d)
                v[std::size_t(k)][std::size_t(d)] =
                    v[std::size_t(ib)][std::size_t(d)] +
                    0.5 * (v[std::size_t(k)][std::size_t(d)] - v[std::size_t(ib)][std::size_t(d)]);
            f[std::size_t(k)] = cost(v[std::size_t(k)]);
        }
    }
    sort_ord();
    x = v[std::size_t(ord[0])];
    fx = f[std::size_t(ord[0])];
}

struct SortedLine {
    double f_hz;
    int axis_class;
    int branch;
};

// DP with backpointers; meas holds (frequency, original index) sorted by frequency
std::vector<PeakAssignment> monotone_assignment(const std::vector<std::pair<double, std::size_t>>& meas,
                                                const std::vector<SortedLine>& lines,
                                                double& ssq_out) {
    const std::size_t m = meas.size(), n = lines.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp((m + 1) * (n + 1), inf);
    std::vector<unsigned char> took((m + 1) * (n + 1), 0);
    auto at = [n](std::size_t i, std::size_t j) { return i * (n + 1) + j; };
    for (std::size_t j = 0; j <= n; ++j) dp[at(0, j)] = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = i; j <= n; ++j) {
            const double d = meas[i - 1].first - lines[j - 1].f_hz;
            const double matched = dp[at(i - 1, j - 1)] + d * d;
            const double skipped = dp[at(i, j - 1)];
            if (matched < skipped) {
                dp[at(i, j)] = matched;
                took[at(i, j)] = 1;
            } else {
                dp[at(i, j)] = skipped;
            }
        }
    }
    ssq_out = dp[at(m, n)];
    std::vector<PeakAssignment> out;
    out.reserve(m);
    std::size_t i = m, j = n;
    while (i > 0) {
        if (took[at(i, j)]) {
            out.push_back({meas[i - 1].second, lines[j - 1].axis_class, lines[j - 1].branch});
            --i;
            --j;
        } else {
            --j;
        }
    }
    std::sort(out.begin(), out.end(),
              [](const PeakAssignment& a, const PeakAssignment& b) { return a.measured_index < b.measured_index; });
    return out;
}

double f_minus_of_axis(double b_t, const Vec3& axis) {
    const auto tf = transition_frequencies(
        build_hamiltonian(FieldVector(0.0, 0.0, b_t), NvAxis::from_direction(facing_field(axis))));
    return tf.f_minus_hz;
}

AngleFrequencyCalibration build_calibration(const FitResult& fit, int target_class,
                                            double angle_lo_rad, double angle_hi_rad,
                                            std::size_t n_points) {
    if (!(fit.b_t > 0.0) || !std::isfinite(fit.b_t))
        throw InvalidInput("calibration requires a positive field magnitude");
    if (!(angle_hi_rad > angle_lo_rad) || !std::isfinite(angle_hi_rad) || !std::isfinite(angle_lo_rad))
        throw InvalidInput("calibration angle range must be a finite nonempty interval");
    if (n_points < 4) throw InvalidInput("calibration needs at least 4 table points");

    const auto axes = nv_axes(fit.orientation);
    if (target_class < 0) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 4; ++k) {
            const double f = f_minus_of_axis(fit.b_t, axes[std::size_t(k)]);
            if (f < best) {
                best = f;
                target_class = k;
            }
        }
    }
    if (target_class < 0 || target_class > 3)
        throw InvalidInput("calibration target class must be in 0..3");

    const Vec3 n = facing_field(axes[std::size_t(target_class)]);
    Vec3 rot = n.cross(Vec3::UnitZ());
    const double rot_norm = rot.norm();
    if (rot_norm < 1e-9)
        throw InvalidInput("target class is aligned with the field; tipping direction undefined");
    rot /= rot_norm;

    AngleFrequencyCalibration cal;
    cal.target_class = target_class;
    cal.angle_rad = uniform_grid(angle_lo_rad, angle_hi_rad, n_points);
    cal.f_minus_hz.resize(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const Mat3 r = rotation_about(rot, cal.angle_rad[i]);
        cal.f_minus_hz[i] = f_minus_of_axis(fit.b_t, Vec3(r * n));
    }

    const bool decreasing = cal.f_minus_hz[1] < cal.f_minus_hz[0];
    for (std::size_t i = 0; i + 1 < n_points; ++i) {
        const double df = cal.f_minus_hz[i + 1] - cal.f_minus_hz[i];
        if (!(decreasing ? df < 0.0 : df > 0.0))
            throw InvalidInput("calibration range is not strictly monotone; shrink the angle range");
    }

    cal.angle_to_frequency = MonotoneCubicSpline::build(cal.angle_rad, cal.f_minus_hz);
    std::vector<double> fs = cal.f_minus_hz, as = cal.angle_rad;
    if (decreasing) {
        std::reverse(fs.begin(), fs.end());
        std::reverse(as.begin(), as.end());
    }
    cal.frequency_to_angle = MonotoneCubicSpline::build(std::move(fs), std::move(as));
    return cal;
}

// vertex of the parabola through three points; falls back to the middle point
// when the data is flat
bool parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2,
                     double& xv, double& yv) {
    const double a = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if (std::fabs(a) < 1e-300) return false;
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    xv = x1 - 0.5 * num / a;
    if (!(xv > std::min(x0, x2) && xv < std::max(x0, x2))) return false;
    // lagrange evaluation at the vertex
    const double l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    yv = y0 * l0 + y1 * l1 + y2 * l2;
    return true;
}

} // namespace

void CrystalOrientation::validate() const {
    if (!std::isfinite(theta_nv_rad) || !std::isfinite(phi_k_rad))
        throw InvalidInput("orientation angles must be finite");
}

CrystalOrientation CrystalOrientation::canonical() const {
    validate();
    return {wrap_angle(theta_nv_rad), wrap_angle(phi_k_rad)};
}

std::array<Vec3, 4> nv_axes(const CrystalOrientation& orientation) {
    orientation.validate();
    const double r23 = std::sqrt(2.0) / 3.0;
    const double r2_3 = std::sqrt(2.0 / 3.0);
    const std::array<Vec3, 4> base = {
        Vec3(0.0, 0.0, 1.0),
        Vec3(2.0 * std::sqrt(2.0) / 3.0, 0.0, -1.0 / 3.0),
        Vec3(-r23, r2_3, -1.0 / 3.0),
        Vec3(-r23, -r2_3, -1.0 / 3.0),
    };
    const Mat3 r = rotation_about(Vec3::UnitY(), orientation.theta_nv_rad) *
                   rotation_about(Vec3::UnitZ(), orientation.phi_k_rad);
    std::array<Vec3, 4> out;
    for (std::size_t k = 0; k < 4; ++k) out[k] = (r * base[k]).normalized();
    return out;
}

double orientation_error(const CrystalOrientation& a, const CrystalOrientation& b) {
    // all 48 orthogonal maps sending the unsigned axis set onto itself,
    // expressed in the frame nv_axes builds its tetrad in. they are the
    // signed coordinate permutations of the cube whose body diagonals the
    // axes are, conjugated into that frame.
    static const std::vector<Mat3> symmetries = [] {
        const double s = 1.0 / std::sqrt(3.0);
        Mat3 diagonals;
        diagonals.col(0) = Vec3(s, s, s);
        diagonals.col(1) = Vec3(s, -s, -s);
        diagonals.col(2) = Vec3(-s, s, -s);
        const auto base = nv_axes(CrystalOrientation{0.0, 0.0});
        Mat3 tetrad;
        tetrad.col(0) = base[0];
        tetrad.col(1) = base[1];
        tetrad.col(2) = base[2];
        const Mat3 to_tetrad = tetrad * diagonals.inverse();
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                 {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        std::vector<Mat3> out;
        out.reserve(48);
        for (const auto& p : perms)
            for (int signs = 0; signs < 8; ++signs) {
                Mat3 m = Mat3::Zero();
                for (int j = 0; j < 3; ++j) m(p[j], j) = (signs >> j) & 1 ? -1.0 : 1.0;
                out.push_back(to_tetrad * m * to_tetrad.transpose());
            }
        return out;
    }();

    // the one thing the line positions measure is where the field points in
    // crystal coordinates; compare that, modulo the symmetry group
    auto field_in_crystal = [](const CrystalOrientation& o) {
        o.validate();
        const Mat3 r = rotation_about(Vec3::UnitY(), o.theta_nv_rad) *
                       rotation_about(Vec3::UnitZ(), o.phi_k_rad);
        return Vec3(r.transpose() * Vec3::UnitZ());
    };
    const Vec3 ua = field_in_crystal(a);
    const Vec3 ub = field_in_crystal(b);
    double best = pi;
    for (const Mat3& g : symmetries) {
        const double c = std::clamp(ub.dot(g * ua), -1.0, 1.0);
        best = std::min(best, std::acos(c));
    }
    return best;
}

void SpectrumPeaks::validate() const {
    if (centers_hz.size() != 8 || widths_hz.size() != 8 || amplitudes.size() != 8)
        throw InvalidInput("a peak set holds exactly 8 lines");
    for (double c : centers_hz)
        if (!std::isfinite(c)) throw InvalidInput("peak centers must be finite");
    for (double w : widths_hz)
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidInput("peak widths must be positive");
    for (double a : amplitudes)
        if (!std::isfinite(a)) throw InvalidInput("peak amplitudes must be finite");
}

SpectrumPeaks forward_spectrum(double b_magnitude_t, const CrystalOrientation& orientation,
                               const std::vector<double>& widths_hz,
                               const std::vector<double>& amplitudes) {
    if (!(b_magnitude_t >= 0.0) || !std::isfinite(b_magnitude_t))
        throw InvalidInput("field magnitude must be finite and non-negative");
    auto broadcast = [](const std::vector<double>& v, const char* what) {
        if (v.size() != 1 && v.size() != 8)
            throw InvalidInput(std::string(what) + ": give one value or one per line");
        std::vector<double> out(8);
        for (std::size_t i = 0; i < 8; ++i) out[i] = v.size() == 1 ? v[0] : v[i];
        return out;
    };
    SpectrumPeaks peaks;
    peaks.widths_hz = broadcast(widths_hz, "widths");
    peaks.amplitudes = broadcast(amplitudes, "amplitudes");
    peaks.centers_hz.resize(8);
    std::array<double, 8> lines;
    if (!model_lines(b_magnitude_t, orientation.theta_nv_rad, orientation.phi_k_rad, lines))
        throw NumericsError("transition labeling failed for this geometry");
    std::copy(lines.begin(), lines.end(), peaks.centers_hz.begin());
    peaks.validate();
    return peaks;
}

std::vector<double> spectrum_curve(const SpectrumPeaks& peaks, const std::vector<double>& freq_hz) {
    peaks.validate();
    std::vector<double> out(freq_hz.size());
    for (std::size_t i = 0; i < freq_hz.size(); ++i) {
        if (!std::isfinite(freq_hz[i])) throw InvalidInput("frequency grid must be finite");
        double s = 1.0;
        for (std::size_t k = 0; k < 8; ++k) {
            const double d = freq_hz[i] - peaks.centers_hz[k];
            const double w2 = peaks.widths_hz[k] * peaks.widths_hz[k];
            s += peaks.amplitudes[k] * w2 / (d * d + w2);
        }
        out[i] = s;
    }
    return out;
}

double assignment_cost_hz(const std::vector<double>& measured_hz, const std::vector<double>& model_hz) {
    if (measured_hz.empty() || measured_hz.size() > model_hz.size())
        throw InvalidInput("need 1..n measured lines for n model lines");
    std::vector<double> m = measured_hz, l = model_hz;
    std::sort(m.begin(), m.end());
    std::sort(l.begin(), l.end());
    if (l.size() > 8) throw InvalidInput("at most 8 model lines supported");
    const double ssq = monotone_ssq(m.data(), m.size(), l.data(), l.size());
    return std::sqrt(ssq / double(m.size()));
}

void FitOptions::validate() const {
    if (angle_grid < 1 || field_grid < 1) throw InvalidInput("fit start grids must be non-empty");
    if (coarse_iterations < 10 || polish_iterations < 10)
        throw InvalidInput("fit iteration budgets are too small");
    if (polish_count < 1) throw InvalidInput("fit must polish at least one start");
    if (!(residual_flag_hz > 0.0)) throw InvalidInput("residual flag must be positive");
    if (!(min_spread_hz >= 0.0)) throw InvalidInput("minimum spread must be non-negative");
}

FitResult fit_vector_field(const std::vector<double>& measured_centers_hz, const FitOptions& options) {
    options.validate();
    if (measured_centers_hz.size() < 4 || measured_centers_hz.size() > 8)
        throw InvalidInput("vector fit needs between 4 and 8 line centers");
    for (double f : measured_centers_hz)
        if (!(f > 0.0) || !std::isfinite(f)) throw InvalidInput("line centers must be positive and finite");

    std::vector<std::pair<double, std::size_t>> meas(measured_centers_hz.size());
    for (std::size_t i = 0; i < meas.size(); ++i) meas[i] = {measured_centers_hz[i], i};
    std::sort(meas.begin(), meas.end());
    std::vector<double> meas_sorted(meas.size());
    for (std::size_t i = 0; i < meas.size(); ++i) meas_sorted[i] = meas[i].first;

    const double span = meas_sorted.back() - meas_sorted.front();
    const SpinConstants constants{};
    const double b_ref = std::max(span / constants.gamma_e_hz_per_t, 1e-5);

    const TrialCost cost{&meas_sorted, b_ref};

    const std::size_t na = options.angle_grid;
    const std::size_t nb = options.field_grid;
    const std::size_t n_starts = na * na * nb;
    std::vector<std::array<double, 3>> xs(n_starts);
    std::vector<double> fs(n_starts);

    parallel_for(n_starts, options.workers, [&](std::size_t s) {
        const std::size_t ib = s % nb;
        const std::size_t ip = (s / nb) % na;
        const std::size_t it = s / (nb * na);
        const double mult = nb == 1 ? 1.0 : 0.3 + 1.4 * double(ib) / double(nb - 1);
        std::array<double, 3> x = {mult,
                                   (double(it) + 0.5) * two_pi / double(na),
                                   (double(ip) + 0.5) * two_pi / double(na)};
        double fx = 0.0;
        nelder_mead(cost, x, fx, {0.25, 0.35, 0.35}, options.coarse_iterations, 1e-6);
        xs[s] = x;
        fs[s] = fx;
    });

    std::vector<std::size_t> order(n_starts);
    for (std::size_t i = 0; i < n_starts; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (fs[a] != fs[b]) return fs[a] < fs[b];
        return a < b;
    });

    const std::size_t n_polish = std::min(options.polish_count, n_starts);
    std::array<double, 3> best_x = xs[order[0]];
    double best_f = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_polish; ++k) {
        std::array<double, 3> x = xs[order[k]];
        double fx = 0.0;
        nelder_mead(cost, x, fx, {0.02, 0.02, 0.02}, options.polish_iterations, 1e-12);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }

    FitResult result;
    result.b_t = std::fabs(best_x[0]) * b_ref;
    result.orientation = CrystalOrientation{best_x[1], best_x[2]}.canonical();

    std::array<double, 8> lines;
    if (!model_lines(result.b_t, result.orientation.theta_nv_rad, result.orientation.phi_k_rad, lines))
        throw NumericsError("fit landed on a geometry the eigensolver cannot label");
    std::vector<SortedLine> sorted_lines(8);
    for (int k = 0; k < 4; ++k) {
        sorted_lines[std::size_t(2 * k)] = {lines[std::size_t(2 * k)], k, 0};
        sorted_lines[std::size_t(2 * k + 1)] = {lines[std::size_t(2 * k + 1)], k, 1};
    }
    std::sort(sorted_lines.begin(), sorted_lines.end(),
              [](const SortedLine& a, const SortedLine& b) { return a.f_hz < b.f_hz; });
    double ssq = 0.0;
    result.assignment = monotone_assignment(meas, sorted_lines, ssq);
    result.residual_hz = std::sqrt(ssq / double(meas.size()));
    result.converged = result.residual_hz < options.residual_flag_hz && span >= options.min_spread_hz;
    return result;
}

double MonotoneCubicSpline::operator()(double xq) const {
    if (x.size() < 2) throw InvalidInput("spline has no data");
    if (!(xq >= x.front() && xq <= x.back()))
        throw InvalidInput("spline query outside the tabulated range");
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = std::size_t(std::max<std::ptrdiff_t>(1, it - x.begin())) - 1;
    if (i > x.size() - 2) i = x.size() - 2;
    const double h = x[i + 1] - x[i];
    const double t = (xq - x[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * y[i] + h10 * h * tangent[i] + h01 * y[i + 1] + h11 * h * tangent[i + 1];
}

MonotoneCubicSpline MonotoneCubicSpline::build(std::vector<double> x, std::vector<double> y) {
    if (x.size() != y.size() || x.size() < 2) throw InvalidInput("spline needs matching x/y tables");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i + 1] > x[i])) throw InvalidInput("spline abscissae must be strictly increasing");
    const std::size_t n = x.size();
    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    std::vector<double> m(n);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i)
        m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    // clamp tangents so each cubic piece stays monotone
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        const double a = m[i] / d[i];
        const double b = m[i + 1] / d[i];
        const double s = a * a + b * b;
        if (s > 9.0) {
            const double t = 3.0 / std::sqrt(s);
            m[i] = t * a * d[i];
            m[i + 1] = t * b * d[i];
        }
    }
    MonotoneCubicSpline out;
    out.x = std::move(x);
    out.y = std::move(y);
    out.tangent = std::move(m);
    return out;
}

AngleFrequencyCalibration angle_frequency_calibration(const FitResult& fit, int target_class,
                                                      double angle_range_rad, std::size_t n_points) {
    if (!(angle_range_rad > 0.0)) throw InvalidInput("calibration angle range must be positive");
    return build_calibration(fit, target_class, 0.0, angle_range_rad, n_points);
}

PumpProbeResult pump_probe_simulate(const FitResult& fit, const TrapParams& trap,
                                    const SpinTorqueModel& torque, const RelaxationParams& relax,
                                    const std::vector<double>& t_d_s, const std::vector<double>& f2_hz,
                                    double probe_width_hz, int target_class, int workers) {
    trap.validate();
    torque.validate();
    if (!(relax.t1_s > 0.0)) throw InvalidInput("spin lifetime must be positive");
    if (!(probe_width_hz > 0.0) || !std::isfinite(probe_width_hz))
        throw InvalidInput("probe linewidth must be positive");
    if (f2_hz.size() < 3) throw InvalidInput("probe frequency grid needs at least 3 points");
    for (std::size_t j = 0; j + 1 < f2_hz.size(); ++j)
        if (!(f2_hz[j + 1] > f2_hz[j])) throw InvalidInput("probe frequency grid must be strictly increasing");
    const double b_scale = std::max(std::fabs(fit.b_t), std::fabs(torque.field_t));
    if (std::fabs(fit.b_t - torque.field_t) > 1e-9 + 1e-6 * b_scale)
        throw InvalidInput("probe field magnitude disagrees with the torque model field");

    PumpProbeResult res;
    res.t_d_s = t_d_s;
    res.f2_hz = f2_hz;

    const LibrationTrajectory traj = deterministic_evolve({0.0, 0.0}, trap, torque, t_d_s);

    double theta_min = 0.0, theta_max = 0.0;
    for (double th : traj.theta_rad) {
        theta_min = std::min(theta_min, th);
        theta_max = std::max(theta_max, th);
    }
    const double pad = std::max(1.5 * std::max(theta_max, -theta_min), 1e-3);
    const double lo = theta_min < 0.0 ? -pad : 0.0;
    const AngleFrequencyCalibration cal = build_calibration(fit, target_class, lo, pad, 512);

    const std::size_t n_t = t_d_s.size(), n_f = f2_hz.size();
    std::vector<double> f_track(n_t);
    for (std::size_t i = 0; i < n_t; ++i) f_track[i] = cal.frequency_from_angle(traj.theta_rad[i]);

    res.contrast.resize(n_t * n_f);
    const double w2 = probe_width_hz * probe_width_hz;
    parallel_for(n_t, workers, [&](std::size_t i) {
        const double amp = std::isfinite(relax.t1_s) ? std::exp(-t_d_s[i] / relax.t1_s) : 1.0;
        for (std::size_t j = 0; j < n_f; ++j) {
            const double d = f2_hz[j] - f_track[i];
            res.contrast[i * n_f + j] = amp * w2 / (d * d + w2);
        }
    });

    res.peak_center_hz.resize(n_t);
    res.peak_amplitude.resize(n_t);
    res.theta_track_rad.resize(n_t);
    const double f_lo = std::min(cal.f_minus_hz.front(), cal.f_minus_hz.back());
    const double f_hi = std::max(cal.f_minus_hz.front(), cal.f_minus_hz.back());
    for (std::size_t i = 0; i < n_t; ++i) {
        const double* row = res.contrast.data() + i * n_f;
        std::size_t jmax = 0;
        for (std::size_t j = 1; j < n_f; ++j)
            if (row[j] > row[jmax]) jmax = j;
        double center = f2_hz[jmax];
        double amp = row[jmax];
        if (jmax > 0 && jmax + 1 < n_f && row[jmax - 1] > 0.0 && row[jmax] > 0.0 && row[jmax + 1] > 0.0) {
            // the log of a lorentzian is locally parabolic, so refine there
            double xv = 0.0, yv = 0.0;
            if (parabola_vertex(f2_hz[jmax - 1], std::log(row[jmax - 1]), f2_hz[jmax],
                                std::log(row[jmax]), f2_hz[jmax + 1], std::log(row[jmax + 1]), xv, yv)) {
                center = xv;
                amp = std::exp(yv);
            }
        }
        res.peak_center_hz[i] = center;
        res.peak_amplitude[i] = amp;
        res.theta_track_rad[i] = cal.angle_from_frequency(std::clamp(center, f_lo, f_hi));
    }
    return res;
}

} // namespace smc
