#include <cmath>

#include "doctest.h"
#include "smc/constants.hpp"
#include "smc/errors.hpp"
#include "smc/noise.hpp"

using namespace smc;

TEST_CASE("ramsey_signal fringe and linearized slope") {
    CHECK(ramsey_signal(1e4, 0.0, 1e-7) == 1e4);

    // quarter fringe: pi gamma dB t = pi/4 -> cos^2 = 1/2
    const double db = 0.25 / (28.0e9 * 1e-7);
    CHECK(ramsey_signal(1e4, db, 1e-7) == doctest::Approx(5e3).epsilon(1e-12));

    // mid-fringe zero: phase pi/2
    CHECK(std::abs(ramsey_signal(1e4, 2.0 * db, 1e-7)) < 1e-8);

    // linearized flavor is the bare phase times the count difference
    const double phase = pi * 28.0e9 * 3e-9 * 1e-7;
    CHECK(ramsey_signal(1e4, 3e-9, 1e-7, 28.0e9, true) ==
          doctest::Approx(1e4 * phase).epsilon(1e-12));

    CHECK_THROWS_AS(ramsey_signal(0.0, 1e-9, 1e-7), InvalidInput);
    CHECK_THROWS_AS(ramsey_signal(1e4, 1e-9, -1e-7), InvalidInput);
    CHECK_THROWS_AS(ramsey_signal(1e4, std::nan(""), 1e-7), InvalidInput);
}

TEST_CASE("shot-noise field sensitivity closed form") {
    const double got = shot_noise_field_sensitivity(1e4, 1e-7, 1e-2);
    const double want = std::sqrt(2.0 * 1e-2 / 1e4) / (28.0e9 * 1e-7);
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
    CHECK(got == doctest::Approx(5.0508e-7).epsilon(1e-4));

    // scaling: counts enter as 1/sqrt, phase time as 1/t
    CHECK(shot_noise_field_sensitivity(4e4, 1e-7, 1e-2) ==
          doctest::Approx(got / 2.0).epsilon(1e-12));
    CHECK(shot_noise_field_sensitivity(1e4, 2e-7, 1e-2) ==
          doctest::Approx(got / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(shot_noise_field_sensitivity(1e4, 0.0, 1e-2), InvalidInput);
}

TEST_CASE("shot-noise angle sensitivity and its degenerate flags") {
    const auto s = shot_noise_angle_sensitivity(1e4, 0.5, 0.06981317007977318, 1e-2);
    CHECK_FALSE(s.degenerate);
    const double want = std::sqrt(1e4 * 1.5 / 2.0) * 0.06981317007977318 * 0.1 / (1e4 * 0.5);
    CHECK(s.rad_per_sqrt_hz == doctest::Approx(want).epsilon(1e-14));
    CHECK(s.rad_per_sqrt_hz == doctest::Approx(1.2092e-4).epsilon(1e-4));

    const auto full_contrast = shot_noise_angle_sensitivity(1e4, 1.0, 0.07, 1e-2);
    CHECK(full_contrast.degenerate);
    CHECK(std::isinf(full_contrast.rad_per_sqrt_hz));

    const auto no_span = shot_noise_angle_sensitivity(1e4, 0.5, 0.0, 1e-2);
    CHECK(no_span.degenerate);

    CHECK_THROWS_AS(shot_noise_angle_sensitivity(1e4, 1.5, 0.07, 1e-2), InvalidInput);
    CHECK_THROWS_AS(shot_noise_angle_sensitivity(1e4, -0.1, 0.07, 1e-2), InvalidInput);
}

TEST_CASE("projection noise closed forms") {
    const double torque = projection_torque_noise(1e8, 0.027, 1e-2);
    const double want_torque = hbar * 2.0 * pi * 28.0e9 * 0.027 *
                               std::sqrt(0.5e8) * std::sqrt(1e-2);
    CHECK(torque == doctest::Approx(want_torque).epsilon(1e-14));
    CHECK(torque == doctest::Approx(3.5421e-22).epsilon(1e-4));

    const double angle = projection_angle_noise(1e8, 0.027, 1e-2, 1e-23, 1e-4);
    CHECK(angle == doctest::Approx(torque * 1e-8 / (2.0 * 1e-23)).epsilon(1e-12));
    CHECK(angle == doctest::Approx(1.771e-7).epsilon(1e-4));

    CHECK(relative_projection_noise(1e8) == doctest::Approx(1.41421e-4).epsilon(1e-5));
    CHECK(relative_projection_noise(2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(projection_torque_noise(0.0, 0.027, 1e-2), InvalidInput);
    CHECK_THROWS_AS(projection_angle_noise(1e8, 0.027, 1e-2, 0.0, 1e-4), InvalidInput);
}

TEST_CASE("thermal angle jitter and resonant torque floor") {
    const double jitter = thermal_angle_noise(300.0, 1e-23, 2.0 * pi * 1000.0, 1e-2);
    const double w0 = 2.0 * pi * 1000.0;
    const double want = std::sqrt(k_boltzmann * 300.0 / (1e-23 * w0 * w0)) * 0.1;
    CHECK(jitter == doctest::Approx(want).epsilon(1e-14));
    CHECK(jitter == doctest::Approx(3.2391e-4).epsilon(1e-4));

    const double floor = resonant_torque_limit(300.0, 1e-23, 6280.0, 1.0);
    const double want_floor =
        std::sqrt(4.0 * k_boltzmann * 300.0 * 1e-23 * 6280.0);
    CHECK(floor == doctest::Approx(want_floor).epsilon(1e-14));
    CHECK(floor == doctest::Approx(3.2256e-20).epsilon(1e-4));

    // longer averaging buys torque resolution as 1/sqrt(t)
    CHECK(resonant_torque_limit(300.0, 1e-23, 6280.0, 4.0) ==
          doctest::Approx(floor / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(resonant_torque_limit(300.0, 1e-23, 6280.0, 0.0), InvalidInput);
}

TEST_CASE("sensitivity_table rows, order and defaults") {
    const SensitivityInputs in;
    const auto rows = sensitivity_table(in);
    REQUIRE(rows.size() == 9);

    CHECK(rows[0].label == "field_shot_noise");
    CHECK(rows[1].label == "field_shot_noise_unattenuated");
    CHECK(rows[2].label == "field_shot_noise_coherence_limited");
    CHECK(rows[3].label == "angle_shot_noise");
    CHECK(rows[4].label == "torque_projection_noise");
    CHECK(rows[5].label == "angle_projection_noise");
    CHECK(rows[6].label == "relative_projection_noise");
    CHECK(rows[7].label == "angle_thermal_noise");
    CHECK(rows[8].label == "torque_thermal_resonant");

    // rows repeat the standalone functions exactly
    CHECK(rows[0].value == shot_noise_field_sensitivity(in.delta_x_counts, in.ramsey_time_s,
                                                        in.dead_time_s));
    CHECK(rows[1].value == shot_noise_field_sensitivity(in.delta_x_counts * in.attenuation,
                                                        in.ramsey_time_s, in.dead_time_s));
    CHECK(rows[2].value == shot_noise_field_sensitivity(in.delta_x_counts * in.attenuation,
                                                        in.t2_star_s, in.t2_star_dead_time_s));
    CHECK(rows[3].value ==
          shot_noise_angle_sensitivity(in.x0_counts, in.contrast, in.theta_span_rad,
                                       in.dead_time_s)
              .rad_per_sqrt_hz);
    CHECK(rows[4].value == projection_torque_noise(in.n_spins, in.field_t, in.dead_time_s));
    CHECK(rows[6].value == relative_projection_noise(in.n_spins));
    CHECK(rows[8].value == resonant_torque_limit(in.gas_temp_k, in.inertia_kg_m2,
                                                 in.gamma_g_per_s, in.measurement_time_s));

    // the headline numbers at the default inputs
    CHECK(rows[0].value == doctest::Approx(5.0508e-7).epsilon(1e-4));
    CHECK(rows[1].value == doctest::Approx(5.0508e-9).epsilon(1e-4));
    CHECK(rows[2].value == doctest::Approx(5.0508e-11).epsilon(1e-4));
    CHECK(rows[3].value == doctest::Approx(1.2092e-4).epsilon(1e-4));
    CHECK(rows[4].value == doctest::Approx(3.5421e-22).epsilon(1e-4));
    CHECK(rows[5].value == doctest::Approx(1.771e-7).epsilon(1e-4));
    CHECK(rows[6].value == doctest::Approx(1.41421e-4).epsilon(1e-5));
    CHECK(rows[7].value == doctest::Approx(3.2391e-4).epsilon(1e-4));
    CHECK(rows[8].value == doctest::Approx(3.2256e-20).epsilon(1e-4));

    CHECK(rows[0].unit == "T/sqrt(Hz)");
    CHECK(rows[6].unit == "1");
    CHECK(rows[8].unit == "N*m");
}

TEST_CASE("sensitivity input validation") {
    SensitivityInputs in;
    in.delta_x_counts = 2e4; // above the baseline
    CHECK_THROWS_AS(in.validate(), InvalidInput);
    in = {};
    in.contrast = 1.2;
    CHECK_THROWS_AS(in.validate(), InvalidInput);
    in = {};
    in.field_t = 0.0;
    CHECK_THROWS_AS(in.validate(), InvalidInput);
    in = {};
    in.rotation_time_s = -1.0;
    CHECK_THROWS_AS(in.validate(), InvalidInput);
    in = {};
    CHECK_NOTHROW(in.validate());
}
