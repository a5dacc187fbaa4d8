#include "doctest.h"

#include <cmath>
#include <limits>

#include "smc/constants.hpp"
#include "smc/errors.hpp"
#include "smc/pulse.hpp"
#include "oracles.hpp"

using namespace smc;

namespace {
RelaxationParams make_relax(double t1, double t2, double t2s) {
    RelaxationParams r;
    r.t1_s = t1;
    r.t2_s = t2;
    r.t2_star_s = t2s;
    return r;
}
} // namespace

TEST_CASE("relaxation parameter ordering is enforced") {
    CHECK_NOTHROW(RelaxationParams::none().validate());
    CHECK_NOTHROW(make_relax(0.6e-3, 1.22e-6, 90e-9).validate());
    CHECK_THROWS_AS(make_relax(1e-6, 3e-6, 1e-9).validate(), InvalidInput);  // t2 > 2 t1
    CHECK_THROWS_AS(make_relax(1e-3, 1e-6, 2e-6).validate(), InvalidInput);  // t2* > t2
    CHECK_THROWS_AS(make_relax(-1.0, 1e-6, 1e-7).validate(), InvalidInput);
}

TEST_CASE("polarize pushes population into |0> and kills coherences") {
    Mat3c m = Mat3c::Zero();
    m(0, 0) = 0.3;
    m(1, 1) = 0.3;
    m(2, 2) = 0.4;
    m(0, 2) = m(2, 0) = 0.05;
    DensityMatrix rho = DensityMatrix::from_matrix(m);

    DensityMatrix full = polarize(rho, 1.0);
    CHECK(full.population(BareState::zero) == doctest::Approx(1.0).epsilon(1e-14));

    DensityMatrix part = polarize(rho, 0.8);
    CHECK(part.population(BareState::zero) == doctest::Approx(0.8 + 0.2 * 0.3).epsilon(1e-14));
    CHECK(part.population(BareState::plus) == doctest::Approx(0.2 * 0.3).epsilon(1e-14));
    CHECK(std::abs(part.rho()(0, 2)) < 1e-15);

    CHECK_THROWS_AS(polarize(rho, 1.1), InvalidInput);
}

TEST_CASE("resonant rabi oscillation matches the closed form") {
    const double rabi = 5e6;
    DensityMatrix rho0 = DensityMatrix::pure(BareState::zero);
    for (double t : {0.0, 13e-9, 50e-9, 100e-9, 237e-9, 1e-6}) {
        Microwave mw;
        mw.rabi_hz = rabi;
        mw.duration_s = t;
        mw.target = Transition::minus;
        DensityMatrix rho = apply_microwave(rho0, mw, 0.0);
        const double want = oracle::rabi_population(rabi, 0.0, t);
        CHECK(std::abs(rho.population(BareState::minus) - want) < 1e-12);
        // spectator untouched
        CHECK(rho.population(BareState::plus) < 1e-15);
    }
}

TEST_CASE("detuned rabi follows the generalized flopping formula") {
    const double rabi = 2e6;
    DensityMatrix rho0 = DensityMatrix::pure(BareState::zero);
    for (double delta : {-5e6, -0.7e6, 0.0, 1.3e6, 8e6}) {
        for (double t : {40e-9, 170e-9, 420e-9}) {
            Microwave mw;
            mw.frequency_hz = 2.87e9 + delta;
            mw.rabi_hz = rabi;
            mw.duration_s = t;
            mw.target = Transition::plus;
            DensityMatrix rho = apply_microwave(rho0, mw, 2.87e9);
            const double want = oracle::rabi_population(rabi, delta, t);
            CHECK(std::abs(rho.population(BareState::plus) - want) < 1e-12);
        }
    }
}

TEST_CASE("drive phase does not change transferred population from |0>") {
    DensityMatrix rho0 = DensityMatrix::pure(BareState::zero);
    Microwave a;
    a.rabi_hz = 1e6;
    a.duration_s = 80e-9;
    Microwave b = a;
    b.phase_rad = 1.91;
    DensityMatrix ra = apply_microwave(rho0, a, 0.0);
    DensityMatrix rb = apply_microwave(rho0, b, 0.0);
    CHECK(ra.population(BareState::minus) ==
          doctest::Approx(rb.population(BareState::minus)).epsilon(1e-13));
}

TEST_CASE("free evolution relaxes populations and decays coherences") {
    Mat3c m = Mat3c::Zero();
    m(0, 0) = 0.1;
    m(1, 1) = 0.7;
    m(2, 2) = 0.2;
    m(1, 2) = m(2, 1) = 0.25;
    DensityMatrix rho = DensityMatrix::from_matrix(m);
    RelaxationParams relax = make_relax(1e-3, 1e-4, 1e-5);

    const double t = 2.5e-4;
    DensityMatrix out = free_evolve(rho, t, relax);
    const double fp = std::exp(-t / relax.t1_s);
    CHECK(out.population(BareState::zero) ==
          doctest::Approx(1.0 / 3.0 + (0.7 - 1.0 / 3.0) * fp).epsilon(1e-13));
    CHECK(out.population(BareState::plus) ==
          doctest::Approx(1.0 / 3.0 + (0.1 - 1.0 / 3.0) * fp).epsilon(1e-13));
    CHECK(std::abs(out.rho()(1, 2)) ==
          doctest::Approx(0.25 * std::exp(-t / relax.t2_s)).epsilon(1e-13));

    // detuned frame: coherence picks up the advertised phase
    DensityMatrix spun = free_evolve(rho, t, relax, 0.0, 1.0e4);
    const cplx c = spun.rho()(1, 2);
    const double want_phase = -2.0 * pi * (0.0 - 1.0e4) * t; // e_zero - e_minus
    const cplx want = 0.25 * std::exp(-t / relax.t2_s) * std::polar(1.0, want_phase);
    CHECK(std::abs(c - want) < 1e-12);

    // long-time limit is the uniform mixture
    DensityMatrix late = free_evolve(rho, 1.0, relax);
    for (BareState s : {BareState::plus, BareState::zero, BareState::minus}) {
        CHECK(late.population(s) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("rabi trace equals sin^2(pi Omega t) without relaxation") {
    std::vector<double> t;
    for (int i = 0; i <= 40; ++i) t.push_back(i * 12.5e-9);
    auto trace = rabi_trace(t, 5e6, RelaxationParams::none(), 1.0);
    REQUIRE(trace.size() == t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double want = oracle::rabi_population(5e6, 0.0, t[i]);
        CHECK(std::abs(trace[i] - want) < 1e-12);
    }
}

TEST_CASE("rabi trace with partial pump is rescaled and offset-free") {
    std::vector<double> t = {0.0, 50e-9, 100e-9};
    auto trace = rabi_trace(t, 5e6, RelaxationParams::none(), 0.7);
    // baseline subtraction guarantees a zero at t = 0
    CHECK(std::abs(trace[0]) < 1e-14);
    // contrast of the pumped fraction: (p0 - baseline) sin^2
    const double p0 = 0.7 + 0.3 / 3.0;
    const double baseline = 0.3 / 3.0;
    CHECK(trace[1] ==
          doctest::Approx((p0 - baseline) * oracle::rabi_population(5e6, 0.0, 50e-9))
              .epsilon(1e-10));
}

TEST_CASE("echo amplitude: exact unity at tau 0 and pure envelope decay") {
    RelaxationParams relax = make_relax(0.6e-3, 1.22e-6, 90e-9);
    const double sigma = detuning_sigma_from_t2_star(relax.t2_star_s);

    CHECK(echo_amplitude(0.0, relax, sigma, 100, 7) == doctest::Approx(1.0).epsilon(1e-12));

    // static detuning refocuses exactly, so only the T2 envelope survives
    for (double tau : {0.2e-6, 0.61e-6, 1.5e-6}) {
        const double got = echo_amplitude(tau, relax, sigma, 60, 7);
        CHECK(got == doctest::Approx(std::exp(-2.0 * tau / relax.t2_s)).epsilon(1e-9));
    }

    // stretched envelope
    const double tau = 0.8e-6;
    const double got = echo_amplitude(tau, relax, sigma, 60, 7, 1.3);
    CHECK(got ==
          doctest::Approx(std::exp(-std::pow(2.0 * tau / relax.t2_s, 1.3))).epsilon(1e-9));

    // deterministic for a fixed seed
    CHECK(echo_amplitude(tau, relax, sigma, 60, 123) ==
          echo_amplitude(tau, relax, sigma, 60, 123));
}

TEST_CASE("detuning width reproduces the ramsey 1/e definition") {
    const double t2s = 90e-9;
    const double sigma = detuning_sigma_from_t2_star(t2s);
    // gaussian ensemble coherence |<exp(i 2 pi delta t)>| = exp(-(2 pi sigma t)^2 / 2)
    const double coherence = std::exp(-0.5 * std::pow(2.0 * pi * sigma * t2s, 2));
    CHECK(coherence == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("t1 population follows the exponential return to the mixture") {
    RelaxationParams relax = make_relax(0.6e-3, 1.22e-6, 90e-9);
    const double eff = 0.9;
    const double p0 = eff + (1.0 - eff) / 3.0;
    for (double delay : {0.0, 0.2e-3, 0.6e-3, 2.4e-3}) {
        const double want = 1.0 / 3.0 + (p0 - 1.0 / 3.0) * std::exp(-delay / relax.t1_s);
        CHECK(t1_population_at_pulse(delay, relax, eff) ==
              doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("apply_sequence composes the primitive steps") {
    RelaxationParams relax = make_relax(1e-3, 1e-4, 1e-5);
    TransitionFrequencies freqs;
    freqs.f_minus_hz = 2.488e9;
    freqs.f_plus_hz = 3.258e9;

    Microwave mw;
    mw.frequency_hz = 2.488e9; // resonant on the minus branch
    mw.rabi_hz = 5e6;
    mw.duration_s = 100e-9; // pi pulse
    mw.target = Transition::minus;

    PulseSequence seq;
    seq.events = {GreenPump{1e-6, 1.0}, mw, Wait{5e-5}};

    DensityMatrix got = apply_sequence(DensityMatrix::thermal(), seq, freqs, relax);

    DensityMatrix want = polarize(DensityMatrix::thermal(), 1.0);
    want = free_evolve(want, 1e-6, relax);
    want = apply_microwave(want, mw, freqs.f_minus_hz);
    want = free_evolve(want, mw.duration_s, relax);
    want = free_evolve(want, 5e-5, relax);

    for (BareState s : {BareState::plus, BareState::zero, BareState::minus}) {
        CHECK(got.population(s) == doctest::Approx(want.population(s)).epsilon(1e-13));
    }

    PulseSequence empty;
    CHECK_THROWS_AS(apply_sequence(DensityMatrix::thermal(), empty, freqs, relax),
                    InvalidInput);
}
