#pragma once

// independent reference implementations used to pin expected values.
// nothing here may call into the code paths under test (beyond plain types),
// so agreement is evidence rather than tautology.

#include <array>
#include <cstddef>
#include <vector>

#include "smc/linalg.hpp"
#include "smc/spin.hpp"

namespace oracle {

// eigenvalues of a 3x3 hermitian matrix by bisecting its characteristic
// polynomial between the stationary points; ascending order
std::array<double, 3> eigenvalues_hermitian3(const smc::Mat3c& m);

// torque from the energy derivative under a crystal rotation, computed as a
// central difference of the hamiltonian with the field counter-rotated
double torque_numeric(const smc::DensityMatrix& rho, const smc::FieldVector& field_t,
                      const smc::NvAxis& axis, const smc::Vec3& rotation_axis);

// two-level generalized rabi transfer probability at detuning
double rabi_population(double rabi_hz, double detuning_hz, double t_s);

// damped free oscillator theta(t) from (theta0, v0); underdamped form
double damped_oscillator_theta(double theta0, double v0, double omega, double gamma, double t);

// root of I w^2 th = amplitude * sin(phi - th) by bisection on [0, phi]
double torque_balance_angle(double inertia, double omega, double amplitude, double phi);

// ln C(n, k) from exact big-integer arithmetic
double log_binomial_exact(unsigned n, unsigned k);

// first and second moments of the linear (small-angle) langevin system
//   dth = v dt, dv = (-gamma v - omega^2 th + a(t)) dt + sqrt(2 gamma kT / I) dW
// propagated by dense RK4 on the moment equations. a(t) = a0 exp(-t/t1).
struct MomentState {
    double mean_theta = 0.0;
    double mean_v = 0.0;
    double var_theta = 0.0;
    double cov_tv = 0.0;
    double var_v = 0.0;
};

MomentState linear_moments(const MomentState& init, double omega, double gamma,
                           double diffusion, double a0, double t1_s, double t_end);

} // namespace oracle
