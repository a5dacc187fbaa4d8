#pragma once

// Ensemble-level pulse dynamics: green pumping, rotating-frame microwave
// rotations on one spin transition, and phenomenological T1/T2 relaxation.
// Good enough for Rabi, Hahn-echo and T1-protocol observables; a full
// driven-dissipative master equation is out of scope.

#include <cstdint>
#include <limits>
#include <variant>
#include <vector>

#include "smc/spin.hpp"

namespace smc {

struct RelaxationParams {
  double t1_s = std::numeric_limits<double>::infinity();
  double t2_s = std::numeric_limits<double>::infinity();
  double t2_star_s = std::numeric_limits<double>::infinity();

  void validate() const;  // requires 0 < t2* <= t2 <= 2 t1
  static RelaxationParams none() { return {}; }
};

enum class Transition { minus, plus };  // 0 -> -1 or 0 -> +1

struct GreenPump {
  double duration_s = 0.0;
  double efficiency = 1.0;  // fraction pumped into |0>
};

struct Microwave {
  double frequency_hz = 0.0;      // drive frequency (lab)
  double rabi_hz = 0.0;           // on-resonance Rabi frequency
  double duration_s = 0.0;
  double phase_rad = 0.0;
  Transition target = Transition::minus;
};

struct Wait {
  double duration_s = 0.0;
};

using PulseEvent = std::variant<GreenPump, Microwave, Wait>;

struct PulseSequence {
  std::vector<PulseEvent> events;
  void validate() const;  // non-empty, durations >= 0, efficiencies in [0,1]
};

// efficiency * |0><0| + (1 - efficiency) * rho, coherences zeroed
DensityMatrix polarize(const DensityMatrix& rho, double efficiency);

// rotating-frame two-level unitary on {|0>, |target>}; spectator level frozen.
// Detuning = pulse.frequency - transition_frequency, generalized Rabi
// sqrt(Omega^2 + Delta^2). Frequencies in Hz (cycles).
DensityMatrix apply_microwave(const DensityMatrix& rho, const Microwave& pulse,
                              double transition_frequency_hz);

// populations relax toward the uniform 1/3 mixture with T1, coherences decay
// with T2 and (optionally) rotate at their transition detunings in the frame
DensityMatrix free_evolve(const DensityMatrix& rho, double duration_s,
                          const RelaxationParams& relax);
DensityMatrix free_evolve(const DensityMatrix& rho, double duration_s,
                          const RelaxationParams& relax, double detuning_plus_hz,
                          double detuning_minus_hz);

// runs the whole sequence; microwave events are resolved against the supplied
// transition frequencies and followed by relaxation over their duration
DensityMatrix apply_sequence(const DensityMatrix& rho, const PulseSequence& seq,
                             const TransitionFrequencies& freqs,
                             const RelaxationParams& relax);

// population transferred into the target level for each pulse duration,
// starting from a thermal state pumped with pump_efficiency
std::vector<double> rabi_trace(const std::vector<double>& durations_s,
                               double rabi_hz, const RelaxationParams& relax,
                               double pump_efficiency);

// pi/2 - tau - pi - tau - pi/2 with phase-cycled readout, averaged over a
// Gaussian static-detuning ensemble (T2* proxy). Returns 1 at tau = 0 and
// decays as exp(-(2 tau / T2)^stretch); deterministic for a fixed seed.
double echo_amplitude(double tau_s, const RelaxationParams& relax,
                      double detuning_sigma_hz, int n_samples,
                      std::uint64_t seed, double stretch = 1.0);

// Gaussian detuning width equivalent to a given T2* (Ramsey 1/e time)
double detuning_sigma_from_t2_star(double t2_star_s);

// m_S = 0 population surviving after pump -> wait(delay); feeds the torque
// model of the T1 protocol
double t1_population_at_pulse(double delay_s, const RelaxationParams& relax,
                              double pump_efficiency);

}  // namespace smc
