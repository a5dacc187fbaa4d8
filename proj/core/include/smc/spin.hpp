#pragma once

// Ground-state spin-1 Hamiltonian of the NV- centre, transition frequencies
// and the mechanical torque carried by a given spin state.
//
// Conventions: Hamiltonians are stored in cycles (Hz); time evolution
// multiplies by 2*pi. Basis ordering is {|+1>, |0>, |-1>}.

#include <array>

#include "smc/linalg.hpp"

namespace smc {

struct SpinConstants {
  double d_zfs_hz = 2.87e9;         // zero-field splitting
  double gamma_e_hz_per_t = 28.0e9; // gyromagnetic ratio, cycles convention

  void validate() const;
};

// magnetic field in tesla, lab frame
using FieldVector = Vec3;

class NvAxis {
 public:
  explicit NvAxis(const Vec3& n);          // must already be unit length
  static NvAxis from_direction(const Vec3& v);  // normalizes

  const Vec3& n() const { return n_; }

 private:
  Vec3 n_;
};

// basis indices for {|+1>, |0>, |-1>}
enum class BareState : int { plus = 0, zero = 1, minus = 2 };

class DensityMatrix {
 public:
  // validating factory; Hermitian 1e-12, unit trace 1e-12, eigenvalues >= -1e-10
  static DensityMatrix from_matrix(const Mat3c& rho);
  static DensityMatrix pure(BareState s);
  static DensityMatrix thermal();  // identity / 3

  const Mat3c& rho() const { return rho_; }
  double population(BareState s) const { return rho_(int(s), int(s)).real(); }

 private:
  explicit DensityMatrix(const Mat3c& rho) : rho_(rho) {}
  Mat3c rho_;
};

// spin-1 operators in the {|+1>, |0>, |-1>} basis
const Mat3c& spin1_sx();
const Mat3c& spin1_sy();
const Mat3c& spin1_sz();

// H = d_zfs Sz'^2 + gamma_e (B.x')Sx' + (B.y')Sy' + (B.z')Sz', entries in Hz.
// Primed frame: z' = axis, transverse pair from orthonormal_frame().
Mat3c build_hamiltonian(const FieldVector& field_t, const NvAxis& axis,
                        const SpinConstants& constants = {});

struct TransitionFrequencies {
  double f_minus_hz = 0.0;  // 0 -> -1-like
  double f_plus_hz = 0.0;   // 0 -> +1-like
};

// labels eigenstates by maximum bare-state overlap; throws NumericsError when
// two eigenstates claim the same bare label (degenerate labeling)
TransitionFrequencies transition_frequencies(const Mat3c& hamiltonian_hz);

// -Tr(rho dH/dtheta) * hbar * 2pi for a crystal rotation about rotation_axis,
// evaluated at theta = 0. N·m per spin.
double spin_torque(const DensityMatrix& rho, const FieldVector& field_t,
                   const NvAxis& axis, const Vec3& rotation_axis,
                   const SpinConstants& constants = {});

// hbar * 2pi * gamma_e * B: torque quantum of one fully-polarized spin
double per_spin_torque_scale(double field_magnitude_t,
                             const SpinConstants& constants = {});

}  // namespace smc
