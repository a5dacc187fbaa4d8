#include "smc/spin.hpp"

#include <cmath>

#include "smc/constants.hpp"
#include "smc/errors.hpp"

namespace smc {

namespace {
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

Mat3c make_sx() {
  Mat3c m = Mat3c::Zero();
  m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = inv_sqrt2;
  return m;
}
Mat3c make_sy() {
  Mat3c m = Mat3c::Zero();
  m(0, 1) = cplx(0, -inv_sqrt2);
  m(1, 0) = cplx(0, inv_sqrt2);
  m(1, 2) = cplx(0, -inv_sqrt2);
  m(2, 1) = cplx(0, inv_sqrt2);
  return m;
}
Mat3c make_sz() {
  Mat3c m = Mat3c::Zero();
  m(0, 0) = 1.0;
  m(2, 2) = -1.0;
  return m;
}
}  // namespace

const Mat3c& spin1_sx() {
  static const Mat3c m = make_sx();
  return m;
}
const Mat3c& spin1_sy() {
  static const Mat3c m = make_sy();
  return m;
}
const Mat3c& spin1_sz() {
  static const Mat3c m = make_sz();
  return m;
}

void SpinConstants::validate() const {
  if (!(d_zfs_hz > 0.0) || !(gamma_e_hz_per_t > 0.0)) {
    throw InvalidInput("SpinConstants: d_zfs and gamma_e must be positive");
  }
}

NvAxis::NvAxis(const Vec3& n) : n_(n) {
  if (!n.allFinite() || std::abs(n.norm() - 1.0) > 1e-12) {
    throw InvalidInput("NvAxis: direction must be a unit vector");
  }
}

NvAxis NvAxis::from_direction(const Vec3& v) {
  double n = v.norm();
  if (!(n > 0.0) || !v.allFinite()) throw InvalidInput("NvAxis: zero or non-finite direction");
  return NvAxis(Vec3(v / n));
}

DensityMatrix DensityMatrix::from_matrix(const Mat3c& rho) {
  if (!rho.allFinite()) throw InvalidInput("DensityMatrix: non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw InvalidInput("DensityMatrix: not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > 1e-12 || std::abs(rho.trace().imag()) > 1e-12) {
    throw InvalidInput("DensityMatrix: trace must be 1");
  }
  EigenSystem3 es = eigensolve_hermitian3(rho);
  if (es.values(0) < -1e-10) throw InvalidInput("DensityMatrix: negative eigenvalue");
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

DensityMatrix DensityMatrix::pure(BareState s) {
  Mat3c m = Mat3c::Zero();
  m(int(s), int(s)) = 1.0;
  return DensityMatrix(m);
}

DensityMatrix DensityMatrix::thermal() {
  return DensityMatrix(Mat3c::Identity() / 3.0);
}

Mat3c build_hamiltonian(const FieldVector& field_t, const NvAxis& axis,
                        const SpinConstants& constants) {
  constants.validate();
  if (!field_t.allFinite()) throw InvalidInput("build_hamiltonian: non-finite field");
  Mat3 frame = orthonormal_frame(axis.n());
  const double bx = field_t.dot(frame.col(0));
  const double by = field_t.dot(frame.col(1));
  const double bz = field_t.dot(frame.col(2));
  const double g = constants.gamma_e_hz_per_t;
  return constants.d_zfs_hz * (spin1_sz() * spin1_sz()) +
         g * (bx * spin1_sx() + by * spin1_sy() + bz * spin1_sz());
}

TransitionFrequencies transition_frequencies(const Mat3c& hamiltonian_hz) {
  EigenSystem3 es = eigensolve_hermitian3(hamiltonian_hz);
  int label_of[3] = {-1, -1, -1};  // bare index -> eigenstate index
  for (int k = 0; k < 3; ++k) {
    int bare = 0;
    double best = -1.0;
    for (int b = 0; b < 3; ++b) {
      double w = std::norm(es.vectors(b, k));
      if (w > best) {
        best = w;
        bare = b;
      }
    }
    if (label_of[bare] >= 0) {
      throw NumericsError(
          "transition_frequencies: degenerate labeling, two eigenstates map to "
          "the same bare state");
    }
    label_of[bare] = k;
  }
  TransitionFrequencies out;
  const double e0 = es.values(label_of[int(BareState::zero)]);
  out.f_minus_hz = es.values(label_of[int(BareState::minus)]) - e0;
  out.f_plus_hz = es.values(label_of[int(BareState::plus)]) - e0;
  return out;
}

double spin_torque(const DensityMatrix& rho, const FieldVector& field_t,
                   const NvAxis& axis, const Vec3& rotation_axis,
                   const SpinConstants& constants) {
  constants.validate();
  if (!rotation_axis.allFinite() || std::abs(rotation_axis.norm() - 1.0) > 1e-12) {
    throw InvalidInput("spin_torque: rotation_axis must be a unit vector");
  }
  if (!field_t.allFinite()) throw InvalidInput("spin_torque: non-finite field");
  // Rotating the crystal by theta about r is, in the co-rotating frame that
  // carries the basis, a rotation of the field by -theta. Only the Zeeman term
  // depends on theta there, so dH/dtheta = -gamma_e ((r x B) . S').
  Mat3 frame = orthonormal_frame(axis.n());
  Vec3 g_lab = rotation_axis.cross(field_t);
  const double gx = g_lab.dot(frame.col(0));
  const double gy = g_lab.dot(frame.col(1));
  const double gz = g_lab.dot(frame.col(2));
  Mat3c dh = -constants.gamma_e_hz_per_t *
             (gx * spin1_sx() + gy * spin1_sy() + gz * spin1_sz());
  const double trace = (rho.rho() * dh).trace().real();
  return -hbar * 2.0 * pi * trace;
}

double per_spin_torque_scale(double field_magnitude_t, const SpinConstants& constants) {
  constants.validate();
  if (!(field_magnitude_t >= 0.0)) {
    throw InvalidInput("per_spin_torque_scale: field magnitude must be >= 0");
  }
  return hbar * 2.0 * pi * constants.gamma_e_hz_per_t * field_magnitude_t;
}

}  // namespace smc
