#pragma once

// 3-vector / rotation plumbing and a fast 3x3 Hermitian eigensolver.
// Everything else in the library works through these aliases so the
// underlying linear algebra package stays an implementation detail.

#include <Eigen/Dense>
#include <complex>

namespace smc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat3c = Eigen::Matrix3cd;
using cplx = std::complex<double>;

// Rodrigues rotation about a unit axis, right-handed.
// Throws InvalidInput if |axis| deviates from 1 by more than 1e-12.
Mat3 rotation_about(const Vec3& axis, double angle_rad);

// orthogonality / det checks for matrices meant to be rotations
bool is_rotation(const Mat3& r, double tol = 1e-12);

// Deterministic right-handed frame with the given unit vector as its z axis.
// Columns are (x', y', z'). The transverse pivot picks the cardinal direction
// with the smallest |component| along z', so the frame is reproducible.
Mat3 orthonormal_frame(const Vec3& z_axis);

struct EigenSystem3 {
  Vec3 values;    // ascending
  Mat3c vectors;  // columns, orthonormal, phase-fixed
};

// Closed-form (trigonometric cubic) eigensolve with a cyclic-Jacobi fallback
// when the closed form loses accuracy near degeneracies.
// Input must be Hermitian within 1e-10 relative to its norm.
EigenSystem3 eigensolve_hermitian3(const Mat3c& m);

}  // namespace smc
