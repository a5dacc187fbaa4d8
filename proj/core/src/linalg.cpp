#include "smc/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "smc/constants.hpp"
#include "smc/errors.hpp"

namespace smc {

namespace {

double hermitian_defect(const Mat3c& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// bilinear cross product (no conjugation); (a x b) . a = 0 for complex rows too
Eigen::Vector3cd cross_bilinear(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
  return Eigen::Vector3cd(a(1) * b(2) - a(2) * b(1),
                          a(2) * b(0) - a(0) * b(2),
                          a(0) * b(1) - a(1) * b(0));
}

// fix the arbitrary global phase: largest-magnitude component made real positive
void fix_phase(Eigen::Ref<Eigen::Vector3cd> v) {
  int imax = 0;
  double best = 0.0;
  for (int i = 0; i < 3; ++i) {
    double a = std::norm(v(i));
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  cplx c = v(imax);
  double a = std::abs(c);
  if (a > 0.0) v *= std::conj(c) / a;
}

// cyclic complex Jacobi sweeps; unconditionally convergent fallback
EigenSystem3 jacobi_hermitian3(Mat3c a) {
  Mat3c v = Mat3c::Identity();
  const double scale = a.cwiseAbs().maxCoeff();
  const double tol = scale > 0.0 ? 1e-16 * scale : 0.0;
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = std::abs(a(0, 1)) + std::abs(a(0, 2)) + std::abs(a(1, 2));
    if (off <= tol) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        cplx apq = a(p, q);
        if (std::abs(apq) == 0.0) continue;
        double app = a(p, p).real();
        double aqq = a(q, q).real();
        // unitary 2x2 rotation diagonalizing the (p,q) block
        double theta = 0.5 * std::atan2(2.0 * std::abs(apq), aqq - app);
        cplx phase = apq / std::abs(apq);
        double c = std::cos(theta), s = std::sin(theta);
        Mat3c r = Mat3c::Identity();
        r(p, p) = c;
        r(p, q) = s * phase;
        r(q, p) = -s * std::conj(phase);
        r(q, q) = c;
        a = r.adjoint() * a * r;
        v = v * r;
      }
    }
  }
  EigenSystem3 out;
  std::array<int, 3> idx = {0, 1, 2};
  Vec3 d(a(0, 0).real(), a(1, 1).real(), a(2, 2).real());
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d(i) < d(j); });
  for (int k = 0; k < 3; ++k) {
    out.values(k) = d(idx[k]);
    out.vectors.col(k) = v.col(idx[k]);
    fix_phase(out.vectors.col(k));
  }
  return out;
}

}  // namespace

Mat3 rotation_about(const Vec3& axis, double angle_rad) {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-12) {
    throw InvalidInput("rotation_about: axis must be a unit vector");
  }
  if (!std::isfinite(angle_rad)) throw InvalidInput("rotation_about: non-finite angle");
  return Eigen::AngleAxisd(angle_rad, axis).toRotationMatrix();
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  Mat3 d = r.transpose() * r - Mat3::Identity();
  return d.cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Mat3 orthonormal_frame(const Vec3& z_axis) {
  if (!z_axis.allFinite() || std::abs(z_axis.norm() - 1.0) > 1e-12) {
    throw InvalidInput("orthonormal_frame: z axis must be a unit vector");
  }
  // cardinal direction least aligned with z', deterministic tie-break by index
  int pivot = 0;
  double best = std::abs(z_axis(0));
  for (int i = 1; i < 3; ++i) {
    double a = std::abs(z_axis(i));
    if (a < best) {
      best = a;
      pivot = i;
    }
  }
  Vec3 e = Vec3::Zero();
  e(pivot) = 1.0;
  Vec3 x = (e - e.dot(z_axis) * z_axis).normalized();
  Vec3 y = z_axis.cross(x);
  Mat3 f;
  f.col(0) = x;
  f.col(1) = y;
  f.col(2) = z_axis;
  return f;
}

EigenSystem3 eigensolve_hermitian3(const Mat3c& m) {
  if (!m.allFinite()) throw InvalidInput("eigensolve_hermitian3: non-finite input");
  const double scale = m.cwiseAbs().maxCoeff();
  if (hermitian_defect(m) > 1e-10 * std::max(scale, 1.0)) {
    throw InvalidInput("eigensolve_hermitian3: input is not Hermitian");
  }
  Mat3c a = 0.5 * (m + m.adjoint());  // symmetrize roundoff

  const double p1 = std::norm(a(0, 1)) + std::norm(a(0, 2)) + std::norm(a(1, 2));
  EigenSystem3 out;
  if (p1 <= 1e-30 * scale * scale || scale == 0.0) {
    // effectively diagonal
    std::array<int, 3> idx = {0, 1, 2};
    Vec3 d(a(0, 0).real(), a(1, 1).real(), a(2, 2).real());
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return d(i) < d(j); });
    out.vectors = Mat3c::Zero();
    for (int k = 0; k < 3; ++k) {
      out.values(k) = d(idx[k]);
      out.vectors(idx[k], k) = 1.0;
    }
    return out;
  }

  // trigonometric solution of the characteristic cubic
  const double q = a.trace().real() / 3.0;
  const double p2 = std::pow(a(0, 0).real() - q, 2) + std::pow(a(1, 1).real() - q, 2) +
                    std::pow(a(2, 2).real() - q, 2) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3c b = (a - q * Mat3c::Identity()) / p;
  double detb = (b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                 b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                 b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0)))
                    .real();
  double r = std::clamp(detb / 2.0, -1.0, 1.0);
  double phi = std::acos(r) / 3.0;
  out.values(2) = q + 2.0 * p * std::cos(phi);
  out.values(0) = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
  out.values(1) = 3.0 * q - out.values(0) - out.values(2);

  // eigenvectors from row cross products of (A - lambda I)
  const double gap01 = out.values(1) - out.values(0);
  const double gap12 = out.values(2) - out.values(1);
  const double degeneracy_tol = 1e-6 * std::max(scale, p);
  if (gap01 < degeneracy_tol || gap12 < degeneracy_tol) {
    return jacobi_hermitian3(a);  // closed form loses the eigenbasis near degeneracy
  }
  for (int k = 0; k < 3; ++k) {
    Mat3c mk = a - out.values(k) * Mat3c::Identity();
    Eigen::Vector3cd r0 = mk.row(0), r1 = mk.row(1), r2 = mk.row(2);
    Eigen::Vector3cd c01 = cross_bilinear(r0, r1);
    Eigen::Vector3cd c02 = cross_bilinear(r0, r2);
    Eigen::Vector3cd c12 = cross_bilinear(r1, r2);
    Eigen::Vector3cd v = c01;
    if (c02.squaredNorm() > v.squaredNorm()) v = c02;
    if (c12.squaredNorm() > v.squaredNorm()) v = c12;
    double n = v.norm();
    if (!(n > 1e-12 * scale * scale)) return jacobi_hermitian3(a);
    out.vectors.col(k) = v / n;
    fix_phase(out.vectors.col(k));
  }

  // orthonormality / reconstruction guard; fall back if the fast path degraded
  Mat3c g = out.vectors.adjoint() * out.vectors - Mat3c::Identity();
  Mat3c rec = out.vectors * out.values.asDiagonal().toDenseMatrix().cast<cplx>() *
              out.vectors.adjoint();
  if (g.cwiseAbs().maxCoeff() > 1e-12 || (rec - a).cwiseAbs().maxCoeff() > 1e-11 * scale) {
    return jacobi_hermitian3(a);
  }
  return out;
}

}  // namespace smc
