#pragma once

// Two-mode Gaussian test states built from elementary symplectic maps
// (vacuum variance 1/2, quadrature order X1, Y1, X2, Y2).

#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace magsteer::testing {

using Mat4 = Eigen::Matrix4d;

inline Mat4 two_mode_squeezed_vacuum(double s) {
  Mat4 sigma = Mat4::Zero();
  const double c = std::cosh(2 * s) / 2;
  const double sh = std::sinh(2 * s) / 2;
  sigma.diagonal().setConstant(c);
  sigma(0, 2) = sigma(2, 0) = sh;
  sigma(1, 3) = sigma(3, 1) = -sh;
  return sigma;
}

inline Mat4 local_rotation(double a1, double a2) {
  Mat4 r = Mat4::Zero();
  r.block<2, 2>(0, 0) << std::cos(a1), -std::sin(a1), std::sin(a1), std::cos(a1);
  r.block<2, 2>(2, 2) << std::cos(a2), -std::sin(a2), std::sin(a2), std::cos(a2);
  return r;
}

inline Mat4 local_squeezer(double s1, double s2) {
  Eigen::Vector4d d(std::exp(-s1), std::exp(s1), std::exp(-s2), std::exp(s2));
  return d.asDiagonal();
}

inline Mat4 beam_splitter(double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  Mat4 b = Mat4::Zero();
  b(0, 0) = b(1, 1) = b(2, 2) = b(3, 3) = c;
  b(0, 2) = b(1, 3) = s;
  b(2, 0) = b(3, 1) = -s;
  return b;
}

inline Mat4 two_mode_squeezer(double s) {
  const double c = std::cosh(s);
  const double sh = std::sinh(s);
  Mat4 t = Mat4::Zero();
  t.diagonal().setConstant(c);
  t(0, 2) = t(2, 0) = sh;
  t(1, 3) = t(3, 1) = -sh;
  return t;
}

/// Random physical two-mode state: thermal symplectic spectrum dressed by a
/// random chain of symplectic maps.
inline Mat4 random_two_mode_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  std::uniform_real_distribution<double> sq(-1.0, 1.0);
  std::uniform_real_distribution<double> nu(0.5, 3.0);
  const double n1 = nu(rng);
  const double n2 = nu(rng);
  Mat4 sigma = Eigen::Vector4d(n1, n1, n2, n2).asDiagonal();
  const Mat4 s = local_rotation(angle(rng), angle(rng)) *
                 local_squeezer(sq(rng), sq(rng)) * beam_splitter(angle(rng)) *
                 two_mode_squeezer(1.2 * sq(rng)) *
                 local_rotation(angle(rng), angle(rng));
  return s * sigma * s.transpose();
}

/// Exchanges the two modes.
inline Mat4 swap_modes(const Mat4& sigma) {
  Mat4 p = Mat4::Zero();
  p(0, 2) = p(1, 3) = p(2, 0) = p(3, 1) = 1;
  return p * sigma * p.transpose();
}

}  // namespace magsteer::testing
