#pragma once

// Correlation measures on the steady-state covariance matrix: quadrature
// squeezing, logarithmic negativity, Gaussian steering and populations.

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "magsteer/dynamics.hpp"
#include "magsteer/errors.hpp"

namespace magsteer {

/// Zero-point variance of a quadrature for x = (a^dag + a)/sqrt(2).
inline constexpr double kVacuumVariance = 0.5;

/// det Sigma_r below this (kappa_a units) is treated as degenerate.
inline constexpr double kDegenerateDet = 1e-14;

enum class Mode : int { kCavity = 0, kMagnon1 = 1, kMagnon2 = 2 };
enum class SteeringDirection { kOneToTwo, kTwoToOne };

template <typename Scalar = double>
struct ReducedCM {
  Matrix4<Scalar> sigma_r;

  auto block1() const { return sigma_r.template topLeftCorner<2, 2>(); }
  auto block2() const { return sigma_r.template bottomRightCorner<2, 2>(); }
  auto block_c() const { return sigma_r.template topRightCorner<2, 2>(); }
};

template <typename Derived>
typename Derived::Scalar det2(const Eigen::MatrixBase<Derived>& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

/// Laplace expansion along the first two rows.
template <typename Derived>
typename Derived::Scalar det4(const Eigen::MatrixBase<Derived>& m) {
  auto minor_top = [&](int c0, int c1) {
    return m(0, c0) * m(1, c1) - m(0, c1) * m(1, c0);
  };
  auto minor_bottom = [&](int c0, int c1) {
    return m(2, c0) * m(3, c1) - m(2, c1) * m(3, c0);
  };
  return minor_top(0, 1) * minor_bottom(2, 3) -
         minor_top(0, 2) * minor_bottom(1, 3) +
         minor_top(0, 3) * minor_bottom(1, 2) +
         minor_top(1, 2) * minor_bottom(0, 3) -
         minor_top(1, 3) * minor_bottom(0, 2) +
         minor_top(2, 3) * minor_bottom(0, 1);
}

template <typename Derived>
auto reduce_cm(const Eigen::MatrixBase<Derived>& sigma, Mode first,
               Mode second) {
  using Scalar = typename Derived::Scalar;
  const int i = static_cast<int>(first);
  const int j = static_cast<int>(second);
  if (i == j || i < 0 || j < 0 || 2 * i + 1 >= sigma.rows() ||
      2 * j + 1 >= sigma.rows()) {
    throw std::out_of_range("reduce_cm: mode indices must be distinct and valid");
  }
  const int idx[4] = {2 * i, 2 * i + 1, 2 * j, 2 * j + 1};
  ReducedCM<Scalar> out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out.sigma_r(r, c) = sigma(idx[r], idx[c]);
  return out;
}

template <typename Scalar>
ReducedCM<Scalar> reduce_cm(const CovarianceMatrix<Scalar>& cm,
                            Mode first = Mode::kMagnon1,
                            Mode second = Mode::kMagnon2) {
  return reduce_cm(cm.sigma, first, second);
}

/// Squeezing in dB of the quadrature at `index`, relative to vacuum.
template <typename Derived>
double squeezing_db(const Eigen::MatrixBase<Derived>& sigma, int index) {
  const double variance = static_cast<double>(sigma(index, index));
  if (!(variance > 0.0)) {
    throw NonPositiveVariance("squeezing_db: variance must be positive");
  }
  return -10.0 * std::log10(variance / kVacuumVariance);
}

/// -ln(2 mu_-) before clamping; positive iff the two modes are entangled.
template <typename Scalar>
double log_negativity_raw(const ReducedCM<Scalar>& sr) {
  const double d1 = det2(sr.block1());
  const double d2 = det2(sr.block2());
  const double dc = det2(sr.block_c());
  const double dr = det4(sr.sigma_r);
  const double tilde = d1 + d2 - 2.0 * dc;
  double disc = tilde * tilde - 4.0 * dr;
  if (disc < 0.0) {
    if (disc < -1e-10 * std::max(1.0, tilde * tilde)) {
      throw ComplexEigenvalue("log_negativity: negative discriminant");
    }
    disc = 0.0;
  }
  const double mu_sq = (tilde - std::sqrt(disc)) / 2.0;
  if (!(mu_sq > 0.0)) {
    throw ComplexEigenvalue("log_negativity: non-positive symplectic eigenvalue");
  }
  return -0.5 * std::log(4.0 * mu_sq);
}

template <typename Scalar>
double log_negativity(const ReducedCM<Scalar>& sr) {
  return std::max(0.0, log_negativity_raw(sr));
}

template <typename Scalar>
double gaussian_steering_raw(const ReducedCM<Scalar>& sr,
                             SteeringDirection direction) {
  const double dr = det4(sr.sigma_r);
  if (!(dr > 0.0)) {
    throw DegenerateCM("gaussian_steering: det Sigma_r must be positive");
  }
  const double steering_det = direction == SteeringDirection::kOneToTwo
                                  ? det2(sr.block1())
                                  : det2(sr.block2());
  return 0.5 * std::log(steering_det / (4.0 * dr));
}

template <typename Scalar>
double gaussian_steering(const ReducedCM<Scalar>& sr,
                         SteeringDirection direction) {
  return std::max(0.0, gaussian_steering_raw(sr, direction));
}

inline double steering_asymmetry(double g12, double g21) {
  return std::abs(g12 - g21);
}

struct Populations {
  double n_a = 0.0;
  double n_1 = 0.0;
  double n_2 = 0.0;
};

/// <m^dag m> = (<X^2> + <Y^2> - 1)/2 per mode; unclamped.
template <typename Derived>
Populations populations(const Eigen::MatrixBase<Derived>& sigma) {
  auto occ = [&](int k) {
    return (static_cast<double>(sigma(2 * k, 2 * k)) +
            static_cast<double>(sigma(2 * k + 1, 2 * k + 1)) - 1.0) /
           2.0;
  };
  return {occ(0), occ(1), occ(2)};
}

struct MomentCriterion {
  bool one_to_two = false;
  bool two_to_one = false;
  std::complex<double> cross_moment;
};

/// Moment-based steering test between the magnons:
/// |<m1 m2>| > sqrt(<m2^dag m2>(<m1^dag m1> + 1/2)) for 1 -> 2 and the
/// index-swapped inequality for 2 -> 1. <m1 m2> is rebuilt from the
/// inter-mode block of a zero-mean Gaussian state.
template <typename Derived>
MomentCriterion moment_steering_criterion(
    const Eigen::MatrixBase<Derived>& sigma) {
  const auto pops = populations(sigma);
  const double n1 = std::max(0.0, pops.n_1);
  const double n2 = std::max(0.0, pops.n_2);
  const double x1x2 = sigma(2, 4);
  const double y1y2 = sigma(3, 5);
  const double x1y2 = sigma(2, 5);
  const double y1x2 = sigma(3, 4);
  MomentCriterion out;
  out.cross_moment = {0.5 * (x1x2 - y1y2), 0.5 * (x1y2 + y1x2)};
  const double mag = std::abs(out.cross_moment);
  out.one_to_two = mag > std::sqrt(n2 * (n1 + 0.5));
  out.two_to_one = mag > std::sqrt(n1 * (n2 + 0.5));
  return out;
}

struct MetricsRecord {
  double s_x1 = 0.0;
  double s_y1 = 0.0;
  double s_x2 = 0.0;
  double s_y2 = 0.0;
  double e12 = 0.0;
  double g12 = 0.0;
  double g21 = 0.0;
  double gs = 0.0;
  double pop_a = 0.0;
  double pop_1 = 0.0;
  double pop_2 = 0.0;
  bool stable = false;
  double margin = 0.0;
  // Signed values before the max[0, .] clamp; used by threshold searches.
  double e12_raw = 0.0;
  double g12_raw = 0.0;
  double g21_raw = 0.0;
};

/// All magnon-pair measures for one steady state.
template <typename Derived>
MetricsRecord compute_metrics(const Eigen::MatrixBase<Derived>& sigma,
                              const StabilityReport& report) {
  MetricsRecord rec;
  rec.stable = report.is_stable;
  rec.margin = report.margin;
  rec.s_x1 = squeezing_db(sigma, 2);
  rec.s_y1 = squeezing_db(sigma, 3);
  rec.s_x2 = squeezing_db(sigma, 4);
  rec.s_y2 = squeezing_db(sigma, 5);

  const auto sr = reduce_cm(sigma, Mode::kMagnon1, Mode::kMagnon2);
  rec.e12_raw = log_negativity_raw(sr);
  rec.g12_raw = gaussian_steering_raw(sr, SteeringDirection::kOneToTwo);
  rec.g21_raw = gaussian_steering_raw(sr, SteeringDirection::kTwoToOne);
  rec.e12 = std::max(0.0, rec.e12_raw);
  rec.g12 = std::max(0.0, rec.g12_raw);
  rec.g21 = std::max(0.0, rec.g21_raw);
  rec.gs = steering_asymmetry(rec.g12, rec.g21);

  const auto pops = populations(sigma);
  rec.pop_a = std::max(0.0, pops.n_a);
  rec.pop_1 = std::max(0.0, pops.n_1);
  rec.pop_2 = std::max(0.0, pops.n_2);
  return rec;
}

}  // namespace magsteer
