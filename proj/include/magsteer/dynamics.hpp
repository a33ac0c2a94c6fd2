#pragma once

// Linearized quadrature dynamics dv/dt = A v + n and its Gaussian steady
// state A Sigma + Sigma A^T = -F. Quadrature ordering throughout is
// (x_a, y_a, X_1, Y_1, X_2, Y_2) with x = (a^dag + a)/sqrt(2), so the vacuum
// has variance 1/2.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <ostream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include "magsteer/errors.hpp"
#include "magsteer/model.hpp"

namespace magsteer {

inline constexpr int kNumQuadratures = 6;

template <typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;
template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// Spectral-abscissa tolerance, kappa_a units.
inline constexpr double kStabilityEpsilon = 1e-10;

template <typename Scalar = double>
struct DriftMatrix {
  Matrix6<Scalar> a;
};

template <typename Scalar = double>
struct DiffusionMatrix {
  Matrix6<Scalar> f;
};

template <typename Scalar = double>
struct CovarianceMatrix {
  Matrix6<Scalar> sigma;
};

template <typename Scalar = double>
DriftMatrix<Scalar> drift_matrix(const SystemSpec& spec) {
  const Scalar ka = 1;
  const Scalar k1 = spec.kappa_1;
  const Scalar k2 = spec.kappa_2;
  const Scalar g1 = spec.gamma_1;
  const Scalar g2 = spec.gamma_2;
  const Scalar da = spec.delta_a();
  const Scalar d1 = spec.delta_1();
  const Scalar d2 = spec.delta_2();
  const Scalar gain_cos = 2 * Scalar(spec.lambda_opa) * std::cos(spec.phi_opa);
  const Scalar gain_sin = 2 * Scalar(spec.lambda_opa) * std::sin(spec.phi_opa);

  DriftMatrix<Scalar> out;
  // clang-format off
  out.a << -ka + gain_cos,  da + gain_sin,  0,   g1,  0,   g2,
           -da + gain_sin, -ka - gain_cos, -g1,  0,  -g2,  0,
            0,              g1,            -k1,  d1,  0,   0,
           -g1,             0,             -d1, -k1,  0,   0,
            0,              g2,             0,   0,  -k2,  d2,
           -g2,             0,              0,   0,  -d2, -k2;
  // clang-format on
  return out;
}

/// Noise input covariance. The off-diagonal cavity entry
/// beta = i(M* - M) kappa_a = 2 kappa_a Im(M) is real for every theta.
template <typename Scalar = double>
DiffusionMatrix<Scalar> diffusion_matrix(const SystemSpec& spec,
                                         const BathMoments& bath) {
  const Scalar ka = 1;
  const Scalar two_re_m = 2 * bath.big_m.real();
  const Scalar alpha_plus = (two_re_m + 2 * bath.big_n + 1) * ka;
  const Scalar alpha_minus = (-two_re_m + 2 * bath.big_n + 1) * ka;
  const Scalar beta = 2 * bath.big_m.imag() * ka;

  DiffusionMatrix<Scalar> out;
  out.f.setZero();
  out.f(0, 0) = alpha_plus;
  out.f(1, 1) = alpha_minus;
  out.f(0, 1) = beta;
  out.f(1, 0) = beta;
  const Scalar m1 = Scalar(spec.kappa_1) * (2 * bath.n_1 + 1);
  const Scalar m2 = Scalar(spec.kappa_2) * (2 * bath.n_2 + 1);
  out.f(2, 2) = m1;
  out.f(3, 3) = m1;
  out.f(4, 4) = m2;
  out.f(5, 5) = m2;
  return out;
}

struct StabilityReport {
  bool is_stable = false;
  /// |margin| below kStabilityEpsilon: neither reliably stable nor unstable.
  bool marginal = false;
  /// Largest real part among the drift eigenvalues, kappa_a units.
  double margin = 0.0;
};

template <typename Derived>
double spectral_abscissa(const Eigen::MatrixBase<Derived>& a) {
  using Plain = Eigen::Matrix<double, Derived::RowsAtCompileTime,
                              Derived::ColsAtCompileTime>;
  Eigen::EigenSolver<Plain> solver(a.template cast<double>(), false);
  if (solver.info() != Eigen::Success) {
    throw std::logic_error("spectral_abscissa: eigenvalue solver diverged");
  }
  return solver.eigenvalues().real().maxCoeff();
}

template <typename Scalar>
StabilityReport stability(const DriftMatrix<Scalar>& drift) {
  StabilityReport report;
  report.margin = spectral_abscissa(drift.a);
  report.is_stable = report.margin < -kStabilityEpsilon;
  report.marginal = std::abs(report.margin) < kStabilityEpsilon;
  return report;
}

/// ||A Sigma + Sigma A^T + F||_F / ||F||_F.
template <typename DA, typename DF, typename DS>
double lyapunov_residual(const Eigen::MatrixBase<DA>& a,
                         const Eigen::MatrixBase<DF>& f,
                         const Eigen::MatrixBase<DS>& sigma) {
  const auto res = (a * sigma + sigma * a.transpose() + f).eval();
  return static_cast<double>(res.norm() / f.norm());
}

template <typename Scalar>
double lyapunov_residual(const DriftMatrix<Scalar>& drift,
                         const DiffusionMatrix<Scalar>& diffusion,
                         const CovarianceMatrix<Scalar>& cm) {
  return lyapunov_residual(drift.a, diffusion.f, cm.sigma);
}

/// Solves A X + X A^T = -F for square fixed-size A through the vectorized
/// system (I (x) A + A (x) I) vec(X) = -vec(F), dense LU with partial
/// pivoting plus one refinement sweep. Cost grows as n^6; fine for n = 6.
template <typename DA, typename DF>
auto solve_lyapunov(const Eigen::MatrixBase<DA>& a,
                    const Eigen::MatrixBase<DF>& f) {
  using Scalar = typename DA::Scalar;
  constexpr int n = DA::RowsAtCompileTime;
  static_assert(n != Eigen::Dynamic, "solve_lyapunov expects fixed-size input");
  constexpr int nn = n * n;
  using Square = Eigen::Matrix<Scalar, n, n>;
  using Big = Eigen::Matrix<Scalar, nn, nn>;
  using Vec = Eigen::Matrix<Scalar, nn, 1>;

  Big kron = Big::Zero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // (I (x) A): block (i,i) = A; (A (x) I): block (i,j) = a_ij I.
      if (i == j) kron.template block<n, n>(i * n, i * n) += a;
      kron.template block<n, n>(i * n, j * n).diagonal().array() += a(i, j);
    }
  }
  Square rhs_mat = -f;
  const Vec rhs = Eigen::Map<const Vec>(rhs_mat.data());

  Eigen::PartialPivLU<Big> lu(kron);
  if (!(lu.rcond() > Scalar(1e-14))) {
    throw SingularSolve("solve_lyapunov: vectorized system is singular");
  }
  Vec x = lu.solve(rhs);
  x += lu.solve((rhs - kron * x).eval());

  Square out = Eigen::Map<const Square>(x.data());
  return Square((out + out.transpose()) / Scalar(2));
}

template <typename Scalar>
CovarianceMatrix<Scalar> steady_state_cm(
    const DriftMatrix<Scalar>& drift,
    const DiffusionMatrix<Scalar>& diffusion) {
  const auto report = stability(drift);
  if (!report.is_stable) {
    throw UnstableSystem("steady_state_cm: drift matrix is not stable",
                         report.margin);
  }
  return {solve_lyapunov(drift.a, diffusion.f)};
}

struct IntegrationOptions {
  double tol = 1e-11;
  std::size_t max_steps = 2'000'000;
  // The stepper runs at its stability limit near convergence, so the floor
  // of ||dSigma/dt|| scales with rel_err ||A|| ||Sigma||; keep rel_err well
  // below tol.
  double abs_err = 1e-15;
  double rel_err = 1e-13;
};

/// Time-domain route to the steady state: integrates
/// dSigma/dt = A Sigma + Sigma A^T + F from the vacuum (Sigma = I/2) with an
/// adaptive Dormand-Prince stepper until ||dSigma/dt||_F < tol ||F||_F.
template <typename Scalar>
CovarianceMatrix<Scalar> integrate_to_steady_state(
    const DriftMatrix<Scalar>& drift, const DiffusionMatrix<Scalar>& diffusion,
    const IntegrationOptions& options = {}) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<Scalar, 36>;
  using Mat = Matrix6<Scalar>;
  const Mat& a = drift.a;
  const Mat& f = diffusion.f;

  auto rhs = [&](const State& s, State& ds, double /*t*/) {
    Eigen::Map<const Mat> sigma(s.data());
    Eigen::Map<Mat> out(ds.data());
    out.noalias() = a * sigma;
    out.noalias() += sigma * a.transpose();
    out += f;
  };

  State state;
  Eigen::Map<Mat>(state.data()) = Mat::Identity() / Scalar(2);
  auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(
      options.abs_err, options.rel_err);

  const Scalar target = Scalar(options.tol) * f.norm();
  State deriv;
  double t = 0.0;
  double dt = 1e-3;
  for (std::size_t step = 0; step < options.max_steps; ++step) {
    rhs(state, deriv, t);
    const Eigen::Map<const Mat> dsigma(deriv.data());
    const Eigen::Map<const Mat> sigma(state.data());
    const Scalar norm = sigma.norm();
    if (!std::isfinite(static_cast<double>(norm)) || norm > Scalar(1e100)) {
      throw MaxStepsExceeded("integrate_to_steady_state: covariance diverged",
                             static_cast<double>(norm));
    }
    if (dsigma.norm() < target) {
      const Mat out = sigma;
      return {(out + out.transpose()) / Scalar(2)};
    }
    // Failed trials shrink dt and are retried on the next iteration.
    stepper.try_step(rhs, state, t, dt);
  }
  throw MaxStepsExceeded(
      "integrate_to_steady_state: step budget exhausted",
      static_cast<double>(Eigen::Map<const Mat>(state.data()).norm()));
}

/// Block-diagonal symplectic form with 2x2 blocks [[0, 1], [-1, 0]].
template <typename Scalar = double, int N = 6>
Eigen::Matrix<Scalar, N, N> symplectic_form() {
  static_assert(N % 2 == 0);
  Eigen::Matrix<Scalar, N, N> omega = Eigen::Matrix<Scalar, N, N>::Zero();
  for (int k = 0; k < N; k += 2) {
    omega(k, k + 1) = 1;
    omega(k + 1, k) = -1;
  }
  return omega;
}

/// Smallest eigenvalue of the Hermitian matrix Sigma + (i/2) Omega. A
/// covariance matrix is physical (obeys the uncertainty principle) iff this
/// is non-negative.
template <typename Derived>
double uncertainty_min_eigenvalue(const Eigen::MatrixBase<Derived>& sigma) {
  constexpr int n = Derived::RowsAtCompileTime;
  using Complex = Eigen::Matrix<std::complex<double>, n, n>;
  const Eigen::Matrix<double, n, n> s = sigma.template cast<double>();
  Complex h = s.template cast<std::complex<double>>();
  h += std::complex<double>(0.0, 0.5) *
       symplectic_form<double, n>().template cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Complex> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

template <typename Derived>
bool is_physical(const Eigen::MatrixBase<Derived>& sigma, double tol = 1e-9) {
  return uncertainty_min_eigenvalue(sigma) >= -tol;
}

/// Row-major CSV dump with 17 significant digits, for debugging.
template <typename Derived>
void write_matrix_csv(std::ostream& os, const Eigen::MatrixBase<Derived>& m) {
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(m(i, j)));
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
}

}  // namespace magsteer
