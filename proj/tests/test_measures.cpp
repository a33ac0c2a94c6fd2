#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "gaussian_states.hpp"
#include "magsteer/measures.hpp"

using namespace magsteer;
using namespace magsteer::testing;

namespace {

ReducedCM<double> wrap(const Mat4& m) { return ReducedCM<double>{m}; }

Matrix6<double> embed(const Mat4& magnons) {
  Matrix6<double> sigma = Matrix6<double>::Identity() / 2;
  sigma.bottomRightCorner<4, 4>() = magnons;
  return sigma;
}

CovarianceMatrix<double> steady(double r, double lambda) {
  SystemSpec spec = default_spec();
  spec.squeeze_r = r;
  spec.lambda_opa = lambda;
  return steady_state_cm(drift_matrix(spec),
                         diffusion_matrix(spec, bath_moments(spec)));
}

}  // namespace

TEST_CASE("closed-form determinants") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int i = 0; i < 50; ++i) {
    Mat4 m;
    for (int k = 0; k < 16; ++k) m(k / 4, k % 4) = g(rng);
    CHECK(det4(m) == doctest::Approx(m.determinant()).epsilon(1e-11));
    CHECK(det2(m.topLeftCorner<2, 2>()) ==
          doctest::Approx(m.topLeftCorner<2, 2>().determinant()).epsilon(1e-13));
  }
}

TEST_CASE("reduce_cm picks the requested modes") {
  Matrix6<double> sigma;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) sigma(i, j) = 10 * std::min(i, j) + std::max(i, j);
  const auto sr = reduce_cm(sigma, Mode::kMagnon1, Mode::kMagnon2);
  CHECK(sr.sigma_r == sigma.bottomRightCorner<4, 4>());

  const auto vac = reduce_cm(Matrix6<double>(Matrix6<double>::Identity() / 2),
                             Mode::kMagnon1, Mode::kMagnon2);
  CHECK(vac.sigma_r == Mat4::Identity() / 2);
  CHECK(vac.block_c().isZero(0.0));

  const auto swapped = reduce_cm(sigma, Mode::kMagnon2, Mode::kMagnon1);
  CHECK(swapped.block1() == sr.block2());
  CHECK(swapped.block2() == sr.block1());
  CHECK(Matrix2<double>(swapped.block_c()) == Matrix2<double>(sr.block_c().transpose()));

  const auto cav = reduce_cm(sigma, Mode::kCavity, Mode::kMagnon2);
  CHECK(cav.sigma_r(0, 3) == sigma(0, 5));

  CHECK_THROWS_AS(reduce_cm(sigma, Mode::kMagnon1, Mode::kMagnon1), std::out_of_range);
  CHECK_THROWS_AS(reduce_cm(sigma, Mode::kMagnon1, static_cast<Mode>(3)),
                  std::out_of_range);
}

TEST_CASE("squeezing in dB") {
  Matrix6<double> sigma = Matrix6<double>::Identity() / 2;
  CHECK(squeezing_db(sigma, 2) == 0.0);
  sigma(2, 2) = 0.25;
  CHECK(squeezing_db(sigma, 2) == doctest::Approx(10 * std::log10(2.0)).epsilon(1e-14));
  CHECK(squeezing_db(sigma, 2) == doctest::Approx(3.0103).epsilon(1e-4));
  sigma(3, 3) = 0.2;
  CHECK(squeezing_db(sigma, 3) > squeezing_db(sigma, 2));
  sigma(4, 4) = 0.0;
  CHECK_THROWS_AS(squeezing_db(sigma, 4), NonPositiveVariance);
  sigma(4, 4) = -1.0;
  CHECK_THROWS_AS(squeezing_db(sigma, 4), NonPositiveVariance);
}

TEST_CASE("product vacuum has no correlations") {
  const auto sr = wrap(Mat4::Identity() / 2);
  CHECK(log_negativity_raw(sr) == 0.0);
  CHECK(log_negativity(sr) == 0.0);
  CHECK(gaussian_steering(sr, SteeringDirection::kOneToTwo) == 0.0);
  CHECK(gaussian_steering(sr, SteeringDirection::kTwoToOne) == 0.0);
}

TEST_CASE("two-mode squeezed vacuum analytic values") {
  for (double s : {0.1, 0.5, 1.0, 1.7}) {
    const auto sr = wrap(two_mode_squeezed_vacuum(s));
    CHECK(log_negativity(sr) == doctest::Approx(2 * s).epsilon(1e-10));
    const double g = std::log(std::cosh(2 * s));
    CHECK(gaussian_steering(sr, SteeringDirection::kOneToTwo) ==
          doctest::Approx(g).epsilon(1e-10));
    CHECK(gaussian_steering(sr, SteeringDirection::kTwoToOne) ==
          doctest::Approx(g).epsilon(1e-10));
  }
}

TEST_CASE("unphysical inputs are rejected") {
  Mat4 bad = Mat4::Identity() / 2;
  bad(0, 2) = bad(2, 0) = 0.9;  // |c| > a: det Sigma_r < 0
  CHECK_THROWS_AS(gaussian_steering(wrap(bad), SteeringDirection::kOneToTwo),
                  DegenerateCM);
  CHECK_THROWS_AS(log_negativity(wrap(bad)), ComplexEigenvalue);
  CHECK_THROWS_AS(gaussian_steering(wrap(Mat4::Zero()), SteeringDirection::kTwoToOne),
                  DegenerateCM);
}

TEST_CASE("steering asymmetry") {
  CHECK(steering_asymmetry(0.3, 0.3) == 0.0);
  CHECK(steering_asymmetry(0.5, 0.0) == 0.5);
  CHECK(steering_asymmetry(0.0, 0.5) == 0.5);
}

TEST_CASE("populations") {
  const auto vac = populations(Matrix6<double>(Matrix6<double>::Identity() / 2));
  CHECK(vac.n_a == 0.0);
  CHECK(vac.n_1 == 0.0);
  CHECK(vac.n_2 == 0.0);

  Matrix6<double> thermal = Matrix6<double>::Identity() / 2;
  thermal(2, 2) = thermal(3, 3) = 1.7 + 0.5;
  CHECK(populations(thermal).n_1 == doctest::Approx(1.7));

  const double s = 0.8;
  const auto tmsv = populations(embed(two_mode_squeezed_vacuum(s)));
  CHECK(tmsv.n_1 == doctest::Approx(std::sinh(s) * std::sinh(s)));
  CHECK(tmsv.n_2 == doctest::Approx(std::sinh(s) * std::sinh(s)));
}

TEST_CASE("moment-based steering criterion") {
  const auto vac = moment_steering_criterion(
      Matrix6<double>(Matrix6<double>::Identity() / 2));
  CHECK(std::abs(vac.cross_moment) == 0.0);
  CHECK_FALSE(vac.one_to_two);
  CHECK_FALSE(vac.two_to_one);

  for (double s : {0.05, 0.3, 1.0, 2.0}) {
    const auto c = moment_steering_criterion(embed(two_mode_squeezed_vacuum(s)));
    // Both sides evaluated directly from the analytic CM.
    const double lhs = std::sinh(2 * s) / 2;
    const double n = std::sinh(s) * std::sinh(s);
    CHECK(std::abs(c.cross_moment) == doctest::Approx(lhs).epsilon(1e-12));
    CHECK(lhs > std::sqrt(n * (n + 0.5)));
    CHECK(c.one_to_two);
    CHECK(c.two_to_one);
  }
}

TEST_CASE("random Gaussian states: hierarchy and symmetries") {
  std::mt19937_64 rng(314);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  for (int i = 0; i < 500; ++i) {
    const Mat4 sigma = random_two_mode_state(rng);
    const auto sr = wrap(sigma);
    const double e = log_negativity(sr);
    const double g12 = gaussian_steering(sr, SteeringDirection::kOneToTwo);
    const double g21 = gaussian_steering(sr, SteeringDirection::kTwoToOne);
    CHECK(e >= 0.0);
    if (g12 > 0.0 || g21 > 0.0) CHECK(e > 0.0);

    const auto swapped = wrap(swap_modes(sigma));
    CHECK(gaussian_steering(swapped, SteeringDirection::kOneToTwo) ==
          doctest::Approx(g21).epsilon(1e-12));
    CHECK(gaussian_steering(swapped, SteeringDirection::kTwoToOne) ==
          doctest::Approx(g12).epsilon(1e-12));
    CHECK(log_negativity(swapped) == doctest::Approx(e).epsilon(1e-12));

    const Mat4 rot = local_rotation(angle(rng), angle(rng));
    const auto rotated = wrap(rot * sigma * rot.transpose());
    CHECK(std::abs(log_negativity(rotated) - e) < 1e-9);
    CHECK(std::abs(gaussian_steering(rotated, SteeringDirection::kOneToTwo) - g12) < 1e-9);
    CHECK(std::abs(gaussian_steering(rotated, SteeringDirection::kTwoToOne) - g21) < 1e-9);
  }
}

TEST_CASE("compute_metrics record invariants") {
  const auto cm = steady(1.0, 0.3);
  StabilityReport report{true, false, -0.2};
  const auto rec = compute_metrics(cm.sigma, report);
  CHECK(rec.gs == std::abs(rec.g12 - rec.g21));
  CHECK(rec.e12 >= 0.0);
  CHECK(rec.g12 >= 0.0);
  CHECK(rec.g21 >= 0.0);
  CHECK(rec.e12 == std::max(0.0, rec.e12_raw));
  CHECK(rec.margin == -0.2);
  const auto sr = reduce_cm(cm);
  CHECK(rec.g12 == gaussian_steering(sr, SteeringDirection::kOneToTwo));
  CHECK(rec.s_x1 == squeezing_db(cm.sigma, 2));
}

TEST_CASE("baseline physics spot checks") {
  SUBCASE("OPA alone entangles but does not steer") {
    const auto sr = reduce_cm(steady(0.0, 0.49));
    CHECK(log_negativity(sr) > 0.0);
    CHECK(gaussian_steering(sr, SteeringDirection::kOneToTwo) == 0.0);
    CHECK(gaussian_steering(sr, SteeringDirection::kTwoToOne) == 0.0);
  }
  SUBCASE("symmetric couplings give equal squeezing and steering") {
    const auto cm = steady(1.5, 0.4);
    const auto rec = compute_metrics(cm.sigma, StabilityReport{true, false, -0.1});
    CHECK(std::abs(rec.s_x1 - rec.s_x2) < 1e-10);
    CHECK(std::abs(rec.g12 - rec.g21) < 1e-10);
    CHECK(rec.gs < 1e-10);
    CHECK(rec.g12 > 0.0);
  }
}
