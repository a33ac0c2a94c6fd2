#pragma once

// Physical parameter space of the two-magnon cavity with an intracavity OPA
// and a squeezed-vacuum drive, plus the derived bath moments.
//
// Unit convention: absolute frequencies (omega_*) are angular, in rad/s.
// kappa_a is the cavity linewidth in rad/s and is the rate unit; every other
// rate (kappa_k, gamma_k, lambda_opa, detunings) is dimensionless in units of
// kappa_a.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "magsteer/errors.hpp"
#include "magsteer/units.hpp"

namespace magsteer {

struct SystemSpec {
  double omega_a = units::ghz_to_angular(10.0);
  double omega_1 = units::ghz_to_angular(10.0);
  double omega_2 = units::ghz_to_angular(10.0);
  double omega_s = units::ghz_to_angular(10.0);

  double kappa_a = units::mhz_to_angular(5.0);  // rad/s
  double kappa_1 = 0.2;
  double kappa_2 = 0.2;
  double gamma_1 = 4.0;
  double gamma_2 = 4.0;
  double lambda_opa = 0.0;
  double phi_opa = 0.0;

  double squeeze_r = 0.0;
  double squeeze_theta = 0.0;
  double temperature = 0.02;  // K

  // Detunings are always recomputed from their parent frequencies.
  double delta_a() const { return (omega_a - omega_s) / kappa_a; }
  double delta_1() const { return (omega_1 - omega_s) / kappa_a; }
  double delta_2() const { return (omega_2 - omega_s) / kappa_a; }

  bool operator==(const SystemSpec&) const = default;
};

struct BathMoments {
  double n_a = 0.0;
  double n_1 = 0.0;
  double n_2 = 0.0;
  double big_n = 0.0;
  std::complex<double> big_m{0.0, 0.0};
};

/// Bose-Einstein occupation 1/(exp(hbar omega / k_B T) - 1); T = 0 maps to 0.
template <typename Scalar = double>
Scalar thermal_occupancy(Scalar omega, Scalar temperature) {
  using std::expm1;
  if (!(omega > Scalar(0))) {
    throw InvalidSpec("thermal_occupancy: omega must be positive");
  }
  if (temperature < Scalar(0)) {
    throw InvalidSpec("thermal_occupancy: temperature must be non-negative");
  }
  if (temperature == Scalar(0)) return Scalar(0);
  const Scalar x = Scalar(units::kHbar) * omega /
                   (Scalar(units::kBoltzmann) * temperature);
  return Scalar(1) / expm1(x);
}

/// Magnon frequency set by a bias field: omega = gamma_0 B.
inline double frequency_from_field(double field_tesla) {
  if (!(field_tesla > 0.0)) {
    throw InvalidSpec("frequency_from_field: field must be positive");
  }
  return units::kGyromagnetic * field_tesla;
}

inline double field_from_frequency(double omega) {
  if (!(omega > 0.0)) {
    throw InvalidSpec("field_from_frequency: omega must be positive");
  }
  return omega / units::kGyromagnetic;
}

/// Every violated invariant of `spec`, one message per violation.
inline std::vector<std::string> spec_violations(const SystemSpec& spec) {
  std::vector<std::string> out;
  auto require = [&out](bool ok, const char* message) {
    if (!ok) out.emplace_back(message);
  };
  require(spec.omega_a > 0.0, "omega_a must be positive");
  require(spec.omega_1 > 0.0, "omega_1 must be positive");
  require(spec.omega_2 > 0.0, "omega_2 must be positive");
  require(spec.omega_s > 0.0, "omega_s must be positive");
  require(spec.kappa_a > 0.0, "kappa_a must be positive");
  require(spec.kappa_1 > 0.0, "kappa_1 must be positive");
  require(spec.kappa_2 > 0.0, "kappa_2 must be positive");
  require(spec.gamma_1 >= 0.0, "gamma_1 must be non-negative");
  require(spec.gamma_2 >= 0.0, "gamma_2 must be non-negative");
  require(spec.lambda_opa >= 0.0, "lambda must be non-negative");
  require(spec.squeeze_r >= 0.0, "r must be non-negative");
  require(spec.temperature >= 0.0, "temperature must be non-negative");
  require(std::isfinite(spec.phi_opa), "phi must be finite");
  require(std::isfinite(spec.squeeze_theta), "theta must be finite");
  return out;
}

inline void validate(const SystemSpec& spec) {
  const auto violations = spec_violations(spec);
  if (violations.empty()) return;
  std::string message = "invalid SystemSpec:";
  for (const auto& v : violations) message += " " + v + ";";
  throw InvalidSpec(message);
}

inline BathMoments bath_moments(const SystemSpec& spec) {
  validate(spec);
  BathMoments bath;
  bath.n_a = thermal_occupancy(spec.omega_a, spec.temperature);
  bath.n_1 = thermal_occupancy(spec.omega_1, spec.temperature);
  bath.n_2 = thermal_occupancy(spec.omega_2, spec.temperature);

  const double ch = std::cosh(spec.squeeze_r);
  const double sh = std::sinh(spec.squeeze_r);
  bath.big_n = bath.n_a * ch * ch + (bath.n_a + 1.0) * sh * sh;
  bath.big_m = (1.0 + 2.0 * bath.n_a) * ch * sh *
               std::polar(1.0, spec.squeeze_theta);
  return bath;
}

/// Baseline parameter set: all modes at 10 GHz, kappa_a/2pi = 5 MHz,
/// kappa_k = kappa_a/5, Gamma_k = 4 kappa_a, T = 20 mK, zero detunings and
/// phases. Squeezing r and OPA gain are left at zero for the caller.
inline SystemSpec default_spec() { return SystemSpec{}; }

}  // namespace magsteer
