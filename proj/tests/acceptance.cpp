// Acceptance table. `acceptance` prints one PASS/FAIL line per criterion;
// `acceptance N` runs criterion N alone and exits non-zero if it fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gaussian_states.hpp"
#include "magsteer/dynamics.hpp"
#include "magsteer/experiments.hpp"
#include "magsteer/measures.hpp"
#include "spec_sampler.hpp"

using namespace magsteer;

namespace {

// Every covariance matrix a criterion produces, for the physicality suite.
class Audit {
 public:
  void add(const std::string& origin, const Matrix6<double>& sigma) {
    std::lock_guard lock(mutex_);
    entries_.push_back({origin, sigma, std::nullopt});
  }
  void add(const std::string& origin, const Matrix6<double>& sigma,
           const MetricsRecord& rec) {
    std::lock_guard lock(mutex_);
    entries_.push_back({origin, sigma, rec});
  }

  struct Entry {
    std::string origin;
    Matrix6<double> sigma;
    std::optional<MetricsRecord> record;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::mutex mutex_;
  std::vector<Entry> entries_;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0: no limit
  std::function<Outcome(Audit&)> run;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

SystemSpec baseline(double r, double lambda) {
  SystemSpec spec = default_spec();
  spec.squeeze_r = r;
  spec.lambda_opa = lambda;
  return spec;
}

CovarianceMatrix<double> solve(const SystemSpec& spec) {
  return steady_state_cm(drift_matrix(spec), diffusion_matrix(spec, bath_moments(spec)));
}

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

Outcome vacuum_fixed_point(Audit& audit) {
  SystemSpec spec = baseline(0.0, 0.0);
  spec.temperature = 0.0;
  const auto cm = solve(spec);
  audit.add("vacuum", cm.sigma);
  const double err = (cm.sigma - Matrix6<double>::Identity() / 2).cwiseAbs().maxCoeff();
  const auto rec = evaluate_point(spec);
  bool zeros = rec.stable;
  for (double v : {rec.s_x1, rec.s_y1, rec.s_x2, rec.s_y2, rec.e12, rec.g12, rec.g21,
                   rec.gs, rec.pop_a, rec.pop_1, rec.pop_2}) {
    zeros = zeros && v == 0.0;
  }
  return {err < 1e-12 && zeros,
          fmt("max|Sigma - I/2| = %.3g, metrics exactly zero: %s", err,
              zeros ? "yes" : "no")};
}

Outcome oracle_equivalence(Audit& audit) {
  testing::SpecSampler sampler(20240601, true);
  double worst_diff = 0.0;
  double worst_residual = 0.0;
  for (int i = 0; i < 100; ++i) {
    const SystemSpec spec = sampler.draw_stable();
    const auto a = drift_matrix(spec);
    const auto f = diffusion_matrix(spec, bath_moments(spec));
    const auto direct = steady_state_cm(a, f);
    const auto ode = integrate_to_steady_state(a, f);
    audit.add("oracle/lyapunov", direct.sigma);
    audit.add("oracle/ode", ode.sigma);
    worst_diff = std::max(worst_diff, (direct.sigma - ode.sigma).cwiseAbs().maxCoeff());
    worst_residual = std::max(worst_residual, lyapunov_residual(a, f, direct));
  }
  return {worst_diff < 1e-6 && worst_residual <= 1e-10,
          fmt("100 specs: max |Lyapunov - ODE| = %.3g (< 1e-6), max relative "
              "residual = %.3g (<= 1e-10)",
              worst_diff, worst_residual)};
}

Outcome stability_bound(Audit&) {
  const double lmax = max_stable_gain(baseline(0.0, 0.0), 1e-6);
  return {in_range(lmax, 0.48, 0.50),
          fmt("Lambda_max = %.6f kappa_a, expected [0.48, 0.50]", lmax)};
}

Outcome no_steering_without_drive(Audit&) {
  const SystemSpec base = baseline(0.0, 0.0);
  const double lmax = max_stable_gain(base, 1e-6);
  double worst_g = -INFINITY;
  double e_last = NAN;
  for (int k = 0; k < 20; ++k) {
    SystemSpec s = base;
    s.lambda_opa = lmax * k / 20.0;
    const auto rec = evaluate_point(s);
    worst_g = std::max({worst_g, rec.g12_raw, rec.g21_raw});
    e_last = rec.e12;
  }
  return {worst_g <= 0.0 && e_last > 0.0,
          fmt("r = 0, 20 gains in [0, %.4f): max unclamped G = %.3g (<= 0), "
              "E12 at Lambda = %.4f is %.4f (> 0)",
              lmax, worst_g, lmax * 19 / 20.0, e_last)};
}

Outcome symmetric_degeneracy(Audit&) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> r(0.0, 2.0);
  std::uniform_real_distribution<double> lambda(0.0, 0.49);
  double dg = 0.0;
  double ds = 0.0;
  for (int i = 0; i < 21; ++i) {
    SystemSpec s = baseline(r(rng), lambda(rng));
    s.gamma_2 = s.gamma_1;
    const auto rec = evaluate_point(s);
    dg = std::max(dg, std::abs(rec.g12_raw - rec.g21_raw));
    ds = std::max(ds, std::abs(rec.s_x1 - rec.s_x2));
  }
  return {dg < 1e-10 && ds < 1e-10,
          fmt("21 (r, Lambda) points: max |G12 - G21| = %.3g, max |S_X1 - S_X2| = "
              "%.3g dB",
              dg, ds)};
}

const Axis kRatioAxis{"ratio", 0.5, 2.0, 101};

Outcome peak_ratios(Audit&) {
  const auto rs = fig3_fig4_ratio_sweep(baseline(1.0, 0.49), kRatioAxis, true);
  const double p12 = rs.peak_g12.location;
  const double p21 = rs.peak_g21.location;
  const double reciprocity = std::abs(p12 * p21 - 1.0);
  const bool a = in_range(p12, 0.80, 0.95);
  const bool b = in_range(p21, 1.15, 1.40);
  const bool c = reciprocity <= 0.05;
  return {a && b && c,
          fmt("peak G12 at %.4f [0.80, 0.95] %s; peak G21 at %.4f [1.15, 1.40] %s; "
              "|p12 * p21 - 1| = %.4f (<= 0.05) %s",
              p12, a ? "ok" : "out", p21, b ? "ok" : "out", reciprocity,
              c ? "ok" : "out")};
}

Outcome opa_doubling(Audit&) {
  const auto on = fig3_fig4_ratio_sweep(baseline(1.0, 0.49), kRatioAxis, true);
  const auto off = fig3_fig4_ratio_sweep(baseline(1.0, 0.49), kRatioAxis, false);
  const double g_on = std::max(on.peak_g12.value, on.peak_g21.value);
  const double g_off = std::max(off.peak_g12.value, off.peak_g21.value);
  const double ratio = g_on / g_off;
  return {in_range(ratio, 1.4, 2.6),
          fmt("peak G with OPA %.4f / without %.4f = %.3f, expected [1.4, 2.6]", g_on,
              g_off, ratio)};
}

Outcome thermal_robustness(Audit&) {
  const SystemSpec base = default_spec();
  const double ts =
      1e3 * fig6_temperature_threshold(base, ThresholdMetric::kSteering, 2.0, 0.49);
  const double te =
      1e3 * fig6_temperature_threshold(base, ThresholdMetric::kEntanglement, 2.0, 0.49);
  return {in_range(ts, 270, 370) && in_range(te, 600, 800),
          fmt("steering T_c = %.1f mK [270, 370], entanglement T_c = %.1f mK [600, 800]",
              ts, te)};
}

Outcome mode_swap(Audit&) {
  testing::SpecSampler sampler(777, true);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const SystemSpec spec = sampler.draw_stable();
    const auto a = evaluate_point(spec);
    const auto b = evaluate_point(testing::swap_magnons(spec));
    for (double d : {a.g12_raw - b.g21_raw, a.g21_raw - b.g12_raw, a.e12_raw - b.e12_raw}) {
      worst = std::max(worst, std::isnan(d) ? INFINITY : std::abs(d));
    }
  }
  return {worst <= 1e-10,
          fmt("50 random specs: max deviation after swapping magnons = %.3g (<= 1e-10)",
              worst)};
}

Outcome analytic_oracles(Audit& audit) {
  double worst = 0.0;
  for (double s : {0.1, 0.5, 1.0}) {
    const testing::Mat4 tmsv = testing::two_mode_squeezed_vacuum(s);
    Matrix6<double> full = Matrix6<double>::Identity() / 2;
    full.bottomRightCorner<4, 4>() = tmsv;
    audit.add("tmsv", full);
    const ReducedCM<double> sr{tmsv};
    const double g = std::log(std::cosh(2 * s));
    worst = std::max({worst, std::abs(log_negativity(sr) - 2 * s),
                      std::abs(gaussian_steering(sr, SteeringDirection::kOneToTwo) - g),
                      std::abs(gaussian_steering(sr, SteeringDirection::kTwoToOne) - g)});
  }
  SystemSpec bare = baseline(0.0, 0.0);
  bare.gamma_1 = bare.gamma_2 = 0.0;
  const double lmax = max_stable_gain(bare, 1e-6);
  const double dl = std::abs(lmax - 0.5);
  return {worst < 1e-9 && dl < 1e-4,
          fmt("TMSV max error %.3g (< 1e-9); bare-cavity Lambda_max = %.6f "
              "(|. - 0.5| < 1e-4)",
              worst, lmax)};
}

std::vector<Criterion> criteria();

Outcome physicality(Audit& audit) {
  // Re-run every other criterion with evaluate_point observed.
  const PointObserver observer = [&audit](const SystemSpec&, const Matrix6<double>& sigma,
                                          const MetricsRecord& rec) {
    audit.add("evaluate_point", sigma, rec);
  };
  {
    ScopedPointObserver guard(observer);
    for (const auto& c : criteria()) {
      if (c.id == 9) continue;
      try {
        c.run(audit);
      } catch (const std::exception&) {
        // Failures are reported by the criterion itself.
      }
    }
  }

  std::size_t unphysical = 0;
  std::size_t hierarchy = 0;
  std::size_t steering_points = 0;
  double worst_eig = INFINITY;
  for (const auto& e : audit.entries()) {
    const double eig = uncertainty_min_eigenvalue(e.sigma);
    worst_eig = std::min(worst_eig, eig);
    if (!(eig >= -1e-9)) ++unphysical;
    MetricsRecord rec;
    if (e.record) {
      rec = *e.record;
    } else {
      try {
        rec = compute_metrics(e.sigma, StabilityReport{true, false, -1.0});
      } catch (const std::exception&) {
        ++hierarchy;
        continue;
      }
    }
    if (rec.g12 > 0.0 || rec.g21 > 0.0) {
      ++steering_points;
      if (!(rec.e12 > 0.0)) ++hierarchy;
    }
  }
  return {unphysical == 0 && hierarchy == 0 && !audit.entries().empty(),
          fmt("%zu covariance matrices: min eigenvalue of Sigma + (i/2)Omega = %.3g, "
              "%zu unphysical; %zu steerable points, %zu without entanglement",
              audit.entries().size(), worst_eig, unphysical, steering_points,
              hierarchy)};
}

std::vector<Criterion> criteria() {
  return {
      {1, "vacuum fixed point", 1.0, vacuum_fixed_point},
      {2, "Lyapunov and ODE oracles agree", 30.0, oracle_equivalence},
      {3, "maximum stable OPA gain", 5.0, stability_bound},
      {4, "no steering without squeezed drive", 5.0, no_steering_without_drive},
      {5, "symmetric couplings are degenerate", 0.0, symmetric_degeneracy},
      {6, "steering peak ratios", 30.0, peak_ratios},
      {7, "OPA doubles the peak steering", 30.0, opa_doubling},
      {8, "thermal robustness", 60.0, thermal_robustness},
      {9, "physicality of every covariance matrix", 0.0, physicality},
      {10, "mode-swap metamorphic relation", 0.0, mode_swap},
      {11, "analytic oracles", 0.0, analytic_oracles},
  };
}

bool report(const Criterion& c) {
  Audit audit;
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = c.run(audit);
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string timing = fmt("%.2f s", secs);
  if (c.time_limit_s > 0) {
    timing += fmt(" (limit %.0f s)", c.time_limit_s);
    if (secs >= c.time_limit_s) out.pass = false;
  }
  std::cout << (out.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title
            << " | " << out.detail << " | " << timing << std::endl;
  return out.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const auto all = criteria();
  if (argc > 2) {
    std::cerr << "usage: acceptance [criterion 1-" << all.size() << "]\n";
    return 2;
  }
  if (argc == 2) {
    const int id = std::atoi(argv[1]);
    for (const auto& c : all) {
      if (c.id == id) return report(c) ? 0 : 1;
    }
    std::cerr << "unknown criterion '" << argv[1] << "'\n";
    return 2;
  }
  int failures = 0;
  for (const auto& c : all) failures += report(c) ? 0 : 1;
  std::cout << (all.size() - failures) << "/" << all.size() << " criteria passed\n";
  return failures == 0 ? 0 : 1;
}
