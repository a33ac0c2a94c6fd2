#pragma once

// Scenario engine: grid sweeps over SystemSpec parameters, peak location,
// threshold bisection and maximum stable OPA gain.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "magsteer/dynamics.hpp"
#include "magsteer/measures.hpp"
#include "magsteer/model.hpp"

namespace magsteer {

/// Linearly spaced axis; count == 1 yields just `min`.
struct Axis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

using SpecSetter = std::function<void(SystemSpec&, double)>;

/// Row-major grid: the first axis varies slowest.
struct SweepGrid {
  std::vector<Axis> axes;
  std::vector<std::vector<double>> coordinates;
  std::vector<MetricsRecord> records;
  std::vector<bool> marginal;

  std::size_t size() const { return records.size(); }
};

/// Sees every covariance matrix evaluate_point solves for, together with the
/// record it produced. May be called from sweep worker threads.
using PointObserver = std::function<void(const SystemSpec&, const Matrix6<double>&,
                                         const MetricsRecord&)>;

/// Installs an observer for the guard's lifetime (audit and test use).
class ScopedPointObserver {
 public:
  explicit ScopedPointObserver(const PointObserver& observer);
  ~ScopedPointObserver();
  ScopedPointObserver(const ScopedPointObserver&) = delete;
  ScopedPointObserver& operator=(const ScopedPointObserver&) = delete;

 private:
  const PointObserver* previous_;
};

/// Full pipeline for one parameter point. Unstable, marginal or degenerate
/// points come back with stable == false and NaN metrics.
MetricsRecord evaluate_point(const SystemSpec& spec);

/// Evaluates the metrics on the Cartesian product of `axes`. Points are
/// computed on `threads` workers (0 = hardware concurrency); the output
/// order is independent of scheduling.
SweepGrid sweep(const SystemSpec& base, std::vector<Axis> axes,
                const std::vector<SpecSetter>& setters, unsigned threads = 0);

struct Peak {
  double location = 0.0;
  double value = 0.0;
};

/// Maximizes `f` on [lo, hi] by golden-section search.
Peak golden_section_max(const std::function<double(double)>& f, double lo,
                        double hi, double tol = 1e-7);

/// Grid argmax of samples (xs, ys) refined by golden-section search over the
/// neighbouring cells.
Peak refine_peak(const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::function<double(double)>& f);

SweepGrid fig2_sweep(const SystemSpec& base, const Axis& r_axis,
                     const Axis& lambda_axis, unsigned threads = 0);

struct RatioSweep {
  SweepGrid grid;
  Peak peak_g12;
  Peak peak_g21;
};

/// Gamma_2 / Gamma_1 sweep with Gamma_1 held at base.gamma_1. Without OPA
/// the gain is forced to zero; otherwise base.lambda_opa is used. Peaks are
/// located on the unclamped steering values.
RatioSweep fig3_fig4_ratio_sweep(const SystemSpec& base, const Axis& ratio_axis,
                                 bool with_opa, unsigned threads = 0);

/// Dissipation sweep of magnon `which_magnon` (1 or 2) at fixed Gamma_2.
SweepGrid fig5_dissipation_sweep(const SystemSpec& base, const Axis& kappa_axis,
                                 int which_magnon, double gamma_2_value,
                                 unsigned threads = 0);

enum class ThresholdMetric { kSteering, kEntanglement };

/// Signed metric used for threshold searches: max(G12_raw, G21_raw) for
/// steering, E12_raw for entanglement. NaN at unstable points.
double signed_metric(const MetricsRecord& rec, ThresholdMetric metric);

struct ThresholdOptions {
  double t_low = 0.02;  // K
  double t_high = 5.0;  // K
  double tol = 1e-5;    // K
};

/// Temperature (K) at which the chosen metric vanishes, for the given
/// squeezing r and OPA gain (kappa_a units).
double fig6_temperature_threshold(const SystemSpec& base,
                                  ThresholdMetric metric, double r,
                                  double lambda,
                                  const ThresholdOptions& options = {});

/// Largest OPA gain (kappa_a units) keeping the drift matrix stable, found by
/// bisection on the sign of the stability margin.
double max_stable_gain(const SystemSpec& base, double tol = 1e-6);

/// Same as max_stable_gain, in rad/s.
inline double max_stable_gain_absolute(const SystemSpec& base,
                                       double tol = 1e-6) {
  return max_stable_gain(base, tol) * base.kappa_a;
}

}  // namespace magsteer
