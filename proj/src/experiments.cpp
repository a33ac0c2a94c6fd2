#include "magsteer/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "magsteer/dynamics.hpp"

namespace magsteer {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::atomic<const PointObserver*> g_observer{nullptr};

MetricsRecord observed(const SystemSpec& spec, const Matrix6<double>& sigma,
                       MetricsRecord rec) {
  if (const auto* obs = g_observer.load()) (*obs)(spec, sigma, rec);
  return rec;
}

MetricsRecord masked_record(const StabilityReport& report) {
  MetricsRecord rec;
  for (double* field : {&rec.s_x1, &rec.s_y1, &rec.s_x2, &rec.s_y2, &rec.e12,
                        &rec.g12, &rec.g21, &rec.gs, &rec.pop_a, &rec.pop_1,
                        &rec.pop_2, &rec.e12_raw, &rec.g12_raw,
                        &rec.g21_raw}) {
    *field = kNaN;
  }
  rec.stable = false;
  rec.margin = report.margin;
  return rec;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) fn(i);
    });
  }
}

}  // namespace

ScopedPointObserver::ScopedPointObserver(const PointObserver& observer)
    : previous_(g_observer.exchange(&observer)) {}

ScopedPointObserver::~ScopedPointObserver() { g_observer.store(previous_); }

std::vector<double> Axis::values() const {
  if (count < 1) throw std::invalid_argument("Axis '" + name + "': count < 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = min;
    return out;
  }
  const double step = (max - min) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = min + step * i;
  out.back() = max;
  return out;
}

MetricsRecord evaluate_point(const SystemSpec& spec) {
  const auto bath = bath_moments(spec);
  const auto drift = drift_matrix(spec);
  const auto report = stability(drift);
  if (!report.is_stable) return masked_record(report);

  const auto diffusion = diffusion_matrix(spec, bath);
  try {
    const auto cm = steady_state_cm(drift, diffusion);
    const auto sr = reduce_cm(cm);
    if (det4(sr.sigma_r) < kDegenerateDet) {
      return observed(spec, cm.sigma, masked_record(report));
    }
    try {
      return observed(spec, cm.sigma, compute_metrics(cm.sigma, report));
    } catch (const ComplexEigenvalue&) {
    } catch (const DegenerateCM&) {
    } catch (const NonPositiveVariance&) {
    }
    return observed(spec, cm.sigma, masked_record(report));
  } catch (const SingularSolve&) {
  }
  return masked_record(report);
}

SweepGrid sweep(const SystemSpec& base, std::vector<Axis> axes,
                const std::vector<SpecSetter>& setters, unsigned threads) {
  if (axes.size() != setters.size()) {
    throw std::invalid_argument("sweep: one setter per axis required");
  }
  SweepGrid grid;
  grid.axes = std::move(axes);

  std::vector<std::vector<double>> axis_values;
  std::size_t total = 1;
  for (const auto& axis : grid.axes) {
    axis_values.push_back(axis.values());
    total *= axis_values.back().size();
  }

  grid.coordinates.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    std::vector<double> coord(grid.axes.size());
    for (std::size_t k = grid.axes.size(); k-- > 0;) {
      const auto& vals = axis_values[k];
      coord[k] = vals[rem % vals.size()];
      rem /= vals.size();
    }
    grid.coordinates[idx] = std::move(coord);
  }

  grid.records.resize(total);
  parallel_for(total, threads, [&](std::size_t idx) {
    SystemSpec spec = base;
    for (std::size_t k = 0; k < setters.size(); ++k) {
      setters[k](spec, grid.coordinates[idx][k]);
    }
    grid.records[idx] = evaluate_point(spec);
  });

  grid.marginal.resize(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    grid.marginal[idx] = !grid.records[idx].stable;
  }
  return grid;
}

Peak golden_section_max(const std::function<double(double)>& f, double lo,
                        double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = (a + b) / 2.0;
  return {x, f(x)};
}

Peak refine_peak(const std::vector<double>& xs, const std::vector<double>& ys,
                 const std::function<double(double)>& f) {
  if (xs.empty() || xs.size() != ys.size()) {
    throw std::invalid_argument("refine_peak: mismatched samples");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < ys.size(); ++i) {
    // NaN samples (masked points) never win.
    if (ys[i] > ys[best] || std::isnan(ys[best])) best = i;
  }
  const std::size_t lo = best == 0 ? 0 : best - 1;
  const std::size_t hi = std::min(best + 1, xs.size() - 1);
  if (lo == hi) return {xs[best], ys[best]};
  const Peak refined = golden_section_max(f, xs[lo], xs[hi]);
  return refined.value >= ys[best] ? refined : Peak{xs[best], ys[best]};
}

SweepGrid fig2_sweep(const SystemSpec& base, const Axis& r_axis,
                     const Axis& lambda_axis, unsigned threads) {
  return sweep(base, {r_axis, lambda_axis},
               {[](SystemSpec& s, double v) { s.squeeze_r = v; },
                [](SystemSpec& s, double v) { s.lambda_opa = v; }},
               threads);
}

RatioSweep fig3_fig4_ratio_sweep(const SystemSpec& base, const Axis& ratio_axis,
                                 bool with_opa, unsigned threads) {
  SystemSpec spec = base;
  if (!with_opa) spec.lambda_opa = 0.0;
  const double gamma_1 = spec.gamma_1;
  auto set_ratio = [gamma_1](SystemSpec& s, double ratio) {
    s.gamma_2 = ratio * gamma_1;
  };

  RatioSweep out;
  out.grid = sweep(spec, {ratio_axis}, {set_ratio}, threads);

  std::vector<double> xs;
  std::vector<double> g12;
  std::vector<double> g21;
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    xs.push_back(out.grid.coordinates[i][0]);
    g12.push_back(out.grid.records[i].g12_raw);
    g21.push_back(out.grid.records[i].g21_raw);
  }
  auto probe = [&](SteeringDirection direction, double ratio) {
    SystemSpec s = spec;
    set_ratio(s, ratio);
    const auto rec = evaluate_point(s);
    const double v =
        direction == SteeringDirection::kOneToTwo ? rec.g12_raw : rec.g21_raw;
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };
  out.peak_g12 = refine_peak(xs, g12, [&](double x) {
    return probe(SteeringDirection::kOneToTwo, x);
  });
  out.peak_g21 = refine_peak(xs, g21, [&](double x) {
    return probe(SteeringDirection::kTwoToOne, x);
  });
  return out;
}

SweepGrid fig5_dissipation_sweep(const SystemSpec& base, const Axis& kappa_axis,
                                 int which_magnon, double gamma_2_value,
                                 unsigned threads) {
  if (which_magnon != 1 && which_magnon != 2) {
    throw std::invalid_argument("fig5_dissipation_sweep: magnon must be 1 or 2");
  }
  SystemSpec spec = base;
  spec.gamma_2 = gamma_2_value;
  SpecSetter setter = which_magnon == 1
                          ? SpecSetter([](SystemSpec& s, double v) { s.kappa_1 = v; })
                          : SpecSetter([](SystemSpec& s, double v) { s.kappa_2 = v; });
  return sweep(spec, {kappa_axis}, {setter}, threads);
}

double signed_metric(const MetricsRecord& rec, ThresholdMetric metric) {
  if (metric == ThresholdMetric::kEntanglement) return rec.e12_raw;
  return std::max(rec.g12_raw, rec.g21_raw);
}

double fig6_temperature_threshold(const SystemSpec& base,
                                  ThresholdMetric metric, double r,
                                  double lambda,
                                  const ThresholdOptions& options) {
  SystemSpec spec = base;
  spec.squeeze_r = r;
  spec.lambda_opa = lambda;
  auto f = [&](double temperature) {
    SystemSpec s = spec;
    s.temperature = temperature;
    const auto rec = evaluate_point(s);
    if (!rec.stable) {
      throw UnstableSystem("fig6_temperature_threshold: unstable point",
                           rec.margin);
    }
    return signed_metric(rec, metric);
  };
  const double at_low = f(options.t_low);
  const double at_high = f(options.t_high);
  if (!(at_low > 0.0)) {
    throw NoThresholdInRange(
        "fig6_temperature_threshold: metric not positive at the lower bound");
  }
  if (at_high > 0.0) {
    throw NoThresholdInRange(
        "fig6_temperature_threshold: metric still positive at the upper bound");
  }
  const double tol = options.tol;
  const auto bracket = boost::math::tools::bisect(
      f, options.t_low, options.t_high,
      [tol](double a, double b) { return std::abs(b - a) < tol; });
  return (bracket.first + bracket.second) / 2.0;
}

double max_stable_gain(const SystemSpec& base, double tol) {
  auto margin_at = [&](double lambda) {
    SystemSpec s = base;
    s.lambda_opa = lambda;
    return stability(drift_matrix(s)).margin + kStabilityEpsilon;
  };
  if (!(margin_at(0.0) < 0.0)) {
    throw UnstableSystem("max_stable_gain: base is unstable without gain",
                         margin_at(0.0) - kStabilityEpsilon);
  }
  double hi = 0.5;
  while (margin_at(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e9) {
      throw NoThresholdInRange("max_stable_gain: no instability found");
    }
  }
  const auto bracket = boost::math::tools::bisect(
      margin_at, 0.0, hi,
      [tol](double a, double b) { return std::abs(b - a) < tol; });
  return (bracket.first + bracket.second) / 2.0;
}

}  // namespace magsteer
