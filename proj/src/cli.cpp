#include "magsteer/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "magsteer/config.hpp"
#include "magsteer/csv.hpp"
#include "magsteer/experiments.hpp"
#include "magsteer/plot.hpp"

namespace magsteer {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

class IoError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::vector<std::string> sets;
  bool plot = false;
  std::optional<int> grid;
  // point shortcuts
  std::optional<double> r;
  std::optional<double> lambda;
  std::optional<double> temp_mk;
  // sweep
  std::vector<std::string> axes;
  // figure
  int figure_id = 0;
};

std::string fmt(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << text;
  os.close();
  if (!os) throw IoError("cannot write '" + path.string() + "'");
}

void write_grid(const fs::path& path, const SweepGrid& grid,
                const RunConfig& config) {
  std::ostringstream os;
  write_sweep_csv(os, grid, resolved_config_json(config));
  write_text(path, os.str());
}

void write_plot(const fs::path& path, const std::string& title,
                const std::string& x_label, const std::vector<double>& x,
                const std::vector<Series>& series) {
  try {
    write_line_plot_svg(path, title, x_label, x, series);
  } catch (const Error& e) {
    throw IoError(e.what());
  }
}

std::vector<double> column(const SweepGrid& grid, std::size_t axis) {
  std::vector<double> out;
  for (const auto& c : grid.coordinates) out.push_back(c[axis]);
  return out;
}

template <typename Fn>
std::vector<double> metric(const SweepGrid& grid, Fn&& fn) {
  std::vector<double> out;
  for (const auto& rec : grid.records) out.push_back(fn(rec));
  return out;
}

Json peak_json(const Peak& p) {
  return Json{{"ratio", p.location}, {"value", p.value}};
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

SystemSpec scenario_spec(const RunConfig& config) {
  SystemSpec spec = config.spec;
  spec.squeeze_r = config.scenario.r;
  spec.lambda_opa = config.scenario.lambda;
  return spec;
}

void print_metrics(std::ostream& out, const MetricsRecord& rec,
                   const MomentCriterion& moment) {
  out << "stability margin   " << fmt(rec.margin) << " kappa_a (stable)\n"
      << "squeezing S_X1     " << fmt(rec.s_x1) << " dB\n"
      << "squeezing S_Y1     " << fmt(rec.s_y1) << " dB\n"
      << "squeezing S_X2     " << fmt(rec.s_x2) << " dB\n"
      << "squeezing S_Y2     " << fmt(rec.s_y2) << " dB\n"
      << "E12                " << fmt(rec.e12) << "\n"
      << "G(1->2)            " << fmt(rec.g12) << "\n"
      << "G(2->1)            " << fmt(rec.g21) << "\n"
      << "G^S                " << fmt(rec.gs) << "\n"
      << "population a       " << fmt(rec.pop_a) << "\n"
      << "population m1      " << fmt(rec.pop_1) << "\n"
      << "population m2      " << fmt(rec.pop_2) << "\n"
      << "|<m1 m2>|          " << fmt(std::abs(moment.cross_moment)) << "\n"
      << "moment criterion   1->2 " << (moment.one_to_two ? "yes" : "no")
      << ", 2->1 " << (moment.two_to_one ? "yes" : "no") << "\n";
}

int run_point(const RunConfig& config, bool write_csv, std::ostream& out,
              std::ostream& err) {
  const SystemSpec& spec = config.spec;
  const auto rec = evaluate_point(spec);
  if (!rec.stable) {
    err << "error: unstable spec, stability margin " << fmt(rec.margin)
        << " kappa_a (must be below " << fmt(-kStabilityEpsilon) << ")\n";
    return kExitUnstable;
  }
  const auto drift = drift_matrix(spec);
  const auto cm = steady_state_cm(drift, diffusion_matrix(spec, bath_moments(spec)));
  print_metrics(out, rec, moment_steering_criterion(cm.sigma));

  if (write_csv) {
    ensure_dir(config.out_dir);
    const std::vector<std::pair<std::string, double>> inputs = {
        {"r", spec.squeeze_r},
        {"theta", spec.squeeze_theta},
        {"lambda", spec.lambda_opa},
        {"phi", spec.phi_opa},
        {"gamma_1", spec.gamma_1},
        {"gamma_2", spec.gamma_2},
        {"kappa_1", spec.kappa_1},
        {"kappa_2", spec.kappa_2},
        {"delta_a", spec.delta_a()},
        {"delta_1", spec.delta_1()},
        {"delta_2", spec.delta_2()},
        {"temperature_mK", units::kelvin_to_mk(spec.temperature)}};
    std::ostringstream os;
    write_point_csv(os, inputs, rec, resolved_config_json(config));
    write_text(config.out_dir / "point.csv", os.str());
    out << "wrote " << (config.out_dir / "point.csv").string() << "\n";
  }
  return kExitOk;
}

Axis parse_axis(const std::string& text, SpecSetter& setter) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4) {
    throw ConfigError("axis must be name:min:max:count, got '" + text + "'");
  }
  Axis axis;
  axis.name = parts[0];
  try {
    axis.min = std::stod(parts[1]);
    axis.max = std::stod(parts[2]);
    axis.count = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw ConfigError("axis '" + text + "' has malformed numbers");
  }
  if (axis.count < 1) throw ConfigError("axis '" + text + "' needs count >= 1");

  if (axis.name == "ratio") {
    setter = [](SystemSpec& s, double v) { s.gamma_2 = v * s.gamma_1; };
    return axis;
  }
  RunConfig probe;
  apply_setting(probe, axis.name, format_number(axis.min));
  const std::string name = axis.name;
  setter = [name](SystemSpec& s, double v) {
    RunConfig tmp;
    tmp.spec = s;
    apply_setting(tmp, name, format_number(v));
    s = tmp.spec;
  };
  return axis;
}

int run_sweep(const RunConfig& config, const Options& opts, std::ostream& out) {
  if (opts.axes.empty() || opts.axes.size() > 2) {
    throw ConfigError("sweep needs one or two --axis definitions");
  }
  std::vector<Axis> axes;
  std::vector<SpecSetter> setters;
  for (const auto& text : opts.axes) {
    SpecSetter setter;
    axes.push_back(parse_axis(text, setter));
    setters.push_back(std::move(setter));
  }
  const auto grid = sweep(config.spec, axes, setters, config.threads);
  ensure_dir(config.out_dir);
  write_grid(config.out_dir / "sweep.csv", grid, config);
  std::size_t masked = std::count(grid.marginal.begin(), grid.marginal.end(), true);
  out << "sweep: " << grid.size() << " points (" << masked
      << " masked), wrote " << (config.out_dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

void figure2(const RunConfig& config, Json& summary) {
  const auto& sc = config.scenario;
  const Axis r_axis{"r", 0.0, sc.r_max, config.grid_2d};
  const Axis l_axis{"lambda", 0.0, sc.lambda_max, config.grid_2d};
  const auto grid = fig2_sweep(config.spec, r_axis, l_axis, config.threads);
  write_grid(config.out_dir / "fig2.csv", grid, config);

  double max_e = 0, max_g = 0, max_s = 0;
  for (const auto& rec : grid.records) {
    if (!rec.stable) continue;
    max_e = std::max(max_e, rec.e12);
    max_g = std::max(max_g, std::max(rec.g12, rec.g21));
    max_s = std::max(max_s, rec.s_x1);
  }
  summary["points"] = grid.size();
  summary["masked"] = std::count(grid.marginal.begin(), grid.marginal.end(), true);
  summary["max_SX1_dB"] = max_s;
  summary["max_E12"] = max_e;
  summary["max_G"] = max_g;

  if (config.plot) {
    const auto rs = r_axis.values();
    const auto ls = l_axis.values();
    try {
      write_heatmap_svg(config.out_dir / "fig2a_SX1.svg", "S_X1 [dB]", "r", rs,
                        "Lambda/kappa_a", ls,
                        metric(grid, [](const auto& m) { return m.s_x1; }));
      write_heatmap_svg(config.out_dir / "fig2b_E12.svg", "E12", "r", rs,
                        "Lambda/kappa_a", ls,
                        metric(grid, [](const auto& m) { return m.e12; }));
      write_heatmap_svg(config.out_dir / "fig2c_G.svg", "G(1->2) = G(2->1)",
                        "r", rs, "Lambda/kappa_a", ls,
                        metric(grid, [](const auto& m) { return m.g12; }));
    } catch (const Error& e) {
      throw IoError(e.what());
    }
  }
}

RatioSweep ratio_figure(const RunConfig& config, bool with_opa,
                        const std::string& stem) {
  const auto& sc = config.scenario;
  const Axis axis{"ratio", sc.ratio_min, sc.ratio_max, config.grid};
  auto result = fig3_fig4_ratio_sweep(scenario_spec(config), axis, with_opa,
                                      config.threads);
  write_grid(config.out_dir / (stem + ".csv"), result.grid, config);
  return result;
}

void figure3(const RunConfig& config, Json& summary) {
  const auto result = ratio_figure(config, true, "fig3");
  summary["r"] = config.scenario.r;
  summary["lambda"] = config.scenario.lambda;
  summary["peak_G12"] = peak_json(result.peak_g12);
  summary["peak_G21"] = peak_json(result.peak_g21);
  if (config.plot) {
    const auto& g = result.grid;
    const auto x = column(g, 0);
    write_plot(config.out_dir / "fig3a.svg", "Entanglement and steering",
               "Gamma2/Gamma1", x,
               {{"E12", metric(g, [](const auto& m) { return m.e12; })},
                {"G(1->2)", metric(g, [](const auto& m) { return m.g12; })},
                {"G(2->1)", metric(g, [](const auto& m) { return m.g21; })}});
    write_plot(config.out_dir / "fig3b.svg", "Magnon populations",
               "Gamma2/Gamma1", x,
               {{"n1", metric(g, [](const auto& m) { return m.pop_1; })},
                {"n2", metric(g, [](const auto& m) { return m.pop_2; })}});
    write_plot(config.out_dir / "fig3c.svg", "Magnon squeezing [dB]",
               "Gamma2/Gamma1", x,
               {{"S_X1", metric(g, [](const auto& m) { return m.s_x1; })},
                {"S_X2", metric(g, [](const auto& m) { return m.s_x2; })}});
  }
}

double peak_steering(const RatioSweep& r) {
  return std::max(r.peak_g12.value, r.peak_g21.value);
}

void figure4(const RunConfig& config, Json& summary) {
  const auto without = ratio_figure(config, false, "fig4a");
  const auto with = ratio_figure(config, true, "fig4b");
  summary["r"] = config.scenario.r;
  summary["lambda_with_opa"] = config.scenario.lambda;
  summary["without_opa"] = {{"peak_G12", peak_json(without.peak_g12)},
                            {"peak_G21", peak_json(without.peak_g21)}};
  summary["with_opa"] = {{"peak_G12", peak_json(with.peak_g12)},
                         {"peak_G21", peak_json(with.peak_g21)}};
  summary["opa_gain_factor"] = peak_steering(with) / peak_steering(without);
  if (config.plot) {
    for (const auto* item : {&without, &with}) {
      const auto& g = item->grid;
      const bool opa = item == &with;
      write_plot(config.out_dir / (opa ? "fig4b.svg" : "fig4a.svg"),
                 opa ? "Steering with OPA" : "Steering without OPA",
                 "Gamma2/Gamma1", column(g, 0),
                 {{"G(1->2)", metric(g, [](const auto& m) { return m.g12; })},
                  {"G(2->1)", metric(g, [](const auto& m) { return m.g21; })},
                  {"G^S", metric(g, [](const auto& m) { return m.gs; })}});
    }
  }
}

void figure5(const RunConfig& config, Json& summary) {
  const auto& sc = config.scenario;
  struct Panel {
    const char* id;
    int magnon;
    double gamma_2;
  };
  const Panel panels[] = {{"a", 1, 3.0}, {"b", 2, 3.0}, {"c", 1, 6.0}, {"d", 2, 6.0}};
  summary["r"] = sc.r;
  summary["lambda"] = sc.lambda;
  for (const auto& p : panels) {
    const Axis axis{p.magnon == 1 ? "kappa_1" : "kappa_2", sc.kappa_min,
                    sc.kappa_max, config.grid};
    const auto grid = fig5_dissipation_sweep(scenario_spec(config), axis,
                                             p.magnon, p.gamma_2, config.threads);
    const std::string stem = std::string("fig5") + p.id;
    write_grid(config.out_dir / (stem + ".csv"), grid, config);

    int dominant = 0;
    bool constant = true;
    for (const auto& rec : grid.records) {
      if (!rec.stable) continue;
      const int sign = rec.g12_raw > rec.g21_raw ? 1 : -1;
      if (dominant == 0) dominant = sign;
      constant = constant && sign == dominant;
    }
    summary[stem] = {{"magnon", p.magnon},
                     {"gamma_2", p.gamma_2},
                     {"dominant_direction", dominant > 0 ? "1->2" : "2->1"},
                     {"direction_constant", constant}};
    if (config.plot) {
      write_plot(config.out_dir / (stem + ".svg"),
                 std::string("Dissipation sweep, Gamma2 = ") + fmt(p.gamma_2) +
                     " kappa_a",
                 axis.name + "/kappa_a", column(grid, 0),
                 {{"E12", metric(grid, [](const auto& m) { return m.e12; })},
                  {"G(1->2)", metric(grid, [](const auto& m) { return m.g12; })},
                  {"G(2->1)", metric(grid, [](const auto& m) { return m.g21; })}});
    }
  }
}

std::optional<double> critical_temperature(const SystemSpec& spec,
                                           ThresholdMetric metric, double r,
                                           double lambda) {
  try {
    return fig6_temperature_threshold(spec, metric, r, lambda);
  } catch (const NoThresholdInRange&) {
    return std::nullopt;
  }
}

std::optional<double> to_mk(const std::optional<double>& kelvin) {
  if (!kelvin) return std::nullopt;
  return units::kelvin_to_mk(*kelvin);
}

void figure6(const RunConfig& config, Json& summary) {
  const auto& sc = config.scenario;
  const double rs[] = {1.0, sc.threshold_r};
  const double ls[] = {0.0, sc.threshold_lambda};
  Json curves = Json::array();
  for (double r : rs) {
    for (double lambda : ls) {
      SystemSpec spec = config.spec;
      spec.squeeze_r = r;
      spec.lambda_opa = lambda;
      const Axis axis{"temperature", 0.0, sc.t_max, config.grid};
      const auto grid = sweep(
          spec, {axis},
          {[](SystemSpec& s, double v) { s.temperature = v; }}, config.threads);
      const std::string stem = "fig6_r" + fmt(r, "%g") + "_lambda" + fmt(lambda, "%g");
      write_grid(config.out_dir / (stem + ".csv"), grid, config);
      curves.push_back(
          {{"r", r},
           {"lambda", lambda},
           {"file", stem + ".csv"},
           {"steering_critical_mK",
            optional_number(to_mk(critical_temperature(
                config.spec, ThresholdMetric::kSteering, r, lambda)))},
           {"entanglement_critical_mK",
            optional_number(to_mk(critical_temperature(
                config.spec, ThresholdMetric::kEntanglement, r, lambda)))}});
      if (config.plot) {
        auto x = column(grid, 0);
        for (double& t : x) t = units::kelvin_to_mk(t);
        write_plot(config.out_dir / (stem + ".svg"),
                   "r = " + fmt(r) + ", Lambda = " + fmt(lambda) + " kappa_a",
                   "T [mK]", x,
                   {{"G(1->2)", metric(grid, [](const auto& m) { return m.g12; })},
                    {"E12", metric(grid, [](const auto& m) { return m.e12; })}});
      }
    }
  }
  summary["threshold_r"] = sc.threshold_r;
  summary["threshold_lambda"] = sc.threshold_lambda;
  summary["steering_critical_mK"] = optional_number(to_mk(critical_temperature(
      config.spec, ThresholdMetric::kSteering, sc.threshold_r, sc.threshold_lambda)));
  summary["entanglement_critical_mK"] = optional_number(to_mk(critical_temperature(
      config.spec, ThresholdMetric::kEntanglement, sc.threshold_r,
      sc.threshold_lambda)));
  summary["curves"] = curves;
}

int run_figure(const RunConfig& config, int id, std::ostream& out) {
  if (id < 2 || id > 6) {
    throw ConfigError("unknown figure id " + std::to_string(id) + " (expected 2-6)");
  }
  ensure_dir(config.out_dir);
  Json summary;
  summary["figure"] = id;
  switch (id) {
    case 2: figure2(config, summary); break;
    case 3: figure3(config, summary); break;
    case 4: figure4(config, summary); break;
    case 5: figure5(config, summary); break;
    case 6: figure6(config, summary); break;
  }
  summary["config"] = Json::parse(resolved_config_json(config));
  const fs::path path = config.out_dir / ("fig" + std::to_string(id) + "_summary.json");
  write_text(path, summary.dump(2) + "\n");
  Json brief = summary;
  brief.erase("config");
  brief.erase("curves");
  out << brief.dump(2) << "\nwrote " << path.string() << "\n";
  return kExitOk;
}

int run_thresholds(const RunConfig& config, std::ostream& out) {
  ensure_dir(config.out_dir);
  const auto& sc = config.scenario;
  Json summary;
  summary["lambda_max"] = max_stable_gain(config.spec);

  const Axis axis{"ratio", sc.ratio_min, sc.ratio_max, config.grid};
  const auto ratio = fig3_fig4_ratio_sweep(scenario_spec(config), axis, true,
                                           config.threads);
  summary["peak_G12"] = peak_json(ratio.peak_g12);
  summary["peak_G21"] = peak_json(ratio.peak_g21);
  summary["steering_critical_mK"] = optional_number(to_mk(critical_temperature(
      config.spec, ThresholdMetric::kSteering, sc.threshold_r, sc.threshold_lambda)));
  summary["entanglement_critical_mK"] = optional_number(to_mk(critical_temperature(
      config.spec, ThresholdMetric::kEntanglement, sc.threshold_r,
      sc.threshold_lambda)));
  summary["config"] = Json::parse(resolved_config_json(config));

  const fs::path path = config.out_dir / "thresholds.json";
  write_text(path, summary.dump(2) + "\n");
  Json brief = summary;
  brief.erase("config");
  out << brief.dump(2) << "\nwrote " << path.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Steady-state magnon squeezing, entanglement and EPR steering "
               "in a two-magnon cavity with OPA and squeezed drive"};
  app.fallthrough();
  app.require_subcommand(1);
  app.footer(describe_keys());

  Options opts;
  app.add_option("--config", opts.config_path, "YAML config file");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--set", opts.sets, "override, key=value (repeatable)")
      ->take_all();
  app.add_flag("--plot", opts.plot, "also write SVG plots");
  app.add_option("--grid", opts.grid, "points per 1D axis");

  auto* point = app.add_subcommand("point", "evaluate one parameter point");
  point->add_option("--r", opts.r, "squeezing parameter r");
  point->add_option("--lambda", opts.lambda, "OPA gain [kappa_a]");
  point->add_option("--temp", opts.temp_mk, "temperature [mK]");

  auto* sweep_cmd = app.add_subcommand("sweep", "1D or 2D parameter sweep");
  sweep_cmd
      ->add_option("--axis", opts.axes,
                   "name:min:max:count in the key's default unit; 'ratio' "
                   "sweeps Gamma2/Gamma1")
      ->required();

  auto* figure = app.add_subcommand("figure", "reproduce a figure scenario");
  figure->add_option("id", opts.figure_id, "figure id (2-6)")->required();

  auto* thresholds = app.add_subcommand(
      "thresholds", "maximum stable gain, steering peaks and critical temperatures");
  auto* validate_cmd = app.add_subcommand("validate", "check a configuration");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  RunConfig config;
  std::vector<std::string> violations;
  try {
    if (opts.config_path) load_config_file(config, *opts.config_path, violations);
  } catch (const ConfigError& e) {
    violations.emplace_back(e.what());
  }
  auto apply = [&](const std::string& key, const std::string& value) {
    try {
      apply_setting(config, key, value);
    } catch (const ConfigError& e) {
      violations.emplace_back(e.what());
    }
  };
  for (const auto& s : opts.sets) {
    try {
      apply_assignment(config, s);
    } catch (const ConfigError& e) {
      violations.emplace_back(e.what());
    }
  }
  if (opts.out_dir) config.out_dir = *opts.out_dir;
  if (opts.plot) config.plot = true;
  if (opts.grid) apply("run.grid", std::to_string(*opts.grid));
  if (opts.r) apply("system.r", format_number(*opts.r));
  if (opts.lambda) apply("system.lambda", format_number(*opts.lambda));
  if (opts.temp_mk) apply("system.temperature", format_number(*opts.temp_mk) + " mK");

  for (auto& v : validate(config)) violations.push_back(std::move(v));

  if (validate_cmd->parsed()) {
    if (violations.empty()) {
      out << "ok\n";
      return kExitOk;
    }
    for (const auto& v : violations) out << "violation: " << v << "\n";
    return kExitConfigError;
  }
  if (!violations.empty()) {
    for (const auto& v : violations) err << "config error: " << v << "\n";
    return kExitConfigError;
  }

  try {
    if (point->parsed()) {
      return run_point(config, opts.out_dir.has_value(), out, err);
    }
    if (sweep_cmd->parsed()) return run_sweep(config, opts, out);
    if (figure->parsed()) return run_figure(config, opts.figure_id, out);
    if (thresholds->parsed()) return run_thresholds(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIoError;
  } catch (const UnstableSystem& e) {
    err << "error: " << e.what() << " (stability margin " << fmt(e.margin())
        << " kappa_a)\n";
    return kExitUnstable;
  }
  return kExitConfigError;
}

}  // namespace magsteer
