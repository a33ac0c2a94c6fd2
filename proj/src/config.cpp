#include "magsteer/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "json.hpp"

namespace magsteer {

namespace {

enum class Kind {
  kFrequency,   // GHz default, stored angular
  kLinewidth,   // MHz default, stored angular
  kRate,        // kappa_a units
  kAngle,       // rad
  kTemperature, // mK default, stored K
  kField,       // T
  kScalar,      // dimensionless
  kInteger,
  kBool,
  kPath,
};

struct KeyDef {
  std::string name;
  Kind kind;
  std::string doc;
  std::function<void(RunConfig&, double)> set_number;
  std::function<double(const RunConfig&)> get_number;
};

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

/// Number with an optional trailing unit token.
std::pair<double, std::string> split_quantity(const std::string& key,
                                              const std::string& text) {
  const std::string t = trim(text);
  const char* begin = t.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || !std::isfinite(value)) {
    throw ConfigError("invalid number for '" + key + "': '" + text + "'");
  }
  return {value, trim(std::string(end))};
}

double scale_for_unit(const std::string& key, Kind kind,
                      const std::string& unit) {
  auto bad = [&]() -> double {
    throw ConfigError("unit '" + unit + "' not accepted for '" + key + "'");
  };
  switch (kind) {
    case Kind::kFrequency:
    case Kind::kLinewidth: {
      static const std::map<std::string, double> hz = {
          {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
      if (unit.empty()) return kind == Kind::kFrequency ? 1e9 : 1e6;
      auto it = hz.find(unit);
      return it == hz.end() ? bad() : it->second;
    }
    case Kind::kRate:
      return unit.empty() || unit == "kappa_a" ? 1.0 : bad();
    case Kind::kAngle:
      if (unit.empty() || unit == "rad") return 1.0;
      return unit == "deg" ? units::kTwoPi / 360.0 : bad();
    case Kind::kTemperature:
      if (unit.empty() || unit == "mK") return 1e-3;
      return unit == "K" ? 1.0 : bad();
    case Kind::kField:
      return unit.empty() || unit == "T" ? 1.0 : bad();
    case Kind::kScalar:
    case Kind::kInteger:
      return unit.empty() ? 1.0 : bad();
    default:
      return bad();
  }
}

// Conversion from stored value to the key's default unit, for reporting.
double display_factor(Kind kind) {
  switch (kind) {
    case Kind::kFrequency: return 1.0 / (units::kTwoPi * 1e9);
    case Kind::kLinewidth: return 1.0 / (units::kTwoPi * 1e6);
    case Kind::kTemperature: return 1e3;
    default: return 1.0;
  }
}

KeyDef number_key(std::string name, Kind kind, std::string doc,
                  double SystemSpec::*field) {
  const double angular = (kind == Kind::kFrequency || kind == Kind::kLinewidth)
                             ? units::kTwoPi
                             : 1.0;
  return {std::move(name), kind, std::move(doc),
          [field, angular](RunConfig& c, double v) {
            c.spec.*field = v * angular;
          },
          [field](const RunConfig& c) { return c.spec.*field; }};
}

KeyDef scenario_key(std::string name, Kind kind, std::string doc,
                    double ScenarioConfig::*field) {
  return {std::move(name), kind, std::move(doc),
          [field](RunConfig& c, double v) { c.scenario.*field = v; },
          [field](const RunConfig& c) { return c.scenario.*field; }};
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> t;
    t.push_back(number_key("system.omega_a", Kind::kFrequency,
                           "cavity frequency omega_a/2pi [GHz]",
                           &SystemSpec::omega_a));
    t.push_back(number_key("system.omega_1", Kind::kFrequency,
                           "magnon 1 frequency omega_1/2pi [GHz]",
                           &SystemSpec::omega_1));
    t.push_back(number_key("system.omega_2", Kind::kFrequency,
                           "magnon 2 frequency omega_2/2pi [GHz]",
                           &SystemSpec::omega_2));
    t.push_back(number_key("system.omega_s", Kind::kFrequency,
                           "squeezed drive frequency omega_s/2pi [GHz]",
                           &SystemSpec::omega_s));
    t.push_back({"system.b_1", Kind::kField,
                 "bias field of magnon 1, sets omega_1 = gamma_0 B [T]",
                 [](RunConfig& c, double v) {
                   c.spec.omega_1 = frequency_from_field(v);
                 },
                 [](const RunConfig& c) {
                   return field_from_frequency(c.spec.omega_1);
                 }});
    t.push_back({"system.b_2", Kind::kField,
                 "bias field of magnon 2, sets omega_2 = gamma_0 B [T]",
                 [](RunConfig& c, double v) {
                   c.spec.omega_2 = frequency_from_field(v);
                 },
                 [](const RunConfig& c) {
                   return field_from_frequency(c.spec.omega_2);
                 }});
    t.push_back(number_key("system.kappa_a", Kind::kLinewidth,
                           "cavity dissipation kappa_a/2pi [MHz]",
                           &SystemSpec::kappa_a));
    t.push_back(number_key("system.kappa_1", Kind::kRate,
                           "magnon 1 dissipation [kappa_a]",
                           &SystemSpec::kappa_1));
    t.push_back(number_key("system.kappa_2", Kind::kRate,
                           "magnon 2 dissipation [kappa_a]",
                           &SystemSpec::kappa_2));
    t.push_back(number_key("system.gamma_1", Kind::kRate,
                           "photon-magnon coupling 1 [kappa_a]",
                           &SystemSpec::gamma_1));
    t.push_back(number_key("system.gamma_2", Kind::kRate,
                           "photon-magnon coupling 2 [kappa_a]",
                           &SystemSpec::gamma_2));
    t.push_back(number_key("system.lambda", Kind::kRate,
                           "OPA gain Lambda [kappa_a]",
                           &SystemSpec::lambda_opa));
    t.push_back(number_key("system.phi", Kind::kAngle, "OPA phase [rad]",
                           &SystemSpec::phi_opa));
    t.push_back(number_key("system.r", Kind::kScalar,
                           "bath squeezing parameter r [-]",
                           &SystemSpec::squeeze_r));
    t.push_back(number_key("system.theta", Kind::kAngle,
                           "squeezed drive phase [rad]",
                           &SystemSpec::squeeze_theta));
    t.push_back({"system.temperature", Kind::kTemperature,
                 "bath temperature [mK]",
                 [](RunConfig& c, double v) { c.spec.temperature = v; },
                 [](const RunConfig& c) { return c.spec.temperature; }});

    t.push_back({"run.out", Kind::kPath, "output directory", {}, {}});
    t.push_back({"run.plot", Kind::kBool, "write SVG plots (true/false)", {},
                 {}});
    t.push_back({"run.grid", Kind::kInteger, "points per 1D axis",
                 [](RunConfig& c, double v) { c.grid = static_cast<int>(v); },
                 [](const RunConfig& c) { return double(c.grid); }});
    t.push_back({"run.grid_2d", Kind::kInteger, "points per axis of 2D sweeps",
                 [](RunConfig& c, double v) { c.grid_2d = static_cast<int>(v); },
                 [](const RunConfig& c) { return double(c.grid_2d); }});
    t.push_back({"run.threads", Kind::kInteger, "worker threads (0 = auto)",
                 [](RunConfig& c, double v) {
                   c.threads = static_cast<unsigned>(std::max(0.0, v));
                 },
                 [](const RunConfig& c) { return double(c.threads); }});

    t.push_back(scenario_key("scenario.r", Kind::kScalar,
                             "r for ratio/dissipation figures [-]",
                             &ScenarioConfig::r));
    t.push_back(scenario_key("scenario.lambda", Kind::kRate,
                             "Lambda for ratio/dissipation figures [kappa_a]",
                             &ScenarioConfig::lambda));
    t.push_back(scenario_key("scenario.threshold_r", Kind::kScalar,
                             "r for critical temperatures [-]",
                             &ScenarioConfig::threshold_r));
    t.push_back(scenario_key("scenario.threshold_lambda", Kind::kRate,
                             "Lambda for critical temperatures [kappa_a]",
                             &ScenarioConfig::threshold_lambda));
    t.push_back(scenario_key("scenario.ratio_min", Kind::kScalar,
                             "lower Gamma_2/Gamma_1 [-]",
                             &ScenarioConfig::ratio_min));
    t.push_back(scenario_key("scenario.ratio_max", Kind::kScalar,
                             "upper Gamma_2/Gamma_1 [-]",
                             &ScenarioConfig::ratio_max));
    t.push_back(scenario_key("scenario.kappa_min", Kind::kRate,
                             "lower magnon dissipation [kappa_a]",
                             &ScenarioConfig::kappa_min));
    t.push_back(scenario_key("scenario.kappa_max", Kind::kRate,
                             "upper magnon dissipation [kappa_a]",
                             &ScenarioConfig::kappa_max));
    t.push_back(scenario_key("scenario.r_max", Kind::kScalar,
                             "upper r of the (r, Lambda) map [-]",
                             &ScenarioConfig::r_max));
    t.push_back(scenario_key("scenario.lambda_max", Kind::kRate,
                             "upper Lambda of the (r, Lambda) map [kappa_a]",
                             &ScenarioConfig::lambda_max));
    t.push_back(scenario_key("scenario.t_max", Kind::kTemperature,
                             "upper temperature of temperature sweeps [mK]",
                             &ScenarioConfig::t_max));
    return t;
  }();
  return table;
}

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> a = {
      {"temp", "system.temperature"},
      {"lambda_opa", "system.lambda"},
      {"phi_opa", "system.phi"},
      {"squeeze_r", "system.r"},
      {"squeeze_theta", "system.theta"},
  };
  return a;
}

const KeyDef* find_key(const std::string& raw) {
  std::string key = raw;
  if (auto it = aliases().find(key); it != aliases().end()) key = it->second;
  const auto& table = key_table();
  auto match = [&](const std::string& k) -> const KeyDef* {
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const KeyDef& d) { return d.name == k; });
    return it == table.end() ? nullptr : &*it;
  };
  if (const KeyDef* d = match(key)) return d;
  if (key.find('.') == std::string::npos) return match("system." + key);
  return nullptr;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + text + "'");
}

void flatten(const YAML::Node& node, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out,
             std::vector<std::string>& violations) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out,
              violations);
    }
  } else if (node.IsScalar()) {
    out.emplace_back(prefix, node.as<std::string>());
  } else if (node.IsNull()) {
    violations.push_back("missing value for key '" + prefix + "'");
  } else {
    violations.push_back("unsupported value for key '" + prefix +
                         "' (expected a scalar)");
  }
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key,
                   const std::string& value) {
  const KeyDef* def = find_key(trim(key));
  if (def == nullptr) throw ConfigError("unknown config key '" + key + "'");

  switch (def->kind) {
    case Kind::kPath:
      if (trim(value).empty()) throw ConfigError("empty path for '" + key + "'");
      config.out_dir = trim(value);
      return;
    case Kind::kBool:
      config.plot = parse_bool(key, value);
      return;
    default:
      break;
  }
  const auto [number, unit] = split_quantity(key, value);
  if (def->kind == Kind::kInteger && number != std::floor(number)) {
    throw ConfigError("'" + key + "' must be an integer");
  }
  try {
    def->set_number(config, number * scale_for_unit(key, def->kind, unit));
  } catch (const InvalidSpec& e) {
    throw ConfigError("invalid value for '" + key + "': " + e.what());
  }
}

void apply_assignment(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("expected key=value, got '" + assignment + "'");
  }
  apply_setting(config, assignment.substr(0, eq), assignment.substr(eq + 1));
}

void load_config_file(RunConfig& config, const std::filesystem::path& path,
                      std::vector<std::string>& violations) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config file '" + path.string() + "'");
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot parse config file '" + path.string() +
                      "': " + e.what());
  }
  if (root.IsNull()) return;
  if (!root.IsMap()) {
    throw ConfigError("config file '" + path.string() + "' must be a mapping");
  }
  std::vector<std::pair<std::string, std::string>> entries;
  flatten(root, "", entries, violations);
  for (const auto& [key, value] : entries) {
    try {
      apply_setting(config, key, value);
    } catch (const ConfigError& e) {
      violations.emplace_back(e.what());
    }
  }
}

std::vector<std::string> validate(const RunConfig& config) {
  std::vector<std::string> out = spec_violations(config.spec);
  if (config.grid < 2) out.emplace_back("run.grid must be at least 2");
  if (config.grid_2d < 2) out.emplace_back("run.grid_2d must be at least 2");
  const auto& s = config.scenario;
  if (!(s.ratio_min > 0.0 && s.ratio_max > s.ratio_min)) {
    out.emplace_back("scenario ratio range must satisfy 0 < ratio_min < ratio_max");
  }
  if (!(s.kappa_min > 0.0 && s.kappa_max > s.kappa_min)) {
    out.emplace_back("scenario kappa range must satisfy 0 < kappa_min < kappa_max");
  }
  if (s.r < 0.0 || s.threshold_r < 0.0 || s.r_max < 0.0) {
    out.emplace_back("scenario r values must be non-negative");
  }
  if (s.lambda < 0.0 || s.threshold_lambda < 0.0 || s.lambda_max < 0.0) {
    out.emplace_back("scenario lambda values must be non-negative");
  }
  if (!(s.t_max > 0.0)) out.emplace_back("scenario.t_max must be positive");
  return out;
}

std::string resolved_config_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  for (const auto& def : key_table()) {
    switch (def.kind) {
      case Kind::kPath:
        j[def.name] = config.out_dir.generic_string();
        break;
      case Kind::kBool:
        j[def.name] = config.plot;
        break;
      case Kind::kInteger:
        j[def.name] = static_cast<long long>(def.get_number(config));
        break;
      default:
        j[def.name] = def.get_number(config) * display_factor(def.kind);
    }
  }
  return j.dump();
}

std::string describe_keys() {
  std::ostringstream os;
  os << "Config keys (YAML nesting or --set key=value; 'system.' may be "
        "omitted).\nValues take an optional unit suffix; a bare number uses "
        "the unit in brackets.\n";
  for (const auto& def : key_table()) {
    os << "  " << def.name;
    for (std::size_t pad = def.name.size(); pad < 26; ++pad) os << ' ';
    os << def.doc << '\n';
  }
  os << "Units: frequencies Hz|kHz|MHz|GHz, temperatures mK|K, angles "
        "rad|deg, rates kappa_a, fields T.\n";
  return os.str();
}

}  // namespace magsteer
