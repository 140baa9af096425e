#pragma once

// Run configuration: a JSON document (comments allowed) with a mandatory
// schema_version. Unknown keys are errors. All physical values are in units
// of omega_m. See configs/ for annotated samples and README.md for the schema.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "optosat/errors.hpp"
#include "optosat/model.hpp"
#include "optosat/sweep.hpp"

namespace optosat {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "0.1.0";

enum class OutputFormat { csv, json_lines };

inline std::string_view to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json-lines"; }

struct RunConfig {
  std::optional<std::string> preset;
  SweepSpec spec;
  std::optional<std::string> output_path;
  OutputFormat format = OutputFormat::csv;
  int precision = 9;
  std::uint64_t seed = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

inline constexpr int kMinPrecision = 6;
inline constexpr int kMaxPrecision = 17;

inline void validate_precision(int digits) {
  if (digits < kMinPrecision || digits > kMaxPrecision) {
    throw ValidationError("precision must lie in [6, 17]");
  }
}

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json-lines" || s == "jsonl") return OutputFormat::json_lines;
  throw ValidationError("output format must be 'csv' or 'json-lines', got '" + std::string(s) + "'");
}

namespace detail {

using json = nlohmann::json;

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Walks one JSON object, rejecting keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ValidationError("'" + label() + "' must be an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  void number(const char* key, double& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) throw ValidationError("'" + qualified(key) + "' must be a number");
    out = v.get<double>();
  }

  void count(const char* key, std::size_t& out) {
    if (!has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      throw ValidationError("'" + qualified(key) + "' must be a non-negative integer");
    }
    out = v.get<std::size_t>();
  }

  std::optional<std::string> string(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = obj_.at(key);
    if (!v.is_string()) throw ValidationError("'" + qualified(key) + "' must be a string");
    return v.get<std::string>();
  }

  const json* child(const char* key) {
    if (!has(key)) return nullptr;
    return &obj_.at(key);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ValidationError("unknown key '" + qualified(it.key().c_str()) + "'");
    }
  }

  std::string qualified(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string label() const { return path_.empty() ? "<root>" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline AxisScale parse_scale(std::string_view s) {
  if (s == "linear") return AxisScale::linear;
  if (s == "logarithmic" || s == "log") return AxisScale::logarithmic;
  throw ValidationError("axis scale must be 'linear' or 'logarithmic', got '" + std::string(s) + "'");
}

inline void read_system(const json& j, SystemParams& p, std::vector<std::string>* warnings) {
  ObjectReader r(j, "system");
  r.number("omega_m", p.omega_m);
  r.number("kappa1", p.kappa1);
  r.number("kappa2", p.kappa2);
  r.number("gamma_m", p.gamma_m);
  r.number("J", p.hopping);
  r.number("g1", p.om_coupling1);
  r.number("g2", p.om_coupling2);
  r.number("Delta_c1", p.detuning_c1);
  r.number("Delta_c2", p.detuning_c2);
  r.number("Omega1", p.drive1);
  r.number("Omega2", p.drive2);
  r.number("g0", p.gain0);
  r.number("f0", p.loss0);
  const bool direct_nbar = r.has("nbar");
  r.number("nbar", p.nbar);

  std::optional<double> temperature;
  std::optional<double> frequency;
  if (r.has("temperature_K")) {
    double t = 0.0;
    r.number("temperature_K", t);
    temperature = t;
  }
  if (r.has("mech_frequency_hz")) {
    double f = 0.0;
    r.number("mech_frequency_hz", f);
    frequency = f;
  }
  if (temperature.has_value() != frequency.has_value()) {
    throw ValidationError("'system.temperature_K' and 'system.mech_frequency_hz' must be given together");
  }
  if (temperature) {
    const double from_env = thermal_occupation({*temperature, *frequency});
    if (direct_nbar) {
      if (warnings) warnings->push_back("both nbar and temperature given; using nbar");
    } else {
      p.nbar = from_env;
    }
  }
  r.finish();
}

inline void read_point(const json& j, OperatingPoint& op) {
  ObjectReader r(j, "operating_point");
  r.number("Delta1", op.detuning1);
  r.number("Delta2", op.detuning2);
  r.number("G1", op.coupling1);
  r.number("G2", op.coupling2);
  r.number("theta1", op.phase1);
  r.number("theta2", op.phase2);
  r.number("gs", op.sat_gain);
  r.number("fs", op.sat_loss);
  r.finish();
}

inline void read_meanfield(const json& j, MeanFieldOptions& m) {
  ObjectReader r(j, "meanfield");
  r.number("tolerance", m.tolerance);
  r.count("max_iterations", m.max_iterations);
  r.number("damping", m.damping);
  r.finish();
}

inline SweepAxis read_axis(const json& j, std::size_t index) {
  ObjectReader r(j, "axes[" + std::to_string(index) + "]");
  SweepAxis a;
  const auto param = r.string("parameter");
  if (!param) throw ValidationError("'" + r.qualified("parameter") + "' is required");
  a.parameter = *param;
  if (!r.has("min") || !r.has("max")) throw ValidationError("axis '" + a.parameter + "' needs min and max");
  r.number("min", a.min);
  r.number("max", a.max);
  r.count("points", a.points);
  if (const auto s = r.string("scale")) a.scale = parse_scale(*s);
  r.finish();
  return a;
}

}  // namespace detail

/// Parses and validates a configuration document. Warnings (non-fatal
/// conflicts) are appended to `warnings` when given.
inline RunConfig parse_config(std::string_view text, std::vector<std::string>* warnings = nullptr) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("config parse error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                         ": " + e.what(),
                     line, col);
  }

  detail::ObjectReader root(doc, "");
  if (!root.has("schema_version")) throw ValidationError("'schema_version' is required");
  if (!doc.at("schema_version").is_number_integer() || doc.at("schema_version").get<int>() != kSchemaVersion) {
    throw ValidationError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  }

  RunConfig cfg;
  std::size_t resolution = 0;
  root.count("resolution", resolution);
  if (const auto preset = root.string("preset")) {
    try {
      cfg.spec = figure_preset(*preset, resolution);
    } catch (const UsageError& e) {
      throw ValidationError(e.what());
    }
    cfg.preset = *preset;
  } else {
    if (resolution != 0) throw ValidationError("'resolution' only applies together with 'preset'");
  }

  if (const auto mode = root.string("mode")) {
    if (*mode == "effective") {
      cfg.spec.mode = SweepMode::effective;
    } else if (*mode == "meanfield") {
      cfg.spec.mode = SweepMode::meanfield;
    } else {
      throw ValidationError("'mode' must be 'effective' or 'meanfield'");
    }
  }
  if (const json* j = root.child("system")) detail::read_system(*j, cfg.spec.system, warnings);
  if (const json* j = root.child("operating_point")) detail::read_point(*j, cfg.spec.point);
  if (const json* j = root.child("meanfield")) detail::read_meanfield(*j, cfg.spec.meanfield);
  if (const json* j = root.child("axes")) {
    if (!j->is_array()) throw ValidationError("'axes' must be an array");
    cfg.spec.axes.clear();
    for (std::size_t i = 0; i < j->size(); ++i) cfg.spec.axes.push_back(detail::read_axis((*j)[i], i));
  }
  if (const json* j = root.child("outputs")) {
    if (!j->is_array()) throw ValidationError("'outputs' must be an array of column names");
    cfg.spec.outputs.clear();
    for (const json& o : *j) {
      if (!o.is_string()) throw ValidationError("'outputs' must be an array of column names");
      cfg.spec.outputs.push_back(o.get<std::string>());
    }
  }
  root.count("workers", cfg.spec.workers);
  if (cfg.spec.workers == 0) throw ValidationError("'workers' must be >= 1");
  if (root.has("seed")) {
    const json& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      throw ValidationError("'seed' must be a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (const json* j = root.child("output")) {
    detail::ObjectReader out(*j, "output");
    cfg.output_path = out.string("path");
    if (const auto f = out.string("format")) cfg.format = parse_format(*f);
    if (out.has("precision")) {
      const json& p = j->at("precision");
      if (!p.is_number_integer()) throw ValidationError("'output.precision' must be an integer");
      cfg.precision = p.get<int>();
    }
    out.finish();
  }
  if (const json* j = root.child("provenance")) {
    if (!j->is_object()) throw ValidationError("'provenance' must be an object");
  }
  root.finish();

  validate_precision(cfg.precision);
  if (cfg.spec.axes.empty()) throw ValidationError("no axes given (set 'axes' or choose a 'preset')");
  validate(cfg.spec);
  return cfg;
}

/// The fully resolved configuration as a document parse_config accepts.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
  using detail::json;
  const SweepSpec& s = cfg.spec;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  if (cfg.preset) doc["preset"] = *cfg.preset;
  doc["mode"] = std::string(to_string(s.mode));
  doc["system"] = {
      {"omega_m", s.system.omega_m},   {"kappa1", s.system.kappa1},     {"kappa2", s.system.kappa2},
      {"gamma_m", s.system.gamma_m},   {"J", s.system.hopping},         {"g1", s.system.om_coupling1},
      {"g2", s.system.om_coupling2},   {"Delta_c1", s.system.detuning_c1}, {"Delta_c2", s.system.detuning_c2},
      {"Omega1", s.system.drive1},     {"Omega2", s.system.drive2},     {"g0", s.system.gain0},
      {"f0", s.system.loss0},          {"nbar", s.system.nbar}};
  doc["operating_point"] = {{"Delta1", s.point.detuning1}, {"Delta2", s.point.detuning2},
                            {"G1", s.point.coupling1},     {"G2", s.point.coupling2},
                            {"theta1", s.point.phase1},    {"theta2", s.point.phase2},
                            {"gs", s.point.sat_gain},      {"fs", s.point.sat_loss}};
  doc["meanfield"] = {{"tolerance", s.meanfield.tolerance},
                      {"max_iterations", s.meanfield.max_iterations},
                      {"damping", s.meanfield.damping}};
  json axes = json::array();
  for (const SweepAxis& a : s.axes) {
    axes.push_back({{"parameter", a.parameter},
                    {"min", a.min},
                    {"max", a.max},
                    {"points", a.points},
                    {"scale", std::string(to_string(a.scale))}});
  }
  doc["axes"] = axes;
  doc["outputs"] = s.outputs;
  doc["workers"] = s.workers;
  doc["seed"] = cfg.seed;
  json out = {{"format", std::string(to_string(cfg.format))}, {"precision", cfg.precision}};
  if (cfg.output_path) out["path"] = *cfg.output_path;
  doc["output"] = out;
  return doc;
}

}  // namespace optosat
