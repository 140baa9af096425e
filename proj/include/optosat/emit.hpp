#pragma once

// Table emission for sweep results: CSV or JSON-lines, plus a `.meta`
// sidecar holding the resolved configuration. The sidecar is itself a valid
// config document, so `optosat run out.meta` reproduces the table.
//
// CSV columns, in order:
//   <axis names...>, stable, max_real_part, <selected metrics...>, min_symplectic, flags
// Sentinels (unstable or failed points) are empty fields; flags are joined by ';'.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "optosat/config.hpp"
#include "optosat/errors.hpp"
#include "optosat/sweep.hpp"

namespace optosat {

/// Indices into kMetricColumns selected by the spec (all when none are named).
inline std::vector<std::size_t> selected_metrics(const SweepSpec& spec) {
  std::vector<std::size_t> cols;
  if (spec.outputs.empty()) {
    for (std::size_t i = 0; i < kMetricCount; ++i) cols.push_back(i);
    return cols;
  }
  for (const std::string& name : spec.outputs) cols.push_back(*metric_index(name));
  return cols;
}

inline std::vector<std::string> table_columns(const SweepSpec& spec) {
  std::vector<std::string> cols;
  for (const SweepAxis& a : spec.axes) cols.push_back(a.parameter);
  cols.emplace_back("stable");
  cols.emplace_back("max_real_part");
  for (std::size_t i : selected_metrics(spec)) cols.emplace_back(kMetricColumns[i]);
  cols.emplace_back("min_symplectic");
  cols.emplace_back("flags");
  return cols;
}

inline std::string format_number(double x, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, x);
  return buf;
}

inline std::string join_flags(const std::vector<std::string>& flags) {
  std::string s;
  for (const std::string& f : flags) {
    if (!s.empty()) s += ';';
    s += f;
  }
  return s;
}

namespace detail {

inline void put_csv_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
}

inline std::string csv_optional(const std::optional<double>& v, int precision) {
  return v ? format_number(*v, precision) : std::string();
}

inline nlohmann::json json_optional(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace detail

inline void write_csv(std::ostream& out, const std::vector<SweepRow>& rows, const SweepSpec& spec, int precision) {
  validate_precision(precision);
  detail::put_csv_header(out, table_columns(spec));
  const std::vector<std::size_t> metrics = selected_metrics(spec);
  for (const SweepRow& row : rows) {
    for (double x : row.axis_values) out << format_number(x, precision) << ',';
    out << (row.stable ? "true" : "false") << ',' << detail::csv_optional(row.max_real_part, precision);
    for (std::size_t i : metrics) out << ',' << detail::csv_optional(row.metrics[i], precision);
    out << ',' << detail::csv_optional(row.min_symplectic, precision) << ',' << join_flags(row.flags) << '\n';
  }
}

// JSON numbers go through the same %.*g formatting as CSV so the precision
// flag means the same thing in both formats.
inline void write_json_lines(std::ostream& out, const std::vector<SweepRow>& rows, const SweepSpec& spec,
                             int precision) {
  validate_precision(precision);
  const std::vector<std::size_t> metrics = selected_metrics(spec);
  const auto num = [&](const std::optional<double>& v) {
    return v ? nlohmann::json::parse(format_number(*v, precision)) : nlohmann::json(nullptr);
  };
  for (const SweepRow& row : rows) {
    nlohmann::ordered_json obj;
    for (std::size_t k = 0; k < spec.axes.size(); ++k) obj[spec.axes[k].parameter] = num(row.axis_values[k]);
    obj["stable"] = row.stable;
    obj["max_real_part"] = num(row.max_real_part);
    for (std::size_t i : metrics) obj[std::string(kMetricColumns[i])] = num(row.metrics[i]);
    obj["min_symplectic"] = num(row.min_symplectic);
    obj["flags"] = join_flags(row.flags);
    out << obj.dump() << '\n';
  }
}

inline void write_stability_csv(std::ostream& out, const std::vector<StabilityRow>& rows, const SweepSpec& spec,
                                int precision) {
  validate_precision(precision);
  std::vector<std::string> cols;
  for (const SweepAxis& a : spec.axes) cols.push_back(a.parameter);
  for (const char* c : {"stable", "max_real_part", "hurwitz_agrees", "flags"}) cols.emplace_back(c);
  detail::put_csv_header(out, cols);
  for (const StabilityRow& row : rows) {
    for (double x : row.axis_values) out << format_number(x, precision) << ',';
    out << (row.stable ? "true" : "false") << ',' << detail::csv_optional(row.max_real_part, precision) << ','
        << (row.hurwitz_agrees ? "true" : "false") << ',' << join_flags(row.flags) << '\n';
  }
}

inline void write_table(std::ostream& out, const std::vector<SweepRow>& rows, const RunConfig& cfg) {
  if (rows.empty()) throw PreconditionError("emit: no rows to write");
  if (cfg.format == OutputFormat::csv) {
    write_csv(out, rows, cfg.spec, cfg.precision);
  } else {
    write_json_lines(out, rows, cfg.spec, cfg.precision);
  }
}

/// Sidecar document: the resolved config plus a provenance block.
inline nlohmann::json metadata(const RunConfig& cfg, std::size_t row_count) {
  nlohmann::json doc = config_to_json(cfg);
  doc["provenance"] = {{"tool_version", std::string(kToolVersion)},
                       {"grid_shape", grid_shape(cfg.spec)},
                       {"rows", row_count}};
  return doc;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& table) {
  std::filesystem::path p = table;
  p.replace_extension(".meta");
  return p;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing", path.string());
  f << content;
  f.flush();
  if (!f) throw IoError("write failed for '" + path.string() + "'", path.string());
}

}  // namespace detail

/// Writes the table to `path` and the sidecar next to it.
inline void emit(const std::vector<SweepRow>& rows, const RunConfig& cfg, const std::filesystem::path& path) {
  std::ostringstream table;
  write_table(table, rows, cfg);
  detail::write_file(path, table.str());
  detail::write_file(sidecar_path(path), metadata(cfg, rows.size()).dump(2) + "\n");
}

}  // namespace optosat
