#pragma once

// Command-line driver. Kept as a header so the test suite can call run_cli
// with captured streams.
//
// Exit codes: 0 success, 1 validation/usage error or a failed check,
// 2 more than 10% of grid points failed, 3 I/O error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optosat/acceptance.hpp"
#include "optosat/config.hpp"
#include "optosat/emit.hpp"
#include "optosat/sweep.hpp"

namespace optosat::cli {

enum ExitCode : int { kOk = 0, kInvalid = 1, kTooManyFailures = 2, kIo = 3 };

inline constexpr double kMaxFailureFraction = 0.10;

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read '" + path + "'", path);
  std::ostringstream s;
  s << f.rdbuf();
  if (f.bad()) throw IoError("read failed for '" + path + "'", path);
  return s.str();
}

struct Overrides {
  std::optional<std::size_t> workers;
  std::optional<int> precision;
  std::optional<std::string> format;
  std::optional<std::string> output;
};

inline void apply(const Overrides& o, RunConfig& cfg) {
  if (o.workers) {
    if (*o.workers == 0) throw ValidationError("--workers must be >= 1");
    cfg.spec.workers = *o.workers;
  }
  if (o.precision) {
    validate_precision(*o.precision);
    cfg.precision = *o.precision;
  }
  if (o.format) cfg.format = parse_format(*o.format);
  if (o.output) cfg.output_path = *o.output;
}

inline int failure_exit(std::size_t failed, std::size_t total, std::ostream& err) {
  if (total == 0) return kOk;
  const double fraction = static_cast<double>(failed) / static_cast<double>(total);
  if (fraction > kMaxFailureFraction) {
    err << "error: " << failed << " of " << total << " grid points failed\n";
    return kTooManyFailures;
  }
  if (failed > 0) err << "warning: " << failed << " of " << total << " grid points failed\n";
  return kOk;
}

inline int execute_sweep(const RunConfig& cfg, bool trends, std::ostream& out, std::ostream& err) {
  const std::vector<SweepRow> rows = run_sweep(cfg.spec);
  if (cfg.output_path) {
    emit(rows, cfg, *cfg.output_path);
    err << "wrote " << rows.size() << " rows to " << *cfg.output_path << "\n";
  } else {
    write_table(out, rows, cfg);
  }
  if (trends) {
    if (cfg.spec.axes.size() != 1) {
      err << "warning: --trends ignored, it needs a 1D sweep\n";
    } else {
      try {
        for (const TrendResult& t : trend_checks(rows, cfg.spec.axes[0])) {
          err << "trend " << to_string(t.status) << "  " << t.name << ": " << t.detail << "\n";
        }
      } catch (const UsageError& e) {
        err << "warning: " << e.what() << "\n";
      }
    }
  }
  std::size_t failed = 0;
  for (const SweepRow& r : rows) failed += r.failed() ? 1 : 0;
  return failure_exit(failed, rows.size(), err);
}

inline int execute_stability(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::vector<StabilityRow> rows = run_stability_sweep(cfg.spec);
  std::ostringstream table;
  write_stability_csv(table, rows, cfg.spec, cfg.precision);
  if (cfg.output_path) {
    std::ofstream f(*cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!f || !(f << table.str())) throw IoError("cannot write '" + *cfg.output_path + "'", *cfg.output_path);
  } else {
    out << table.str();
  }
  std::size_t failed = 0;
  std::size_t unstable = 0;
  for (const StabilityRow& r : rows) {
    for (const std::string& f : r.flags) failed += f.starts_with("error:") ? 1 : 0;
    unstable += r.stable ? 0 : 1;
  }
  err << unstable << " of " << rows.size() << " points unstable\n";
  return failure_exit(failed, rows.size(), err);
}

inline int execute_check(const std::vector<int>& only, std::uint64_t seed, std::ostream& out) {
  acceptance::Context ctx(seed);
  std::vector<int> ids = only;
  if (ids.empty()) {
    for (int i = 1; i <= acceptance::kCriterionCount; ++i) ids.push_back(i);
  }
  bool all = true;
  for (int id : ids) {
    const acceptance::CriterionResult r = acceptance::run_criterion(id, ctx);
    out << acceptance::format_line(r) << std::endl;
    all = all && r.passed;
  }
  return all ? kOk : kInvalid;
}

/// Runs the tool on `args` (without the program name).
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Steady-state correlation sweeps for a two-cavity optomechanical device"};
  app.name("optosat");
  app.require_subcommand(1);

  Overrides ov;
  bool trends = false;
  const auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--workers", ov.workers, "parallelism hint (never changes results)");
    sub->add_option("--precision", ov.precision, "significant digits, 6..17");
    sub->add_option("--format", ov.format, "csv or json-lines");
    sub->add_option("-o,--output", ov.output, "output path (stdout when omitted)");
  };

  std::string config_path;
  CLI::App* run = app.add_subcommand("run", "execute the sweep described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_flag("--trends", trends, "print the trend checks of a 1D sweep to stderr");
  add_overrides(run);

  std::string preset_name;
  std::size_t resolution = 0;
  CLI::App* preset = app.add_subcommand("preset", "run a named preset (" + preset_list() + ")");
  preset->add_option("name", preset_name, "preset name")->required();
  preset->add_option("--resolution", resolution, "points per axis (0 = preset default)");
  add_overrides(preset);

  std::vector<int> only;
  std::uint64_t seed = acceptance::kDefaultSeed;
  CLI::App* check = app.add_subcommand("check", "run the acceptance suite");
  check->add_option("--only", only, "criterion ids to run");
  check->add_option("--seed", seed, "seed of the randomized checks");

  std::string stability_path;
  CLI::App* stab = app.add_subcommand("stability", "stability report only");
  stab->add_option("config", stability_path, "config file")->required();
  add_overrides(stab);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*run) {
      std::vector<std::string> warnings;
      RunConfig cfg = parse_config(read_file(config_path), &warnings);
      for (const std::string& w : warnings) err << "warning: " << w << "\n";
      apply(ov, cfg);
      return execute_sweep(cfg, trends, out, err);
    }
    if (*preset) {
      RunConfig cfg;
      cfg.spec = figure_preset(preset_name, resolution);
      cfg.preset = preset_name;
      apply(ov, cfg);
      return execute_sweep(cfg, false, out, err);
    }
    if (*check) return execute_check(only, seed, out);
    if (*stab) {
      RunConfig cfg = parse_config(read_file(stability_path));
      apply(ov, cfg);
      return execute_stability(cfg, out, err);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace optosat::cli
