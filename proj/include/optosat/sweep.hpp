#pragma once

// Parameter sweeps over the linearized model, figure presets, and the
// parameter-trend checks. Grid points are independent; rows come back in
// row-major grid order (first axis outermost) whatever the worker count.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "optosat/correlations.hpp"
#include "optosat/covariance.hpp"
#include "optosat/dynamics.hpp"
#include "optosat/errors.hpp"
#include "optosat/meanfield.hpp"
#include "optosat/model.hpp"

namespace optosat {

enum class SweepMode { effective, meanfield };
enum class AxisScale { linear, logarithmic };

inline std::string_view to_string(SweepMode m) { return m == SweepMode::effective ? "effective" : "meanfield"; }
inline std::string_view to_string(AxisScale s) { return s == AxisScale::linear ? "linear" : "logarithmic"; }

/// Axis parameter names. `kappa`, `G`, `Delta` and `theta` move both modes together.
inline constexpr std::array<std::string_view, 12> kAxisParameters = {
    "gs", "fs", "kappa", "kappa1", "kappa2", "J", "G", "G1", "G2", "nbar", "Delta", "theta"};

/// Axes that only make sense when the operating point is given directly.
inline bool is_effective_only_axis(std::string_view name) {
  return name == "gs" || name == "fs" || name == "G" || name == "G1" || name == "G2" || name == "Delta" ||
         name == "theta";
}

struct SweepAxis {
  std::string parameter;
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 1;
  AxisScale scale = AxisScale::linear;

  friend bool operator==(const SweepAxis&, const SweepAxis&) = default;

  std::vector<double> values() const {
    std::vector<double> v(points);
    if (points == 1) {
      v[0] = min;
      return v;
    }
    const double span = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
      const double t = static_cast<double>(i) / span;
      v[i] = scale == AxisScale::linear ? min + (max - min) * t : min * std::pow(max / min, t);
    }
    v.back() = max;
    return v;
  }
};

inline void validate(const SweepAxis& axis) {
  if (std::find(kAxisParameters.begin(), kAxisParameters.end(), axis.parameter) == kAxisParameters.end()) {
    throw ValidationError("unknown axis parameter '" + axis.parameter + "'");
  }
  if (!std::isfinite(axis.min) || !std::isfinite(axis.max)) {
    throw ValidationError("axis '" + axis.parameter + "' bounds must be finite");
  }
  if (!(axis.min <= axis.max)) throw ValidationError("axis '" + axis.parameter + "' requires min <= max");
  if (axis.points < 1) throw ValidationError("axis '" + axis.parameter + "' requires points >= 1");
  if (axis.points == 1 && axis.min != axis.max) {
    throw ValidationError("axis '" + axis.parameter + "' requires points >= 2 unless min == max");
  }
  if (axis.scale == AxisScale::logarithmic && !(axis.min > 0.0)) {
    throw ValidationError("axis '" + axis.parameter + "' is logarithmic and requires min > 0");
  }
}

/// Metric columns in emission order.
inline constexpr std::size_t kMetricCount = 12;
inline constexpr std::array<std::string_view, kMetricCount> kMetricColumns = {
    "E_a1a2",    "E_a1b",     "E_a2b",     "G_a1_to_a2", "G_a2_to_a1", "G_a1_to_b",
    "G_b_to_a1", "G_a2_to_b", "G_b_to_a2", "dG_a1a2",    "dG_a1b",     "dG_a2b"};

inline constexpr std::size_t entanglement_column(std::size_t pair) { return pair; }
inline constexpr std::size_t forward_column(std::size_t pair) { return 3 + 2 * pair; }
inline constexpr std::size_t backward_column(std::size_t pair) { return 4 + 2 * pair; }
inline constexpr std::size_t asymmetry_column(std::size_t pair) { return 9 + pair; }

inline std::optional<std::size_t> metric_index(std::string_view name) {
  for (std::size_t i = 0; i < kMetricCount; ++i)
    if (kMetricColumns[i] == name) return i;
  return std::nullopt;
}

struct SweepSpec {
  SweepMode mode = SweepMode::effective;
  SystemParams system;
  OperatingPoint point;          ///< used in effective mode
  MeanFieldOptions meanfield;    ///< used in meanfield mode
  std::vector<SweepAxis> axes;
  std::vector<std::string> outputs;  ///< selected metric columns; empty = all
  std::size_t workers = 1;           ///< parallelism hint, never affects results

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

inline void validate(const SweepSpec& spec) {
  validate(spec.system);
  if (spec.axes.empty() || spec.axes.size() > 2) throw ValidationError("a sweep needs one or two axes");
  for (const SweepAxis& a : spec.axes) {
    validate(a);
    if (spec.mode == SweepMode::meanfield && is_effective_only_axis(a.parameter)) {
      throw ValidationError("axis '" + a.parameter + "' is not available in meanfield mode");
    }
  }
  if (spec.axes.size() == 2 && spec.axes[0].parameter == spec.axes[1].parameter) {
    throw ValidationError("sweep axes must name distinct parameters");
  }
  for (const std::string& o : spec.outputs) {
    if (!metric_index(o)) throw ValidationError("unknown output column '" + o + "'");
  }
  if (spec.mode == SweepMode::effective) (void)resolve_effective(spec.system, spec.point);
}

/// Grid shape, first axis outermost.
inline std::vector<std::size_t> grid_shape(const SweepSpec& spec) {
  std::vector<std::size_t> shape;
  for (const SweepAxis& a : spec.axes) shape.push_back(a.points);
  return shape;
}

inline std::size_t grid_size(const SweepSpec& spec) {
  std::size_t n = 1;
  for (const SweepAxis& a : spec.axes) n *= a.points;
  return n;
}

inline void apply_axis(std::string_view name, double value, SystemParams& sys, OperatingPoint& op) {
  if (name == "gs") {
    op.sat_gain = value;
  } else if (name == "fs") {
    op.sat_loss = value;
  } else if (name == "kappa") {
    sys.kappa1 = sys.kappa2 = value;
  } else if (name == "kappa1") {
    sys.kappa1 = value;
  } else if (name == "kappa2") {
    sys.kappa2 = value;
  } else if (name == "J") {
    sys.hopping = value;
  } else if (name == "G") {
    op.coupling1 = op.coupling2 = value;
  } else if (name == "G1") {
    op.coupling1 = value;
  } else if (name == "G2") {
    op.coupling2 = value;
  } else if (name == "nbar") {
    sys.nbar = value;
  } else if (name == "Delta") {
    op.detuning1 = op.detuning2 = value;
  } else if (name == "theta") {
    op.phase1 = op.phase2 = value;
  } else {
    throw ValidationError("unknown axis parameter '" + std::string(name) + "'");
  }
}

/// Row flags. Any flag starting with "error:" marks a failed point.
namespace flag {
inline constexpr std::string_view unstable = "unstable";
inline constexpr std::string_view hurwitz_mismatch = "hurwitz_mismatch";
inline constexpr std::string_view clamped = "clamped";
inline constexpr std::string_view unphysical = "unphysical";
inline constexpr std::string_view no_thermal_channel = "no_thermal_channel";
inline constexpr std::string_view error_params = "error:params";
inline constexpr std::string_view error_meanfield = "error:meanfield";
inline constexpr std::string_view error_eigen = "error:eigen";
inline constexpr std::string_view error_lyapunov = "error:lyapunov";
inline constexpr std::string_view error_metric = "error:metric";
}  // namespace flag

struct SweepRow {
  std::vector<double> axis_values;
  bool stable = false;
  std::optional<double> max_real_part;
  std::array<std::optional<double>, kMetricCount> metrics{};
  std::optional<double> min_symplectic;
  std::vector<std::string> flags;

  bool has_flag(std::string_view f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }
  bool failed() const {
    return std::any_of(flags.begin(), flags.end(), [](const std::string& f) { return f.starts_with("error:"); });
  }
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Resolved linear model at one grid point.
struct PointModel {
  SystemParams system;
  EffectiveParams effective;
};

inline PointModel resolve_point(const SweepSpec& spec, const std::vector<double>& axis_values) {
  SystemParams sys = spec.system;
  OperatingPoint op = spec.point;
  for (std::size_t k = 0; k < spec.axes.size(); ++k) apply_axis(spec.axes[k].parameter, axis_values[k], sys, op);
  validate(sys);
  if (spec.mode == SweepMode::effective) return {sys, resolve_effective(sys, op)};
  const MeanFieldState state = solve_meanfield(sys, spec.meanfield);
  return {sys, effective_params(sys, state)};
}

inline SweepRow evaluate_point(const SweepSpec& spec, const std::vector<double>& axis_values) {
  SweepRow row;
  row.axis_values = axis_values;
  PointModel pm;
  try {
    pm = resolve_point(spec, axis_values);
  } catch (const ConvergenceError&) {
    row.flags.emplace_back(flag::error_meanfield);
    return row;
  } catch (const DegenerateDriveError&) {
    row.flags.emplace_back(flag::error_meanfield);
    return row;
  } catch (const Error&) {
    row.flags.emplace_back(flag::error_params);
    return row;
  }

  const DriftMatrix drift = build_drift_auto(pm.effective, pm.system);
  const DiffusionMatrix diffusion = build_diffusion(pm.system);
  if (diffusion.no_thermalization) row.flags.emplace_back(flag::no_thermal_channel);

  StabilityReport st;
  try {
    st = stability(drift);
  } catch (const Error&) {
    row.flags.emplace_back(flag::error_eigen);
    return row;
  }
  row.stable = st.stable;
  row.max_real_part = st.max_real_part;
  if (!st.hurwitz_agrees) row.flags.emplace_back(flag::hurwitz_mismatch);
  if (!st.stable) {
    row.flags.emplace_back(flag::unstable);
    return row;
  }

  CovarianceMatrix cov{Matrix(6, 6)};
  try {
    cov = solve_steady_state(drift, diffusion);
  } catch (const Error&) {
    row.flags.emplace_back(flag::error_lyapunov);
    return row;
  }

  try {
    const std::vector<CorrelationReport> reports = full_report(cov);
    std::array<std::optional<double>, kMetricCount> metrics{};
    bool clamped = false;
    for (std::size_t p = 0; p < reports.size(); ++p) {
      metrics[entanglement_column(p)] = reports[p].entanglement;
      metrics[forward_column(p)] = reports[p].steering_fwd;
      metrics[backward_column(p)] = reports[p].steering_bwd;
      metrics[asymmetry_column(p)] = reports[p].asymmetry;
      clamped = clamped || reports[p].clamped;
    }
    const PhysicalityReport phys = physicality_diagnostics(cov);
    row.metrics = metrics;
    row.min_symplectic = phys.symplectic.front();
    if (clamped) row.flags.emplace_back(flag::clamped);
    if (!phys.physical) row.flags.emplace_back(flag::unphysical);
  } catch (const Error&) {
    row.flags.emplace_back(flag::error_metric);
  }
  return row;
}

/// Axis values of grid point `index` in row-major order.
inline std::vector<double> grid_point(const std::vector<std::vector<double>>& axis_values, std::size_t index) {
  std::vector<double> out(axis_values.size());
  for (std::size_t k = axis_values.size(); k-- > 0;) {
    const std::size_t n = axis_values[k].size();
    out[k] = axis_values[k][index % n];
    index /= n;
  }
  return out;
}

/// Runs `task(i)` for i in [0, count) on up to `workers` threads.
template <typename Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        for (std::size_t i = next.fetch_add(1); i < count && !failed.load(); i = next.fetch_add(1)) task(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  validate(spec);
  std::vector<std::vector<double>> axis_values;
  for (const SweepAxis& a : spec.axes) axis_values.push_back(a.values());
  const std::size_t count = grid_size(spec);
  std::vector<SweepRow> rows(count);
  parallel_for(count, spec.workers, [&](std::size_t i) { rows[i] = evaluate_point(spec, grid_point(axis_values, i)); });
  return rows;
}

struct StabilityRow {
  std::vector<double> axis_values;
  bool stable = false;
  std::optional<double> max_real_part;
  bool hurwitz_agrees = true;
  std::vector<std::string> flags;
};

/// Stability classification only, no Lyapunov solve.
inline std::vector<StabilityRow> run_stability_sweep(const SweepSpec& spec) {
  validate(spec);
  std::vector<std::vector<double>> axis_values;
  for (const SweepAxis& a : spec.axes) axis_values.push_back(a.values());
  const std::size_t count = grid_size(spec);
  std::vector<StabilityRow> rows(count);
  parallel_for(count, spec.workers, [&](std::size_t i) {
    StabilityRow row;
    row.axis_values = grid_point(axis_values, i);
    try {
      const PointModel pm = resolve_point(spec, row.axis_values);
      const StabilityReport st = stability(build_drift_auto(pm.effective, pm.system));
      row.stable = st.stable;
      row.max_real_part = st.max_real_part;
      row.hurwitz_agrees = st.hurwitz_agrees;
      if (!st.hurwitz_agrees) row.flags.emplace_back(flag::hurwitz_mismatch);
      if (!st.stable) row.flags.emplace_back(flag::unstable);
    } catch (const ConvergenceError&) {
      row.flags.emplace_back(flag::error_meanfield);
    } catch (const DegenerateDriveError&) {
      row.flags.emplace_back(flag::error_meanfield);
    } catch (const Error&) {
      row.flags.emplace_back(flag::error_params);
    }
    rows[i] = std::move(row);
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Named presets

inline constexpr std::array<std::string_view, 6> kPresetNames = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};

inline std::string preset_list() {
  std::string s;
  for (std::string_view n : kPresetNames) {
    if (!s.empty()) s += ", ";
    s += n;
  }
  return s;
}

/// kappa range of the decay-rate figures, in units of omega_m.
inline constexpr double kPresetKappaMin = 0.01;
inline constexpr double kPresetKappaMax = 1.0;
/// Hopping range of the (kappa, J) maps.
inline constexpr double kPresetHoppingMin = 0.1;
inline constexpr double kPresetHoppingMax = 0.5;

/// Parameter set and axes of the named figure. `resolution` overrides the
/// default points per axis (100 for 2D maps, 200 for 1D curves); 0 keeps it.
inline SweepSpec figure_preset(std::string_view name, std::size_t resolution = 0) {
  const auto points = [&](std::size_t fallback) { return resolution ? resolution : fallback; };
  SweepSpec spec;
  spec.system = reference_device();
  spec.point = reference_operating_point();

  if (name == "fig2") {
    spec.axes = {{"gs", 0.0, 0.1, points(100), AxisScale::linear}, {"fs", 0.0, 0.1, points(100), AxisScale::linear}};
    return spec;
  }

  // The remaining presets share the loss-dominated operating point.
  spec.point.sat_gain = 1e-3;
  spec.point.sat_loss = 0.1;
  const SweepAxis kappa2d{"kappa", kPresetKappaMin, kPresetKappaMax, points(100), AxisScale::linear};
  const SweepAxis hopping{"J", kPresetHoppingMin, kPresetHoppingMax, points(100), AxisScale::linear};
  if (name == "fig3" || name == "fig4" || name == "fig5") {
    spec.axes = {kappa2d, hopping};
    const std::size_t pair = name == "fig3" ? 0 : name == "fig4" ? 1 : 2;
    for (std::size_t col : {entanglement_column(pair), forward_column(pair), backward_column(pair),
                            asymmetry_column(pair)}) {
      spec.outputs.emplace_back(kMetricColumns[col]);
    }
    return spec;
  }
  if (name == "fig6") {
    spec.axes = {{"kappa", kPresetKappaMin, kPresetKappaMax, points(200), AxisScale::linear}};
    return spec;
  }
  if (name == "fig7") {
    // Three loss values as an outer axis so each curve is a contiguous block.
    spec.axes = {{"fs", 0.0, 0.1, 3, AxisScale::linear}, {"nbar", 10.0, 1000.0, points(200), AxisScale::logarithmic}};
    spec.outputs = {"E_a1a2", "E_a1b", "E_a2b"};
    return spec;
  }
  throw UsageError("unknown preset '" + std::string(name) + "' (available: " + preset_list() + ")");
}

// ---------------------------------------------------------------------------
// Trend checks on 1D sweeps

enum class TrendStatus { pass, fail, not_applicable };

inline std::string_view to_string(TrendStatus s) {
  switch (s) {
    case TrendStatus::pass:
      return "pass";
    case TrendStatus::fail:
      return "fail";
    case TrendStatus::not_applicable:
      return "n/a";
  }
  return "?";
}

struct TrendResult {
  std::string name;
  TrendStatus status = TrendStatus::not_applicable;
  std::string detail;
  std::optional<double> location;  ///< axis value the check points at, if any
};

enum class TrendKind {
  hopping_rise_then_saturate,  ///< J axis: E rises up to J = 0.3, flat beyond
  hopping_stability,           ///< J axis: stable for J < 0.4
  loss_linear_increase,        ///< fs axis: linear fit R^2 >= 0.95
  thermal_robustness,          ///< nbar axis: E > 0 at the last point
};

inline std::string_view trend_axis(TrendKind kind) {
  switch (kind) {
    case TrendKind::hopping_rise_then_saturate:
    case TrendKind::hopping_stability:
      return "J";
    case TrendKind::loss_linear_increase:
      return "fs";
    case TrendKind::thermal_robustness:
      return "nbar";
  }
  return "";
}

inline constexpr double kTrendSlack = 1e-6;
inline constexpr double kHoppingPeak = 0.3;
inline constexpr double kHoppingStabilityEdge = 0.4;
/// Beyond the peak, E may drift by at most this fraction of E(peak).
inline constexpr double kSaturationBand = 0.2;
inline constexpr double kLinearFitR2 = 0.95;

namespace detail {

inline TrendResult named_trend(std::string name) {
  TrendResult r;
  r.name = std::move(name);
  return r;
}

inline bool degenerate_axis(std::span<const SweepRow> rows) {
  if (rows.size() < 2) return true;
  const double first = rows.front().axis_values.at(0);
  return std::all_of(rows.begin(), rows.end(), [&](const SweepRow& r) { return r.axis_values.at(0) == first; });
}

inline std::string pair_label(std::size_t pair) { return std::string(kMetricColumns[entanglement_column(pair)]); }

inline TrendResult rise_then_saturate(std::span<const SweepRow> rows, std::size_t pair) {
  TrendResult r = named_trend("J: " + pair_label(pair) + " rises up to J=0.3 then saturates");
  if (degenerate_axis(rows)) {
    r.detail = "degenerate grid";
    return r;
  }
  const std::size_t col = entanglement_column(pair);
  std::optional<double> prev;
  std::optional<double> at_peak;
  double peak_dist = std::numeric_limits<double>::infinity();
  std::vector<double> beyond;
  for (const SweepRow& row : rows) {
    const double x = row.axis_values[0];
    if (!row.metrics[col]) continue;
    const double e = *row.metrics[col];
    if (x <= kHoppingPeak) {
      if (prev && e < *prev - kTrendSlack) {
        r.status = TrendStatus::fail;
        r.detail = "E decreases before the peak";
        r.location = x;
        return r;
      }
      prev = e;
    }
    if (std::abs(x - kHoppingPeak) < peak_dist) {
      peak_dist = std::abs(x - kHoppingPeak);
      at_peak = e;
    }
    if (x >= kHoppingPeak) beyond.push_back(e);
  }
  if (!at_peak || beyond.empty()) {
    r.detail = "no stable points around J=0.3";
    return r;
  }
  const auto [lo, hi] = std::minmax_element(beyond.begin(), beyond.end());
  const bool flat = (*hi - *lo) <= kSaturationBand * std::max(*at_peak, kTrendSlack);
  r.status = flat ? TrendStatus::pass : TrendStatus::fail;
  r.detail = "E(0.3)=" + std::to_string(*at_peak) + ", spread beyond=" + std::to_string(*hi - *lo);
  r.location = kHoppingPeak;
  return r;
}

inline TrendResult hopping_stability(std::span<const SweepRow> rows) {
  TrendResult r = named_trend("J: stable for J<0.4");
  std::optional<double> onset;
  bool ok = true;
  for (const SweepRow& row : rows) {
    const double x = row.axis_values[0];
    if (!row.stable && !onset) onset = x;
    if (x < kHoppingStabilityEdge && !row.stable) ok = false;
  }
  r.status = ok ? TrendStatus::pass : TrendStatus::fail;
  r.location = onset;
  r.detail = onset ? "instability onset at J=" + std::to_string(*onset) : "stable over the whole axis";
  return r;
}

inline TrendResult linear_increase(std::span<const SweepRow> rows, std::size_t pair) {
  TrendResult r = named_trend("fs: linear increase of " + pair_label(pair));
  if (degenerate_axis(rows)) {
    r.detail = "degenerate grid";
    return r;
  }
  const std::size_t col = entanglement_column(pair);
  std::vector<double> xs, ys;
  for (const SweepRow& row : rows) {
    if (!row.metrics[col]) continue;
    xs.push_back(row.axis_values[0]);
    ys.push_back(*row.metrics[col]);
  }
  if (xs.size() < 3) {
    r.detail = "fewer than 3 stable points";
    return r;
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (syy == 0.0 || sxx == 0.0) {
    r.status = TrendStatus::fail;
    r.detail = "no variation in E";
    return r;
  }
  const double slope = sxy / sxx;
  const double r2 = sxy * sxy / (sxx * syy);
  r.status = (slope > 0.0 && r2 >= kLinearFitR2) ? TrendStatus::pass : TrendStatus::fail;
  r.detail = "slope=" + std::to_string(slope) + ", R^2=" + std::to_string(r2);
  return r;
}

inline TrendResult thermal_robustness(std::span<const SweepRow> rows, std::size_t pair) {
  TrendResult r = named_trend("nbar: " + pair_label(pair) + " survives to the last point");
  if (rows.empty()) {
    r.detail = "no rows";
    return r;
  }
  const SweepRow& last = rows.back();
  const std::optional<double> e = last.metrics[entanglement_column(pair)];
  r.location = last.axis_values[0];
  r.status = (e && *e > 0.0) ? TrendStatus::pass : TrendStatus::fail;
  r.detail = e ? "E=" + std::to_string(*e) : std::string("no metric (unstable or failed)");
  return r;
}

}  // namespace detail

/// Runs one named check. Throws UsageError if the rows do not come from a 1D
/// sweep over the check's axis.
inline std::vector<TrendResult> run_trend_check(TrendKind kind, std::span<const SweepRow> rows,
                                                const SweepAxis& axis) {
  if (axis.parameter != trend_axis(kind)) {
    throw UsageError("trend check needs a '" + std::string(trend_axis(kind)) + "' sweep, got '" + axis.parameter +
                     "'");
  }
  for (const SweepRow& row : rows) {
    if (row.axis_values.size() != 1) throw UsageError("trend checks need rows from a 1D sweep");
  }
  std::vector<TrendResult> out;
  switch (kind) {
    case TrendKind::hopping_rise_then_saturate:
      for (std::size_t p = 0; p < 3; ++p) out.push_back(detail::rise_then_saturate(rows, p));
      break;
    case TrendKind::hopping_stability:
      out.push_back(detail::hopping_stability(rows));
      break;
    case TrendKind::loss_linear_increase:
      for (std::size_t p = 0; p < 3; ++p) out.push_back(detail::linear_increase(rows, p));
      break;
    case TrendKind::thermal_robustness:
      for (std::size_t p = 0; p < 3; ++p) out.push_back(detail::thermal_robustness(rows, p));
      break;
  }
  return out;
}

/// The inner-axis series of a 2D sweep at outer index `outer`, as 1D rows
/// (e.g. one nbar curve of fig7). Axis values keep only the inner coordinate.
inline std::vector<SweepRow> inner_series(std::span<const SweepRow> rows, const SweepSpec& spec, std::size_t outer) {
  if (spec.axes.size() != 2) throw UsageError("inner_series needs a 2D sweep");
  const std::size_t n_outer = spec.axes[0].points;
  const std::size_t n_inner = spec.axes[1].points;
  if (rows.size() != n_outer * n_inner) throw UsageError("row count does not match the sweep grid");
  if (outer >= n_outer) throw UsageError("outer index out of range");
  std::vector<SweepRow> out(rows.begin() + static_cast<std::ptrdiff_t>(outer * n_inner),
                            rows.begin() + static_cast<std::ptrdiff_t>((outer + 1) * n_inner));
  for (SweepRow& r : out) r.axis_values = {r.axis_values.at(1)};
  return out;
}

/// All checks that apply to the sweep's axis.
inline std::vector<TrendResult> trend_checks(std::span<const SweepRow> rows, const SweepAxis& axis) {
  std::vector<TrendResult> out;
  for (TrendKind kind : {TrendKind::hopping_rise_then_saturate, TrendKind::hopping_stability,
                         TrendKind::loss_linear_increase, TrendKind::thermal_robustness}) {
    if (trend_axis(kind) != axis.parameter) continue;
    auto part = run_trend_check(kind, rows, axis);
    out.insert(out.end(), part.begin(), part.end());
  }
  if (out.empty()) throw UsageError("no trend checks are defined for axis '" + axis.parameter + "'");
  return out;
}

}  // namespace optosat
