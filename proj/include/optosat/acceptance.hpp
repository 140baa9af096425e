#pragma once

// Acceptance suite: ten numbered checks covering the reference figures, the
// solver and metric oracles, builder equivalence and determinism. Each check
// returns one pass/fail line; tolerances are fixed here, not configurable.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "optosat/correlations.hpp"
#include "optosat/covariance.hpp"
#include "optosat/dynamics.hpp"
#include "optosat/emit.hpp"
#include "optosat/sweep.hpp"

namespace optosat::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

// Tolerances.
inline constexpr double kNullSymplecticSlack = 1e-9;
inline constexpr double kNullRuntime = 0.1;
inline constexpr double kFig2Runtime = 10.0;
inline constexpr double kFig2TargetA2B = 0.5;
inline constexpr double kFig2TargetA1A2 = 0.4;
inline constexpr double kFig2Band = 0.15;
inline constexpr double kSteeringEntanglementFloor = 0.01;
inline constexpr double kMonotoneSlack = 1e-6;
inline constexpr double kOnsetLow = 0.35;
inline constexpr double kOnsetHigh = 0.45;
inline constexpr std::size_t kOnsetPoints = 200;
inline constexpr std::size_t kLyapunovSystems = 100;
inline constexpr double kLyapunovResidual = 1e-9;
inline constexpr double kOdeAgreement = 1e-6;
inline constexpr double kOdeStopTolerance = 1e-10;
inline constexpr double kLyapunovRuntime = 5.0;
inline constexpr double kMetricTolerance = 1e-9;
inline constexpr std::size_t kRandomStates = 100;
inline constexpr std::size_t kBuilderDraws = 1000;
inline constexpr double kBuilderTolerance = 1e-14;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double operator()(double lo, double hi) { return lo + (hi - lo) * (*this)(); }

 private:
  std::mt19937_64 rng_;
};

inline CriterionResult started(int id, std::string name) {
  CriterionResult r;
  r.id = id;
  r.name = std::move(name);
  return r;
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

inline std::string fmt(double x, int digits = 4) { return format_number(x, digits); }

struct TimedRows {
  std::vector<SweepRow> rows;
  double seconds = 0.0;
};

/// Rows of a column, or nullopt for sentinel entries.
inline std::optional<double> metric(const SweepRow& row, std::string_view column) {
  return row.metrics[*metric_index(column)];
}

}  // namespace detail

/// Shared sweep results so that `check` computes the fig2 grid only once.
class Context {
 public:
  explicit Context(std::uint64_t seed = kDefaultSeed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  const detail::TimedRows& fig2() {
    if (!fig2_) fig2_ = timed(figure_preset("fig2"));
    return *fig2_;
  }
  const detail::TimedRows& fig6() {
    if (!fig6_) fig6_ = timed(figure_preset("fig6"));
    return *fig6_;
  }
  const detail::TimedRows& fig7() {
    if (!fig7_) fig7_ = timed(figure_preset("fig7"));
    return *fig7_;
  }

 private:
  static detail::TimedRows timed(const SweepSpec& spec) {
    const auto start = detail::Clock::now();
    detail::TimedRows t{run_sweep(spec)};
    t.seconds = detail::seconds_since(start);
    return t;
  }

  std::uint64_t seed_;
  std::optional<detail::TimedRows> fig2_;
  std::optional<detail::TimedRows> fig6_;
  std::optional<detail::TimedRows> fig7_;
};

// ---------------------------------------------------------------------------
// 1-6: reference-figure behaviour

inline CriterionResult null_baseline(Context&) {
  CriterionResult r = started(1, "null baseline without saturable gain or loss");
  const auto start = detail::Clock::now();
  SweepSpec spec = figure_preset("fig2");
  const SweepRow row = evaluate_point(spec, {0.0, 0.0});
  r.seconds = detail::seconds_since(start);

  if (!row.stable) {
    r.detail = "baseline point is unstable";
    return r;
  }
  bool zero = true;
  double worst = 0.0;
  std::string worst_name;
  for (std::size_t i = 0; i < 9; ++i) {
    const double v = row.metrics[i].value_or(-1.0);
    if (v != 0.0) zero = false;
    if (v > worst) {
      worst = v;
      worst_name = kMetricColumns[i];
    }
  }
  // nu_tilde itself, recomputed from the covariance matrix.
  const PointModel pm = resolve_point(spec, {0.0, 0.0});
  const CovarianceMatrix cov =
      solve_steady_state(build_drift_auto(pm.effective, pm.system), build_diffusion(pm.system));
  double min_nu = 1e300;
  for (const CorrelationReport& rep : full_report(cov)) min_nu = std::min(min_nu, rep.nu_tilde);

  r.passed = zero && min_nu >= 0.5 - kNullSymplecticSlack && r.seconds < kNullRuntime;
  std::ostringstream d;
  if (zero) {
    d << "all E and steering are 0";
  } else {
    d << "largest nonzero metric " << worst_name << "=" << detail::fmt(worst);
  }
  d << ", min nu_tilde=" << detail::fmt(min_nu, 6) << ", " << detail::fmt(r.seconds, 3) << " s (limit "
    << kNullRuntime << " s)";
  r.detail = d.str();
  return r;
}

inline CriterionResult loss_driven_magnitudes(Context& ctx) {
  CriterionResult r = started(2, "loss-driven entanglement magnitudes on the (gs, fs) grid");
  const detail::TimedRows& t = ctx.fig2();
  r.seconds = t.seconds;
  double max_a2b = 0.0;
  double max_a1a2 = 0.0;
  for (const SweepRow& row : t.rows) {
    max_a2b = std::max(max_a2b, detail::metric(row, "E_a2b").value_or(0.0));
    max_a1a2 = std::max(max_a1a2, detail::metric(row, "E_a1a2").value_or(0.0));
  }
  const bool a2b_ok = std::abs(max_a2b - kFig2TargetA2B) <= kFig2Band;
  const bool a1a2_ok = std::abs(max_a1a2 - kFig2TargetA1A2) <= kFig2Band;
  r.passed = a2b_ok && a1a2_ok && max_a2b > max_a1a2 && r.seconds < kFig2Runtime;
  r.detail = "max E_a2b=" + detail::fmt(max_a2b) + " (target 0.5+-0.15), max E_a1a2=" + detail::fmt(max_a1a2) +
             " (target 0.4+-0.15), " + detail::fmt(r.seconds, 3) + " s (limit 10 s)";
  return r;
}

inline CriterionResult gain_loss_asymmetry(Context& ctx) {
  CriterionResult r = started(3, "loss edge beats gain edge");
  const auto start = detail::Clock::now();
  const detail::TimedRows& t = ctx.fig2();
  const SweepSpec spec = figure_preset("fig2");
  const std::size_t n_fs = spec.axes[1].points;
  const std::size_t n_gs = spec.axes[0].points;

  // gs is the outer axis: row (i, j) sits at i * n_fs + j.
  const SweepRow& loss_corner = t.rows[n_fs - 1];  // gs = 0, fs = 0.1
  std::ostringstream d;
  bool ok = true;
  for (std::size_t p = 0; p < 3; ++p) {
    const std::string_view col = kMetricColumns[entanglement_column(p)];
    const double e_loss = detail::metric(loss_corner, col).value_or(0.0);
    double gain_edge_max = 0.0;
    for (std::size_t i = 0; i < n_gs; ++i) {
      gain_edge_max = std::max(gain_edge_max, detail::metric(t.rows[i * n_fs], col).value_or(0.0));
    }
    ok = ok && e_loss > 0.0 && e_loss > gain_edge_max;
    d << (p ? "; " : "") << col << ": loss edge " << detail::fmt(e_loss) << " vs gain edge max "
      << detail::fmt(gain_edge_max);
  }
  r.passed = ok;
  r.detail = d.str();
  r.seconds = detail::seconds_since(start);
  return r;
}

inline CriterionResult steering_directionality(Context& ctx) {
  CriterionResult r = started(4, "two-way steering, cavity-to-resonator dominant");
  const auto start = detail::Clock::now();
  const detail::TimedRows& t = ctx.fig6();
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<double> first_violation;
  std::string first_violation_pair;
  for (const SweepRow& row : t.rows) {
    if (!row.stable) continue;
    for (std::size_t j = 0; j < 2; ++j) {
      const std::size_t pair = j + 1;  // (a1, b) and (a2, b)
      const double e = row.metrics[entanglement_column(pair)].value_or(0.0);
      if (!(e > kSteeringEntanglementFloor)) continue;
      ++checked;
      const double to_b = *row.metrics[forward_column(pair)];
      const double from_b = *row.metrics[backward_column(pair)];
      if (to_b < from_b) {
        ++violations;
        if (!first_violation) {
          first_violation = row.axis_values[0];
          first_violation_pair = j == 0 ? "a1" : "a2";
        }
      }
    }
  }

  SweepSpec spec = figure_preset("fig6");
  const SweepRow ref = evaluate_point(spec, {0.1});
  const double fwd = detail::metric(ref, "G_a1_to_a2").value_or(0.0);
  const double bwd = detail::metric(ref, "G_a2_to_a1").value_or(0.0);
  const bool two_way = ref.stable && fwd > 0.0 && bwd > 0.0;

  r.passed = checked > 0 && violations == 0 && two_way;
  std::ostringstream d;
  d << violations << " of " << checked << " entangled (kappa, a_j|b) points have G_{a_j->b} < G_{b->a_j}";
  if (first_violation) d << " (first: " << first_violation_pair << " at kappa=" << detail::fmt(*first_violation) << ")";
  d << "; at kappa=0.1: G_a1_to_a2=" << detail::fmt(fwd) << ", G_a2_to_a1=" << detail::fmt(bwd);
  r.detail = d.str();
  r.seconds = detail::seconds_since(start);
  return r;
}

inline CriterionResult thermal_robustness(Context& ctx) {
  CriterionResult r = started(5, "thermal robustness up to nbar = 1000");
  const auto start = detail::Clock::now();
  const detail::TimedRows& t = ctx.fig7();
  const SweepSpec spec = figure_preset("fig7");
  const std::size_t n_fs = spec.axes[0].points;
  const std::size_t n_nbar = spec.axes[1].points;
  const auto at = [&](std::size_t fs_index, std::size_t k) -> const SweepRow& {
    return t.rows[fs_index * n_nbar + k];
  };

  const std::optional<double> e_hot = detail::metric(at(n_fs - 1, n_nbar - 1), "E_a2b");
  const bool survives = e_hot && *e_hot > 0.0;

  bool monotone = true;
  std::string monotone_note;
  for (std::size_t f = 0; f < n_fs && monotone; ++f)
    for (std::size_t p = 0; p < 3 && monotone; ++p)
      for (std::size_t k = 1; k < n_nbar; ++k) {
        const auto prev = at(f, k - 1).metrics[entanglement_column(p)];
        const auto cur = at(f, k).metrics[entanglement_column(p)];
        if (!prev || !cur || *cur > *prev + kMonotoneSlack) {
          monotone = false;
          monotone_note = std::string(kMetricColumns[entanglement_column(p)]) + " rises at nbar=" +
                          detail::fmt(at(f, k).axis_values[1]);
          break;
        }
      }

  bool dominates = true;
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t k = 0; k < n_nbar; ++k) {
      const double hi = at(n_fs - 1, k).metrics[entanglement_column(p)].value_or(-1.0);
      const double lo = at(0, k).metrics[entanglement_column(p)].value_or(0.0);
      if (hi < lo) dominates = false;
    }

  r.passed = survives && monotone && dominates;
  std::ostringstream d;
  d << "E_a2b(fs=0.1, nbar=1000)=" << (e_hot ? detail::fmt(*e_hot) : std::string("n/a"))
    << (monotone ? ", non-increasing in nbar" : ", " + monotone_note)
    << (dominates ? ", fs=0.1 curve dominates fs=0" : ", fs=0 curve exceeds fs=0.1 somewhere");
  r.detail = d.str();
  r.seconds = detail::seconds_since(start);
  return r;
}

inline CriterionResult stability_boundary(Context&) {
  CriterionResult r = started(6, "stability boundary in J near 0.4");
  const auto start = detail::Clock::now();
  SweepSpec spec = figure_preset("fig3");
  spec.outputs.clear();
  spec.axes = {{"J", kPresetHoppingMin, kPresetHoppingMax, kOnsetPoints, AxisScale::linear}};
  const std::vector<StabilityRow> rows = run_stability_sweep(spec);

  std::optional<double> onset;
  double least_negative = -1e300;
  for (const StabilityRow& row : rows) {
    if (row.max_real_part) least_negative = std::max(least_negative, *row.max_real_part);
    if (!row.stable && !onset) onset = row.axis_values[0];
  }
  r.passed = onset && *onset >= kOnsetLow && *onset <= kOnsetHigh;
  r.detail = onset ? "instability onset at J=" + detail::fmt(*onset) + " (window [0.35, 0.45])"
                   : "no instability for J in [0.1, 0.5]; max Re lambda over the sweep = " +
                         detail::fmt(least_negative);
  r.seconds = detail::seconds_since(start);
  return r;
}

// ---------------------------------------------------------------------------
// 7-10: solver, metric and builder properties, determinism

/// Random 6x6 drift with spectral abscissa at most -0.3 and random diagonal
/// diffusion.
inline std::pair<DriftMatrix, DiffusionMatrix> random_stable_system(Uniform& u) {
  Matrix m(6, 6);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) m(i, j) = u(-1.0, 1.0);
  const double abscissa = eigenvalues(m).front().real();
  const double shift = abscissa + 0.3 + u(0.0, 0.5);
  for (std::size_t i = 0; i < 6; ++i) m(i, i) -= shift;
  std::array<double, 6> diag{};
  for (double& x : diag) x = u(0.05, 2.0);
  return {DriftMatrix(std::move(m)), DiffusionMatrix(Matrix::diagonal(diag))};
}

inline CriterionResult lyapunov_correctness(Context& ctx) {
  CriterionResult r = started(7, "Lyapunov solver residual and ODE agreement");
  const auto start = detail::Clock::now();
  Uniform u(ctx.seed());
  double worst_residual = 0.0;
  double worst_gap = 0.0;
  std::size_t failures = 0;
  for (std::size_t k = 0; k < kLyapunovSystems; ++k) {
    const auto [drift, diffusion] = random_stable_system(u);
    try {
      const CovarianceMatrix direct = solve_steady_state(drift, diffusion);
      const CovarianceMatrix relaxed = integrate_to_steady_state(drift, diffusion, kOdeStopTolerance, 1e4);
      const double gap = frobenius_norm(direct.matrix - relaxed.matrix) / frobenius_norm(direct.matrix);
      worst_residual = std::max(worst_residual, direct.relative_residual);
      worst_gap = std::max(worst_gap, gap);
    } catch (const Error&) {
      ++failures;
    }
  }
  r.seconds = detail::seconds_since(start);
  r.passed = failures == 0 && worst_residual <= kLyapunovResidual && worst_gap <= kOdeAgreement &&
             r.seconds < kLyapunovRuntime;
  r.detail = std::to_string(kLyapunovSystems) + " systems: worst residual/||D||=" + detail::fmt(worst_residual, 3) +
             ", worst direct-vs-ODE gap=" + detail::fmt(worst_gap, 3) + ", solver failures=" +
             std::to_string(failures) + ", " + detail::fmt(r.seconds, 3) + " s (limit 5 s)";
  return r;
}

/// Two-mode squeezed vacuum with squeezing r, vacuum variance 1/2.
inline Matrix two_mode_squeezed(double r) {
  const double c = 0.5 * std::cosh(2.0 * r);
  const double s = 0.5 * std::sinh(2.0 * r);
  return Matrix{{c, 0, s, 0}, {0, c, 0, -s}, {s, 0, c, 0}, {0, -s, 0, c}};
}

/// Random symplectic 4x4 acting on a thermal state: local rotations and
/// squeezers, a beam splitter and a two-mode squeezer.
inline Matrix random_gaussian_state(Uniform& u) {
  const auto rotation = [](double a, double b) {
    return Matrix{{std::cos(a), std::sin(a), 0, 0},
                  {-std::sin(a), std::cos(a), 0, 0},
                  {0, 0, std::cos(b), std::sin(b)},
                  {0, 0, -std::sin(b), std::cos(b)}};
  };
  const auto squeeze = [](double r1, double r2) {
    const std::array<double, 4> d = {std::exp(-r1), std::exp(r1), std::exp(-r2), std::exp(r2)};
    return Matrix::diagonal(d);
  };
  const double t = u(0.0, 3.14159265358979);
  const double ct = std::cos(t);
  const double st = std::sin(t);
  const Matrix splitter{{ct, 0, st, 0}, {0, ct, 0, st}, {-st, 0, ct, 0}, {0, -st, 0, ct}};
  const double q = u(0.0, 0.8);
  const Matrix tms{{std::cosh(q), 0, std::sinh(q), 0},
                   {0, std::cosh(q), 0, -std::sinh(q)},
                   {std::sinh(q), 0, std::cosh(q), 0},
                   {0, -std::sinh(q), 0, std::cosh(q)}};
  const Matrix s = rotation(u(0, 6.283), u(0, 6.283)) * squeeze(u(-0.6, 0.6), u(-0.6, 0.6)) * splitter * tms *
                   rotation(u(0, 6.283), u(0, 6.283));
  const double n1 = 0.5 + u(0.0, 2.0);
  const double n2 = 0.5 + u(0.0, 2.0);
  const std::array<double, 4> thermal = {n1, n1, n2, n2};
  return symmetrized(s * Matrix::diagonal(thermal) * transpose(s));
}

inline CriterionResult metric_oracles(Context& ctx) {
  CriterionResult r = started(8, "negativity and steering oracles");
  const auto start = detail::Clock::now();
  double worst_tmsv = 0.0;
  for (double sq : {0.1, 0.5, 1.0}) {
    const ReducedCM rc = reduced_from_assembled(two_mode_squeezed(sq));
    const NegativityResult neg = log_negativity(rc);
    const SteeringResult st = steering(rc);
    const double expected = std::log(std::cosh(2.0 * sq));
    worst_tmsv = std::max({worst_tmsv, std::abs(neg.entanglement - 2.0 * sq), std::abs(st.forward - expected),
                           std::abs(st.backward - expected)});
  }

  Uniform u(ctx.seed() + 1);
  double worst_pt = 0.0;
  std::size_t failures = 0;
  for (std::size_t k = 0; k < kRandomStates; ++k) {
    const ReducedCM rc = reduced_from_assembled(random_gaussian_state(u));
    try {
      worst_pt = std::max(worst_pt, std::abs(log_negativity(rc).nu_tilde - partial_transpose_min_symplectic(rc)));
    } catch (const Error&) {
      ++failures;
    }
  }
  r.passed = worst_tmsv <= kMetricTolerance && worst_pt <= kMetricTolerance && failures == 0;
  r.detail = "two-mode squeezed worst error " + detail::fmt(worst_tmsv, 3) + "; determinant vs PT path over " +
             std::to_string(kRandomStates) + " states: worst gap " + detail::fmt(worst_pt, 3) +
             ", failures=" + std::to_string(failures);
  r.seconds = detail::seconds_since(start);
  return r;
}

inline CriterionResult builder_equivalence(Context& ctx) {
  CriterionResult r = started(9, "real and general drift builders agree at zero phase");
  const auto start = detail::Clock::now();
  Uniform u(ctx.seed() + 2);
  double worst_entry = 0.0;
  double worst_trace = 0.0;
  for (std::size_t k = 0; k < kBuilderDraws; ++k) {
    SystemParams p;
    p.omega_m = u(0.5, 2.0);
    p.gamma_m = u(0.0, 0.1);
    p.hopping = u(0.0, 1.0);
    p.kappa1 = u(0.0, 1.0);
    p.kappa2 = u(0.0, 1.0);
    const EffectiveParams e{u(-2.0, 2.0), u(-2.0, 2.0), u(0.0, 1.0), u(0.0, 1.0), 0.0, 0.0,
                            u(-1.0, 1.0), u(0.0, 1.0)};
    const Matrix a = build_drift(e, p).matrix;
    const Matrix b = build_drift_general(e, p).matrix;
    worst_entry = std::max(worst_entry, max_abs(a - b));
    const double expected = 2.0 * e.net_gain - 2.0 * e.net_loss - 2.0 * p.gamma_m;
    worst_trace = std::max(worst_trace, std::abs(trace(a) - expected));
  }
  r.passed = worst_entry <= kBuilderTolerance && worst_trace <= kTraceTolerance;
  r.detail = std::to_string(kBuilderDraws) + " draws: worst entry gap " + detail::fmt(worst_entry, 3) +
             ", worst trace gap " + detail::fmt(worst_trace, 3);
  r.seconds = detail::seconds_since(start);
  return r;
}

inline CriterionResult determinism(Context& ctx) {
  CriterionResult r = started(10, "fig2 output independent of worker count");
  const auto start = detail::Clock::now();
  SweepSpec serial = figure_preset("fig2");
  SweepSpec parallel = serial;
  parallel.workers = 8;
  const std::vector<SweepRow>& rows1 = ctx.fig2().rows;
  const std::vector<SweepRow> rows8 = run_sweep(parallel);
  std::ostringstream a;
  std::ostringstream b;
  write_csv(a, rows1, serial, 9);
  write_csv(b, rows8, parallel, 9);
  r.passed = a.str() == b.str();
  r.detail = r.passed ? "CSV byte-identical (" + std::to_string(a.str().size()) + " bytes)"
                      : "CSV differs between 1 and 8 workers";
  r.seconds = detail::seconds_since(start);
  return r;
}

using Check = std::function<CriterionResult(Context&)>;

inline const std::array<Check, kCriterionCount>& checks() {
  static const std::array<Check, kCriterionCount> all = {
      null_baseline,         loss_driven_magnitudes, gain_loss_asymmetry, steering_directionality,
      thermal_robustness,    stability_boundary,     lyapunov_correctness, metric_oracles,
      builder_equivalence,   determinism};
  return all;
}

inline CriterionResult run_criterion(int id, Context& ctx) {
  if (id < 1 || id > kCriterionCount) throw UsageError("criterion id must lie in [1, 10]");
  try {
    return checks()[static_cast<std::size_t>(id - 1)](ctx);
  } catch (const std::exception& e) {
    CriterionResult r = started(id, "criterion " + std::to_string(id));
    r.detail = std::string("raised: ") + e.what();
    return r;
  }
}

inline std::string format_line(const CriterionResult& r) {
  return std::string(r.passed ? "PASS" : "FAIL") + "  [" + std::to_string(r.id) + "] " + r.name + ": " + r.detail;
}

}  // namespace optosat::acceptance
