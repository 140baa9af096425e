#pragma once

// Bipartite Gaussian correlation measures from the steady-state covariance
// matrix: logarithmic negativity, directional steering and its asymmetry.
// Convention: vacuum variance 1/2. Entanglement iff nu_tilde < 1/2.

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "optosat/covariance.hpp"
#include "optosat/errors.hpp"
#include "optosat/numerics.hpp"

namespace optosat {

enum class Mode { a1 = 0, a2 = 1, b = 2 };

inline std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::a1:
      return "a1";
    case Mode::a2:
      return "a2";
    case Mode::b:
      return "b";
  }
  return "?";
}

struct ModePair {
  ModePair(Mode first_mode, Mode second_mode) : first(first_mode), second(second_mode) {
    if (first == second) throw PreconditionError("mode pair must name two distinct modes");
  }
  Mode first;
  Mode second;
};

/// The three pairs in report order.
inline const std::array<ModePair, 3>& all_pairs() {
  static const std::array<ModePair, 3> pairs = {ModePair(Mode::a1, Mode::a2), ModePair(Mode::a1, Mode::b),
                                                ModePair(Mode::a2, Mode::b)};
  return pairs;
}

struct ReducedCM {
  Matrix first;      ///< V_m
  Matrix second;     ///< V_n
  Matrix cross;      ///< V_mn
  Matrix assembled;  ///< [[V_m, V_mn], [V_mn^T, V_n]]
};

/// Clamping window for square-root arguments near their domain boundary.
inline constexpr double kClampWindow = 1e-12;

struct NegativityResult {
  double entanglement = 0.0;
  double nu_tilde = 0.0;
  bool clamped = false;
};

struct SteeringResult {
  double forward = 0.0;   ///< G_{m->n}
  double backward = 0.0;  ///< G_{n->m}
};

enum class SteeringClass { none, one_way, two_way };

inline std::string_view to_string(SteeringClass c) {
  switch (c) {
    case SteeringClass::none:
      return "none";
    case SteeringClass::one_way:
      return "one-way";
    case SteeringClass::two_way:
      return "two-way";
  }
  return "?";
}

struct CorrelationReport {
  ModePair pair;
  double entanglement = 0.0;
  double nu_tilde = 0.0;
  double steering_fwd = 0.0;
  double steering_bwd = 0.0;
  double asymmetry = 0.0;
  SteeringClass classification = SteeringClass::none;
  bool clamped = false;
};

inline ReducedCM reduce(const Matrix& cov, ModePair pair) {
  if (cov.rows() != 6 || cov.cols() != 6) throw DimensionError("reduce: covariance must be 6x6");
  const auto m = static_cast<std::size_t>(pair.first) * 2;
  const auto n = static_cast<std::size_t>(pair.second) * 2;
  ReducedCM r{cov.block(m, m, 2, 2), cov.block(n, n, 2, 2), cov.block(m, n, 2, 2), Matrix(4, 4)};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) {
      r.assembled(i, j) = r.first(i, j);
      r.assembled(i + 2, j + 2) = r.second(i, j);
      r.assembled(i, j + 2) = r.cross(i, j);
      r.assembled(j + 2, i) = r.cross(i, j);
    }
  return r;
}

inline ReducedCM reduce(const CovarianceMatrix& cov, ModePair pair) { return reduce(cov.matrix, pair); }

/// Builds a ReducedCM from an assembled 4x4 two-mode covariance matrix.
inline ReducedCM reduced_from_assembled(const Matrix& two_mode) {
  if (two_mode.rows() != 4 || two_mode.cols() != 4) throw DimensionError("two-mode covariance must be 4x4");
  return {two_mode.block(0, 0, 2, 2), two_mode.block(2, 2, 2, 2), two_mode.block(0, 2, 2, 2), two_mode};
}

/// nu_tilde = sqrt(Sigma - sqrt(Sigma^2 - 4 det V)) / sqrt2,
/// Sigma = det V_m + det V_n - 2 det V_mn, E = max(0, -ln 2 nu_tilde).
inline NegativityResult log_negativity(const ReducedCM& r) {
  const double det_full = determinant(r.assembled);
  if (!(det_full > 0.0)) throw InvalidCovarianceError("log_negativity: det V_{m|n} must be positive");
  const double sigma = determinant(r.first) + determinant(r.second) - 2.0 * determinant(r.cross);

  NegativityResult out;
  double disc = sigma * sigma - 4.0 * det_full;
  if (disc < 0.0) {
    if (disc < -kClampWindow) throw InvalidCovarianceError("log_negativity: negative discriminant");
    disc = 0.0;
    out.clamped = true;
  }
  double inner = sigma - std::sqrt(disc);
  if (inner < 0.0) {
    if (inner < -kClampWindow) throw InvalidCovarianceError("log_negativity: negative symplectic radicand");
    inner = 0.0;
    out.clamped = true;
  }
  out.nu_tilde = std::sqrt(inner) / std::sqrt(2.0);
  if (!(out.nu_tilde > 0.0)) throw InvalidCovarianceError("log_negativity: vanishing symplectic eigenvalue");
  out.entanglement = std::max(0.0, -std::log(2.0 * out.nu_tilde));
  return out;
}

/// G_{m->n} = max(0, 1/2 ln(det V_m / (4 det V_{m|n}))), and the reverse with det V_n.
inline SteeringResult steering(const ReducedCM& r) {
  const double det_full = determinant(r.assembled);
  const double det_m = determinant(r.first);
  const double det_n = determinant(r.second);
  if (!(det_full > 0.0 && det_m > 0.0 && det_n > 0.0)) {
    throw InvalidCovarianceError("steering: covariance determinants must be positive");
  }
  return {std::max(0.0, 0.5 * std::log(det_m / (4.0 * det_full))),
          std::max(0.0, 0.5 * std::log(det_n / (4.0 * det_full)))};
}

inline SteeringClass classify(double fwd, double bwd) {
  const int count = (fwd > 0.0 ? 1 : 0) + (bwd > 0.0 ? 1 : 0);
  return count == 0 ? SteeringClass::none : count == 1 ? SteeringClass::one_way : SteeringClass::two_way;
}

inline CorrelationReport correlation_report(const Matrix& cov, ModePair pair) {
  const ReducedCM r = reduce(cov, pair);
  CorrelationReport rep{pair};
  try {
    const NegativityResult neg = log_negativity(r);
    const SteeringResult st = steering(r);
    rep.entanglement = neg.entanglement;
    rep.nu_tilde = neg.nu_tilde;
    rep.clamped = neg.clamped;
    rep.steering_fwd = st.forward;
    rep.steering_bwd = st.backward;
    rep.asymmetry = std::abs(st.forward - st.backward);
    rep.classification = classify(st.forward, st.backward);
  } catch (const InvalidCovarianceError& e) {
    throw InvalidCovarianceError(std::string(e.what()) + " [pair " + std::string(mode_name(pair.first)) + "|" +
                                 std::string(mode_name(pair.second)) + "]");
  }
  return rep;
}

/// Reports for (a1,a2), (a1,b), (a2,b) in that order.
inline std::vector<CorrelationReport> full_report(const CovarianceMatrix& cov) {
  std::vector<CorrelationReport> out;
  out.reserve(3);
  for (const ModePair& p : all_pairs()) out.push_back(correlation_report(cov.matrix, p));
  return out;
}

/// Smallest symplectic eigenvalue of the partially transposed two-mode state
/// (momentum of the second mode flipped), computed from the spectrum of
/// Omega V^PT. Equals nu_tilde; used as an independent cross-check of the
/// determinant formula.
inline double partial_transpose_min_symplectic(const ReducedCM& r) {
  Matrix pt = r.assembled;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i != 3) {
      pt(i, 3) = -pt(i, 3);
      pt(3, i) = -pt(3, i);
    }
  }
  return symplectic_eigenvalues(pt).front();
}

}  // namespace optosat
