#pragma once

// Drift and diffusion matrices of the quadrature fluctuations, and stability
// classification. Quadrature order is fixed:
//   (X_a1, Y_a1, X_a2, Y_a2, X_b, Y_b)
// with X = (o^dag + o)/sqrt2, Y = i(o^dag - o)/sqrt2, and dynamics dX/dt = M X + noise.

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "optosat/errors.hpp"
#include "optosat/model.hpp"
#include "optosat/numerics.hpp"

namespace optosat {

inline constexpr std::size_t kQuadratures = 6;
inline constexpr std::array<std::string_view, kQuadratures> kQuadratureNames = {"X_a1", "Y_a1", "X_a2",
                                                                               "Y_a2", "X_b",  "Y_b"};

struct DriftMatrix {
  explicit DriftMatrix(Matrix m) : matrix(std::move(m)) {
    if (matrix.rows() != kQuadratures || matrix.cols() != kQuadratures) {
      throw DimensionError("drift matrix must be 6x6");
    }
  }
  Matrix matrix;
};

struct DiffusionMatrix {
  explicit DiffusionMatrix(Matrix m, bool no_thermal_channel = false)
      : matrix(std::move(m)), no_thermalization(no_thermal_channel) {
    if (matrix.rows() != kQuadratures || matrix.cols() != kQuadratures) {
      throw DimensionError("diffusion matrix must be 6x6");
    }
    for (std::size_t i = 0; i < kQuadratures; ++i)
      for (std::size_t j = 0; j < kQuadratures; ++j) {
        if (i != j && matrix(i, j) != 0.0) throw DimensionError("diffusion matrix must be diagonal");
        if (i == j && matrix(i, i) < 0.0) throw DimensionError("diffusion entries must be non-negative");
      }
  }
  Matrix matrix;
  /// gamma_m = 0 with nbar > 0: the resonator never sees its bath.
  bool no_thermalization = false;
};

struct StabilityReport {
  bool stable = false;
  double max_real_part = 0.0;
  ComplexList spectrum;
  bool hurwitz_stable = false;
  bool hurwitz_agrees = true;
};

/// Real-coupling drift matrix (both coupling phases must be exactly zero).
inline DriftMatrix build_drift(const EffectiveParams& e, const SystemParams& p) {
  if (e.phase1 != 0.0 || e.phase2 != 0.0) {
    throw PreconditionError("build_drift: nonzero coupling phase, use build_drift_general");
  }
  const double g = e.net_gain;
  const double f = e.net_loss;
  const double d1 = e.detuning1;
  const double d2 = e.detuning2;
  const double J = p.hopping;
  const double G1 = e.coupling1;
  const double G2 = e.coupling2;
  const double wm = p.omega_m;
  const double gm = p.gamma_m;
  return DriftMatrix(Matrix{
      {g, d1, 0.0, J, 0.0, 0.0},
      {-d1, g, -J, 0.0, -2.0 * G1, 0.0},
      {0.0, J, -f, d2, 0.0, 0.0},
      {-J, 0.0, -d2, -f, -2.0 * G2, 0.0},
      {0.0, 0.0, 0.0, 0.0, -gm, wm},
      {-2.0 * G1, 0.0, -2.0 * G2, 0.0, -wm, -gm},
  });
}

/// Drift matrix for complex couplings G_j = |G_j| e^{i theta_j}.
///
/// From d(da_j)/dt = ... - i G_j (db^dag + db) and
/// d(db)/dt = ... - i sum_j (G_j da_j^dag + G_j^* da_j):
///   dX_aj/dt += 2 Im G_j X_b,   dY_aj/dt += -2 Re G_j X_b,
///   dY_b/dt  += -2 Re G_j X_aj - 2 Im G_j Y_aj,   dX_b/dt gets nothing.
inline DriftMatrix build_drift_general(const EffectiveParams& e, const SystemParams& p) {
  Matrix m(kQuadratures, kQuadratures);
  const double g = e.net_gain;
  const double f = e.net_loss;
  const double J = p.hopping;

  m(0, 0) = g;
  m(0, 1) = e.detuning1;
  m(1, 0) = -e.detuning1;
  m(1, 1) = g;
  m(2, 2) = -f;
  m(2, 3) = e.detuning2;
  m(3, 2) = -e.detuning2;
  m(3, 3) = -f;
  m(0, 3) = J;
  m(1, 2) = -J;
  m(2, 1) = J;
  m(3, 0) = -J;
  m(4, 4) = -p.gamma_m;
  m(4, 5) = p.omega_m;
  m(5, 4) = -p.omega_m;
  m(5, 5) = -p.gamma_m;

  const std::array<double, 2> mag = {e.coupling1, e.coupling2};
  const std::array<double, 2> phase = {e.phase1, e.phase2};
  for (std::size_t j = 0; j < 2; ++j) {
    const double re = phase[j] == 0.0 ? mag[j] : mag[j] * std::cos(phase[j]);
    const double im = phase[j] == 0.0 ? 0.0 : mag[j] * std::sin(phase[j]);
    const std::size_t x = 2 * j;
    const std::size_t y = 2 * j + 1;
    m(x, 4) = 2.0 * im;
    m(y, 4) = -2.0 * re;
    m(5, x) = -2.0 * re;
    m(5, y) = -2.0 * im;
  }
  return DriftMatrix(std::move(m));
}

/// Picks the real-coupling builder when both phases vanish.
inline DriftMatrix build_drift_auto(const EffectiveParams& e, const SystemParams& p) {
  if (e.phase1 == 0.0 && e.phase2 == 0.0) return build_drift(e, p);
  return build_drift_general(e, p);
}

/// diag(kappa1, kappa1, kappa2, kappa2, gamma_m(2n+1), gamma_m(2n+1)).
inline DiffusionMatrix build_diffusion(const SystemParams& p) {
  if (!(p.nbar >= 0.0)) throw ValidationError("nbar must be >= 0");
  const double mech = p.gamma_m * (2.0 * p.nbar + 1.0);
  const std::array<double, kQuadratures> diag = {p.kappa1, p.kappa1, p.kappa2, p.kappa2, mech, mech};
  return DiffusionMatrix(Matrix::diagonal(diag), p.gamma_m == 0.0 && p.nbar > 0.0);
}

/// Coefficients c_0..c_n of det(s I - A) = sum_k c_k s^k (c_n = 1), by
/// Faddeev-LeVerrier. Independent of the QR eigenvalue path.
inline std::vector<double> characteristic_polynomial(const Matrix& a) {
  require_square(a, "characteristic_polynomial");
  const std::size_t n = a.rows();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  Matrix mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix next = a * mk;
    for (std::size_t i = 0; i < n; ++i) next(i, i) += c[n - k + 1];
    mk = std::move(next);
    c[n - k] = -trace(a * mk) / static_cast<double>(k);
  }
  return c;
}

/// Routh-Hurwitz test on a monic polynomial given as c_0..c_n (c_n = 1):
/// true iff every root has negative real part. A zero in the first column is
/// treated as "not strictly stable".
inline bool routh_hurwitz_stable(const std::vector<double>& coeffs) {
  const std::size_t n = coeffs.size() - 1;
  if (n == 0) return true;
  // a[k] is the coefficient of s^{n-k}.
  std::vector<double> a(n + 1);
  for (std::size_t k = 0; k <= n; ++k) a[k] = coeffs[n - k];
  const std::size_t width = n / 2 + 1;
  std::vector<double> prev(width, 0.0);
  std::vector<double> cur(width, 0.0);
  for (std::size_t k = 0, i = 0; k <= n; k += 2, ++i) prev[i] = a[k];
  for (std::size_t k = 1, i = 0; k <= n; k += 2, ++i) cur[i] = a[k];
  if (!(prev[0] > 0.0)) return false;
  for (std::size_t row = 1; row <= n; ++row) {
    if (!(cur[0] > 0.0)) return false;
    if (row == n) break;
    std::vector<double> next(width, 0.0);
    for (std::size_t i = 0; i + 1 < width; ++i) {
      next[i] = (cur[0] * prev[i + 1] - prev[0] * cur[i + 1]) / cur[0];
    }
    prev = std::move(cur);
    cur = std::move(next);
  }
  return true;
}

inline StabilityReport stability(const DriftMatrix& drift) {
  StabilityReport r;
  r.spectrum = eigenvalues(drift.matrix);
  r.max_real_part = r.spectrum.front().real();
  r.stable = r.max_real_part < 0.0;
  r.hurwitz_stable = routh_hurwitz_stable(characteristic_polynomial(drift.matrix));
  r.hurwitz_agrees = r.hurwitz_stable == r.stable;
  return r;
}

}  // namespace optosat
