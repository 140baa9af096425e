#pragma once

// Steady-state covariance matrix from M V + V M^T + D = 0.
// Primary path: Kronecker vectorization (36 unknowns) solved by LU with one
// step of iterative refinement. Oracle path: RK4 relaxation of the Lyapunov
// differential equation from V(0) = 0.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "optosat/dynamics.hpp"
#include "optosat/errors.hpp"
#include "optosat/numerics.hpp"

namespace optosat {

struct CovarianceMatrix {
  Matrix matrix;
  double residual = 0.0;           ///< ||M V + V M^T + D||_F
  double relative_residual = 0.0;  ///< residual / ||D||_F (residual itself if D = 0)
  double tolerance = 0.0;

  bool valid() const noexcept { return relative_residual <= tolerance; }
};

inline constexpr double kLyapunovTolerance = 1e-9;
/// Symplectic eigenvalues below 1/2 - this are flagged unphysical.
inline constexpr double kPhysicalitySlack = 1e-9;

/// M V + V M^T + D
inline Matrix lyapunov_rate(const Matrix& drift, const Matrix& cov, const Matrix& diffusion) {
  return drift * cov + cov * transpose(drift) + diffusion;
}

namespace detail {

inline double relative_to(double residual, double scale) { return scale > 0.0 ? residual / scale : residual; }

inline void require_stable(const DriftMatrix& drift, const char* who) {
  const StabilityReport report = stability(drift);
  if (!report.stable) {
    throw UnstableSystemError(std::string(who) + ": drift matrix is unstable (max Re lambda = " +
                                  std::to_string(report.max_real_part) + ")",
                              report.max_real_part);
  }
}

// Row-major vec: index of V(i, j) is i*n + j.
// (M V)(i,j) = sum_k M(i,k) V(k,j); (V M^T)(i,j) = sum_k V(i,k) M(j,k).
inline Matrix lyapunov_operator(const Matrix& m) {
  const std::size_t n = m.rows();
  Matrix op(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row = i * n + j;
      for (std::size_t k = 0; k < n; ++k) {
        op(row, k * n + j) += m(i, k);
        op(row, i * n + k) += m(j, k);
      }
    }
  return op;
}

}  // namespace detail

/// Solves M V + V M^T = -D for a stable M. Throws UnstableSystemError when M
/// is unstable and DegenerateSpectrumError when the Lyapunov operator is
/// singular (lambda_i + lambda_j = 0).
inline CovarianceMatrix solve_steady_state(const DriftMatrix& drift, const DiffusionMatrix& diffusion,
                                           double tolerance = kLyapunovTolerance) {
  detail::require_stable(drift, "solve_steady_state");
  const Matrix& m = drift.matrix;
  const Matrix& d = diffusion.matrix;
  const std::size_t n = m.rows();
  const LuDecomposition lu(detail::lyapunov_operator(m));
  if (lu.singular()) {
    throw DegenerateSpectrumError("solve_steady_state: Lyapunov operator is singular (pivot " +
                                  std::to_string(lu.min_pivot()) + ")");
  }
  std::vector<double> rhs(n * n);
  for (std::size_t i = 0; i < n * n; ++i) rhs[i] = -d.data()[i];
  std::vector<double> x = lu.solve(rhs);

  // One refinement step against the unsymmetrized solution.
  Matrix cov(n, n, x);
  const Matrix r = lyapunov_rate(m, cov, d);
  std::vector<double> neg_r(n * n);
  for (std::size_t i = 0; i < n * n; ++i) neg_r[i] = -r.data()[i];
  const std::vector<double> dx = lu.solve(neg_r);
  for (std::size_t i = 0; i < n * n; ++i) x[i] += dx[i];

  CovarianceMatrix out{symmetrized(Matrix(n, n, std::move(x))), 0.0, 0.0, tolerance};
  out.residual = frobenius_norm(lyapunov_rate(m, out.matrix, d));
  out.relative_residual = detail::relative_to(out.residual, frobenius_norm(d));
  if (!out.valid()) {
    throw DegenerateSpectrumError("solve_steady_state: residual " + std::to_string(out.relative_residual) +
                                  " exceeds tolerance (near-degenerate spectrum)");
  }
  return out;
}

/// Relaxes dV/dt = M V + V M^T + D from V(0) = 0 until ||dV/dt||_F <=
/// tolerance * ||D||_F. Throws SlowConvergenceError if max_horizon runs out.
inline CovarianceMatrix integrate_to_steady_state(const DriftMatrix& drift, const DiffusionMatrix& diffusion,
                                                  double tolerance, double max_horizon,
                                                  double step = kDefaultOdeStep) {
  detail::require_stable(drift, "integrate_to_steady_state");
  if (!(step > 0.0)) throw PreconditionError("integrate_to_steady_state: step must be positive");
  const Matrix& m = drift.matrix;
  const Matrix& d = diffusion.matrix;
  const std::size_t n = m.rows();
  const double d_norm = frobenius_norm(d);

  LyapunovRk4 stepper(m, d);
  std::vector<double> v(n * n, 0.0);
  std::vector<double> rate(n * n, 0.0);
  auto rate_norm = [&] {
    stepper.rate(v, rate);
    double s = 0.0;
    for (double x : rate) s += x * x;
    return std::sqrt(s);
  };

  constexpr std::size_t check_every = 64;
  double t = 0.0;
  double last = rate_norm();
  while (last > tolerance * d_norm) {
    if (t >= max_horizon) {
      throw SlowConvergenceError("integrate_to_steady_state: horizon exhausted (residual " +
                                     std::to_string(detail::relative_to(last, d_norm)) + ")",
                                 detail::relative_to(last, d_norm));
    }
    for (std::size_t k = 0; k < check_every; ++k) stepper.step(v, step);
    t += step * static_cast<double>(check_every);
    last = rate_norm();
  }

  Matrix cov(n, n, std::move(v));
  CovarianceMatrix out{cov, last, detail::relative_to(last, d_norm), tolerance};
  return out;
}

/// Standard symplectic form for (x1, p1, x2, p2, ...) ordering.
inline Matrix symplectic_form(std::size_t modes) {
  Matrix omega(2 * modes, 2 * modes);
  for (std::size_t k = 0; k < modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

/// Symplectic eigenvalues of an even-dimensional symmetric matrix: the moduli
/// of the eigenvalues of i Omega V, one per conjugate pair, ascending.
inline std::vector<double> symplectic_eigenvalues(const Matrix& cov) {
  require_square(cov, "symplectic_eigenvalues");
  if (cov.rows() % 2 != 0) throw DimensionError("symplectic_eigenvalues: dimension must be even");
  const std::size_t modes = cov.rows() / 2;
  const ComplexList spec = eigenvalues(symplectic_form(modes) * cov);
  std::vector<double> mags;
  mags.reserve(spec.size());
  for (const Complex& z : spec) mags.push_back(std::abs(z));
  std::sort(mags.begin(), mags.end());
  std::vector<double> out(modes);
  for (std::size_t k = 0; k < modes; ++k) out[k] = 0.5 * (mags[2 * k] + mags[2 * k + 1]);
  return out;
}

struct PhysicalityReport {
  std::vector<double> symplectic;  ///< ascending
  bool physical = true;
};

/// Uncertainty-principle check in the vacuum-variance-1/2 convention.
inline PhysicalityReport physicality_diagnostics(const CovarianceMatrix& cov) {
  PhysicalityReport r;
  r.symplectic = symplectic_eigenvalues(cov.matrix);
  r.physical = r.symplectic.front() >= 0.5 - kPhysicalitySlack;
  return r;
}

}  // namespace optosat
