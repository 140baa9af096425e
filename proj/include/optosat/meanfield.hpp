#pragma once

// Self-consistent steady state of the classical amplitudes, closed with the
// saturation law. Used by the "meanfield" sweep mode; the effective mode skips
// this entirely and takes G_j and Delta_j as given.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "optosat/errors.hpp"
#include "optosat/model.hpp"

namespace optosat {

struct MeanFieldState {
  std::complex<double> alpha1{};
  std::complex<double> alpha2{};
  std::complex<double> beta{};
  double sat_gain = 0.0;  ///< g_s at the fixed point
  double sat_loss = 0.0;  ///< f_s at the fixed point
  double residual = 0.0;  ///< max-norm of the stationary right-hand sides
  std::size_t iterations = 0;
  double tolerance = 0.0;  ///< tolerance the state was solved to

  bool converged() const noexcept { return residual <= tolerance; }
};

struct MeanFieldOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
  double damping = 0.5;
  std::complex<double> initial_alpha1{};
  std::complex<double> initial_alpha2{};
  std::complex<double> initial_beta{};

  friend bool operator==(const MeanFieldOptions&, const MeanFieldOptions&) = default;
};

/// Right-hand sides of the stationary amplitude equations evaluated at the
/// given amplitudes, with g_s, f_s and the shifted detunings taken from the
/// same amplitudes.
struct MeanFieldRates {
  std::complex<double> alpha1;
  std::complex<double> alpha2;
  std::complex<double> beta;
};

inline MeanFieldRates meanfield_rates(const SystemParams& p, std::complex<double> a1, std::complex<double> a2,
                                      std::complex<double> b) {
  using namespace std::complex_literals;
  const SaturableRates sat = saturable_rates(p.gain0, p.loss0, a1, a2);
  const NetRates net = net_rates(p, sat.gain, sat.loss);
  const double shift = 2.0 * b.real();
  const double det1 = p.detuning_c1 + p.om_coupling1 * shift;
  const double det2 = p.detuning_c2 + p.om_coupling2 * shift;
  MeanFieldRates r;
  r.alpha1 = -(1i * det1 - net.gain) * a1 - 1i * p.hopping * a2 - 1i * p.drive1;
  r.alpha2 = -(1i * det2 + net.loss) * a2 - 1i * p.hopping * a1 - 1i * p.drive2;
  r.beta = -(1i * p.omega_m + p.gamma_m) * b -
           1i * (p.om_coupling1 * std::norm(a1) + p.om_coupling2 * std::norm(a2));
  return r;
}

inline double meanfield_residual(const SystemParams& p, std::complex<double> a1, std::complex<double> a2,
                                 std::complex<double> b) {
  const MeanFieldRates r = meanfield_rates(p, a1, a2, b);
  return std::max({std::abs(r.alpha1), std::abs(r.alpha2), std::abs(r.beta)});
}

/// Damped fixed-point iteration: freeze g_s, f_s and the detuning shift at the
/// current amplitudes, solve the 2x2 complex optical system and the scalar
/// mechanical equation, then relax toward the new amplitudes.
inline MeanFieldState solve_meanfield(const SystemParams& p, const MeanFieldOptions& opt = {}) {
  using namespace std::complex_literals;
  validate(p);
  if (!(opt.tolerance > 0.0)) throw PreconditionError("solve_meanfield: tolerance must be positive");
  if (opt.max_iterations < 1) throw PreconditionError("solve_meanfield: max_iterations must be >= 1");
  if (!(opt.damping > 0.0 && opt.damping <= 1.0)) {
    throw PreconditionError("solve_meanfield: damping must lie in (0, 1]");
  }

  std::complex<double> a1 = opt.initial_alpha1;
  std::complex<double> a2 = opt.initial_alpha2;
  std::complex<double> b = opt.initial_beta;

  MeanFieldState state;
  state.tolerance = opt.tolerance;
  double residual = meanfield_residual(p, a1, a2, b);
  std::size_t it = 0;
  while (residual > opt.tolerance) {
    if (it == opt.max_iterations) {
      throw ConvergenceError("solve_meanfield: no convergence after " + std::to_string(it) +
                                 " iterations (residual " + std::to_string(residual) + ")",
                             it, residual);
    }
    const SaturableRates sat = saturable_rates(p.gain0, p.loss0, a1, a2);
    const NetRates net = net_rates(p, sat.gain, sat.loss);
    const double shift = 2.0 * b.real();
    // [c11 c12; c21 c22] (alpha1, alpha2) = (-i Omega1, -i Omega2)
    const std::complex<double> c11 = 1i * (p.detuning_c1 + p.om_coupling1 * shift) - net.gain;
    const std::complex<double> c22 = 1i * (p.detuning_c2 + p.om_coupling2 * shift) + net.loss;
    const std::complex<double> c12 = 1i * p.hopping;
    const std::complex<double> det = c11 * c22 - c12 * c12;
    const double scale = std::max({std::abs(c11 * c22), std::abs(c12 * c12), 1e-300});
    if (std::abs(det) <= 1e-14 * scale) {
      throw DegenerateDriveError("solve_meanfield: frozen optical system is singular");
    }
    const std::complex<double> r1 = -1i * p.drive1;
    const std::complex<double> r2 = -1i * p.drive2;
    const std::complex<double> n1 = (r1 * c22 - c12 * r2) / det;
    const std::complex<double> n2 = (c11 * r2 - c12 * r1) / det;
    const std::complex<double> nb = -1i * (p.om_coupling1 * std::norm(n1) + p.om_coupling2 * std::norm(n2)) /
                                    (1i * p.omega_m + p.gamma_m);
    const double d = opt.damping;
    a1 = (1.0 - d) * a1 + d * n1;
    a2 = (1.0 - d) * a2 + d * n2;
    b = (1.0 - d) * b + d * nb;
    ++it;
    residual = meanfield_residual(p, a1, a2, b);
  }

  const SaturableRates sat = saturable_rates(p.gain0, p.loss0, a1, a2);
  state.alpha1 = a1;
  state.alpha2 = a2;
  state.beta = b;
  state.sat_gain = sat.gain;
  state.sat_loss = sat.loss;
  state.residual = residual;
  state.iterations = it;
  return state;
}

/// Delta_j = Delta_cj + g_j (beta* + beta), G_j = g_j alpha_j (stored as modulus
/// and phase), net rates from the converged saturable rates.
inline EffectiveParams effective_params(const SystemParams& p, const MeanFieldState& s) {
  if (!s.converged()) throw PreconditionError("effective_params: mean-field state is not converged");
  const double shift = 2.0 * s.beta.real();
  const std::complex<double> G1 = p.om_coupling1 * s.alpha1;
  const std::complex<double> G2 = p.om_coupling2 * s.alpha2;
  const NetRates net = net_rates(p, s.sat_gain, s.sat_loss);
  EffectiveParams e;
  e.detuning1 = p.detuning_c1 + p.om_coupling1 * shift;
  e.detuning2 = p.detuning_c2 + p.om_coupling2 * shift;
  e.coupling1 = std::abs(G1);
  e.coupling2 = std::abs(G2);
  e.phase1 = G1 == 0.0 ? 0.0 : wrap_phase(std::arg(G1));
  e.phase2 = G2 == 0.0 ? 0.0 : wrap_phase(std::arg(G2));
  e.net_gain = net.gain;
  e.net_loss = net.loss;
  return e;
}

}  // namespace optosat
