#pragma once

// Device parameters and the algebraic pieces of the model that do not need
// any linear algebra: saturable gain/loss, net modal rates, Bose occupation.
//
// All rates are in units of the mechanical frequency (omega_m = 1 unless a
// caller deliberately changes it). Absolute SI units only appear in
// ThermalEnvironment.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "optosat/errors.hpp"

namespace optosat {

/// Physical rates and couplings of the two-cavity, one-resonator device.
struct SystemParams {
  double omega_m = 1.0;       ///< mechanical frequency (normalization unit)
  double kappa1 = 0.0;        ///< cavity-1 decay rate
  double kappa2 = 0.0;        ///< cavity-2 decay rate
  double gamma_m = 0.0;       ///< mechanical damping
  double hopping = 0.0;       ///< photon hopping J between the cavities
  double om_coupling1 = 0.0;  ///< single-photon optomechanical coupling g1
  double om_coupling2 = 0.0;  ///< single-photon optomechanical coupling g2
  double detuning_c1 = 0.0;   ///< bare cavity-drive detuning of cavity 1
  double detuning_c2 = 0.0;   ///< bare cavity-drive detuning of cavity 2
  double drive1 = 0.0;        ///< drive amplitude Omega1
  double drive2 = 0.0;        ///< drive amplitude Omega2
  double gain0 = 0.0;         ///< small-signal gain coefficient g0
  double loss0 = 0.0;         ///< small-signal loss coefficient f0
  double nbar = 0.0;          ///< thermal phonon occupation

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

/// Inputs of the linearized model.
struct EffectiveParams {
  double detuning1 = 0.0;  ///< effective detuning Delta1
  double detuning2 = 0.0;  ///< effective detuning Delta2
  double coupling1 = 0.0;  ///< |G1|
  double coupling2 = 0.0;  ///< |G2|
  double phase1 = 0.0;     ///< arg G1 in [0, 2pi)
  double phase2 = 0.0;     ///< arg G2 in [0, 2pi)
  double net_gain = 0.0;   ///< g = g_s - kappa1 (may be negative)
  double net_loss = 0.0;   ///< f = f_s + kappa2

  friend bool operator==(const EffectiveParams&, const EffectiveParams&) = default;
};

struct ThermalEnvironment {
  double temperature = 0.0;     ///< kelvin
  double mech_frequency = 0.0;  ///< hertz (ordinary frequency, not angular)
};

struct SaturableRates {
  double gain = 0.0;  ///< g_s
  double loss = 0.0;  ///< f_s
};

struct NetRates {
  double gain = 0.0;  ///< g
  double loss = 0.0;  ///< f
};

namespace detail {
inline void require_non_negative(double value, const char* name) {
  if (!(value >= 0.0)) throw ValidationError(std::string(name) + " must be >= 0");
}
inline void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) throw ValidationError(std::string(name) + " must be finite");
}
}  // namespace detail

/// Throws ValidationError naming the first offending field. Names match the
/// config-file keys.
inline void validate(const SystemParams& p) {
  detail::require_finite(p.omega_m, "omega_m");
  if (!(p.omega_m > 0.0)) throw ValidationError("omega_m must be > 0");
  detail::require_non_negative(p.kappa1, "kappa1");
  detail::require_non_negative(p.kappa2, "kappa2");
  detail::require_non_negative(p.gamma_m, "gamma_m");
  detail::require_non_negative(p.hopping, "J");
  detail::require_finite(p.om_coupling1, "g1");
  detail::require_finite(p.om_coupling2, "g2");
  detail::require_finite(p.detuning_c1, "Delta_c1");
  detail::require_finite(p.detuning_c2, "Delta_c2");
  detail::require_non_negative(p.drive1, "Omega1");
  detail::require_non_negative(p.drive2, "Omega2");
  detail::require_non_negative(p.gain0, "g0");
  detail::require_non_negative(p.loss0, "f0");
  detail::require_non_negative(p.nbar, "nbar");
  for (double v : {p.kappa1, p.kappa2, p.gamma_m, p.hopping, p.drive1, p.drive2, p.gain0, p.loss0, p.nbar}) {
    if (!std::isfinite(v)) throw ValidationError("system parameters must be finite");
  }
}

inline void validate(const EffectiveParams& e) {
  detail::require_finite(e.detuning1, "Delta1");
  detail::require_finite(e.detuning2, "Delta2");
  detail::require_non_negative(e.coupling1, "G1");
  detail::require_non_negative(e.coupling2, "G2");
  detail::require_finite(e.coupling1, "G1");
  detail::require_finite(e.coupling2, "G2");
  detail::require_finite(e.net_gain, "g_net");
  detail::require_finite(e.net_loss, "f_net");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!(e.phase1 >= 0.0 && e.phase1 < two_pi)) throw ValidationError("theta1 must lie in [0, 2pi)");
  if (!(e.phase2 >= 0.0 && e.phase2 < two_pi)) throw ValidationError("theta2 must lie in [0, 2pi)");
}

/// Maps any finite angle into [0, 2pi).
inline double wrap_phase(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(angle, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

/// g_s = g0 / (1 + |alpha1|^2), f_s = f0 / (1 + |alpha2|^2).
inline SaturableRates saturable_rates(double g0, double f0, std::complex<double> alpha1,
                                      std::complex<double> alpha2) {
  return {g0 / (1.0 + std::norm(alpha1)), f0 / (1.0 + std::norm(alpha2))};
}

/// g = g_s - kappa1, f = f_s + kappa2.
inline NetRates net_rates(const SystemParams& params, double sat_gain, double sat_loss) {
  return {sat_gain - params.kappa1, sat_loss + params.kappa2};
}

/// Effective-mode operating point: the linearized couplings and detunings are
/// given directly together with the saturated rates g_s and f_s.
struct OperatingPoint {
  double detuning1 = 0.0;
  double detuning2 = 0.0;
  double coupling1 = 0.0;
  double coupling2 = 0.0;
  double phase1 = 0.0;
  double phase2 = 0.0;
  double sat_gain = 0.0;  ///< g_s
  double sat_loss = 0.0;  ///< f_s

  friend bool operator==(const OperatingPoint&, const OperatingPoint&) = default;
};

inline EffectiveParams resolve_effective(const SystemParams& params, const OperatingPoint& op) {
  detail::require_non_negative(op.sat_gain, "gs");
  detail::require_non_negative(op.sat_loss, "fs");
  const NetRates net = net_rates(params, op.sat_gain, op.sat_loss);
  EffectiveParams e{op.detuning1, op.detuning2, op.coupling1, op.coupling2,
                    wrap_phase(op.phase1), wrap_phase(op.phase2), net.gain, net.loss};
  validate(e);
  return e;
}

/// Device of the reference figures: kappa_j = 0.1, gamma_m = 1e-5, J = 0.2,
/// nbar = 100 (all in units of omega_m).
inline SystemParams reference_device() {
  SystemParams p;
  p.omega_m = 1.0;
  p.kappa1 = 0.1;
  p.kappa2 = 0.1;
  p.gamma_m = 1e-5;
  p.hopping = 0.2;
  p.detuning_c1 = 1.0;
  p.detuning_c2 = 1.0;
  p.nbar = 100.0;
  return p;
}

/// Red-sideband operating point with G_j = 0.2 and no saturable rates.
inline OperatingPoint reference_operating_point() {
  OperatingPoint op;
  op.detuning1 = 1.0;
  op.detuning2 = 1.0;
  op.coupling1 = 0.2;
  op.coupling2 = 0.2;
  return op;
}

inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K

/// Bose-Einstein occupation 1 / (exp(hbar w / kT) - 1), w = 2 pi f.
/// Zero temperature returns 0 (the limit) rather than evaluating 1/inf.
inline double thermal_occupation(const ThermalEnvironment& env) {
  if (!(env.temperature >= 0.0)) throw ValidationError("temperature must be >= 0");
  if (!(env.mech_frequency > 0.0)) throw ValidationError("mechanical frequency must be > 0");
  if (env.temperature == 0.0) return 0.0;
  const double x = kHbar * 2.0 * std::numbers::pi * env.mech_frequency / (kBoltzmann * env.temperature);
  return 1.0 / std::expm1(x);
}

}  // namespace optosat
