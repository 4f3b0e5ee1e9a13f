#pragma once

// Two-level atomic ensemble placed in one arm of the interferometer.
//
// The ensemble enters the photon statistics only through the intensity
// transmission T and the phase shift phi it imposes on a photon of frequency
// omega = omega0 + delta:
//
//   chi(delta) = A (delta + i gamma_s) / (delta^2 + gamma_s^2),  A = 2 N mu^2 / (hbar eps0)
//   T   = exp(-chi'' omega L / c)
//   phi = -chi' omega L / (2 c)
//
// Derivatives with respect to the detuning are evaluated in closed form.

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "constants.hpp"

namespace fisherspec {

/// Physical parameters of the atomic ensemble (SI units).
struct Medium {
  double mu = 0.0;       ///< electric dipole moment [C m]
  double gamma_s = 0.0;  ///< spontaneous decay rate [1/s]
  double omega0 = 0.0;   ///< transition angular frequency [rad/s]
  double density = 0.0;  ///< atom number density [1/m^3]
  double length = 0.0;   ///< cell length [m]

  /// Throws std::invalid_argument unless mu, gamma_s, omega0, length > 0
  /// and density >= 0 (all finite).
  void validate() const {
    auto bad = [](double v) { return !std::isfinite(v); };
    if (bad(mu) || bad(gamma_s) || bad(omega0) || bad(density) || bad(length)) {
      throw std::invalid_argument("medium parameters must be finite");
    }
    if (mu <= 0.0) throw std::invalid_argument("medium: mu must be > 0");
    if (gamma_s <= 0.0) throw std::invalid_argument("medium: gamma_s must be > 0");
    if (omega0 <= 0.0) throw std::invalid_argument("medium: omega0 must be > 0");
    if (density < 0.0) throw std::invalid_argument("medium: density must be >= 0");
    if (length <= 0.0) throw std::invalid_argument("medium: length must be > 0");
  }

  [[nodiscard]] Medium with_density(double n) const {
    Medium m = *this;
    m.density = n;
    return m;
  }

  [[nodiscard]] Medium with_length(double l) const {
    Medium m = *this;
    m.length = l;
    return m;
  }

  /// Lorentzian amplitude A = 2 N mu^2 / (hbar eps0) [1/s].
  [[nodiscard]] double susceptibility_scale() const {
    return 2.0 * density * mu * mu / (PhysicalConstants::hbar * PhysicalConstants::eps0);
  }
};

/// D1 line of sodium, 1 cm cell. Density is left for the caller.
inline Medium sodium_d1(double density = 2.5e16) {
  Medium m;
  m.mu = 0.704e-29;
  m.gamma_s = 61.354e6;
  m.omega0 = 2.0 * kPi * 508.332e12;
  m.density = density;
  m.length = 0.01;
  return m;
}

struct Susceptibility {
  double chi_re = 0.0;   ///< chi'
  double chi_im = 0.0;   ///< chi''
  double dchi_re = 0.0;  ///< d chi' / d delta [s]
  double dchi_im = 0.0;  ///< d chi'' / d delta [s]
};

struct ArmResponse {
  double transmissivity = 1.0;    ///< T in (0, 1]
  double phase = 0.0;             ///< phi [rad]
  double d_transmissivity = 0.0;  ///< dT / d delta [s]
  double d_phase = 0.0;           ///< d phi / d delta [s]

  /// ln T and d(ln T)/d delta. Kept alongside T so that deep absorption
  /// dips do not have to be recovered from an underflowing T.
  double log_transmissivity = 0.0;
  double d_log_transmissivity = 0.0;

  /// Builds a response directly from (T, phi) and their derivatives.
  static ArmResponse from_values(double t, double phi, double dt = 0.0, double dphi = 0.0) {
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("arm: transmissivity must lie in (0, 1]");
    ArmResponse a;
    a.transmissivity = t;
    a.phase = phi;
    a.d_transmissivity = dt;
    a.d_phase = dphi;
    a.log_transmissivity = std::log(t);
    a.d_log_transmissivity = dt / t;
    return a;
  }
};

/// chi(delta) and its derivative; delta in rad/s.
inline Susceptibility susceptibility(const Medium& medium, double delta) {
  const double a = medium.susceptibility_scale();
  const double g = medium.gamma_s;
  const double den = delta * delta + g * g;
  Susceptibility s;
  s.chi_re = a * delta / den;
  s.chi_im = a * g / den;
  s.dchi_re = a * (g * g - delta * delta) / (den * den);
  s.dchi_im = -2.0 * a * g * delta / (den * den);
  return s;
}

/// Transmissivity and phase of the ensemble arm at detuning delta [rad/s].
/// Throws std::invalid_argument when omega0 + delta <= 0.
inline ArmResponse arm_response(const Medium& medium, double delta) {
  const double omega = medium.omega0 + delta;
  if (!(omega > 0.0)) {
    std::ostringstream os;
    os << "arm_response: photon frequency omega0 + delta = " << omega << " must be positive";
    throw std::invalid_argument(os.str());
  }
  const Susceptibility s = susceptibility(medium, delta);
  const double k = medium.length / PhysicalConstants::c;

  ArmResponse r;
  r.log_transmissivity = -s.chi_im * omega * k;
  r.d_log_transmissivity = -k * (s.chi_im + omega * s.dchi_im);
  r.transmissivity = std::exp(r.log_transmissivity);
  r.d_transmissivity = r.transmissivity * r.d_log_transmissivity;
  r.phase = -0.5 * s.chi_re * omega * k;
  r.d_phase = -0.5 * k * (s.chi_re + omega * s.dchi_re);
  return r;
}

}  // namespace fisherspec
