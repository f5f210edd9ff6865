#pragma once

// Maps a two-ion trap (reduced mass, end-cap voltage, half spacing) onto the
// singular-oscillator constants. Coulomb energies follow the Gaussian form
// e^2/x, with e^2 meaning q^2 / (4 pi eps0) in SI.

#include <cmath>
#include <numbers>

#include "singosc/errors.hpp"

namespace singosc::trap {

/// CODATA 2018.
namespace codata {
inline constexpr double electron_mass = 9.1093837015e-31;      // kg
inline constexpr double elementary_charge = 1.602176634e-19;   // C
inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double rydberg_energy = 2.1798723611035e-18;  // J
inline constexpr double bohr_radius = 5.29177210903e-11;       // m
}  // namespace codata

struct TrapParameters {
  double reduced_mass_ratio = 1e5;  // mu / m_e
  double voltage_V = 100.0;         // U
  double half_spacing_m = 1e-3;     // L
  double charge = 1.0;              // in elementary charges
};

struct ModelParameters {
  double omega = 0;    // rad/s, omega^2 = qU / (2 mu L^2)
  double omega_g = 0;  // rad/s
  double g_SI = 0;     // J m^2
  double g_star = 0;   // 2 mu g / hbar^2
  double d = 0;        // sqrt(1 + 4 g*) / 2
  double n_max = 0;    // 3 g*^{1/6}
  double n_max_alt = 0;  // 3 (mu e^4 / (hbar^3 omega))^{1/9}
  bool n_max_is_estimate = true;
  double x_e = 0;      // m
  double x_g = 0;      // m
  double Omega_e = 0;  // rad/s
  double Omega_g = 0;  // rad/s
  double V_min = 0;    // J
  double Vg_min = 0;   // J
  double mu_kg = 0;
  double coulomb_e2 = 0;  // Gaussian e^2, J m
};

inline ModelParameters effective_params(const TrapParameters& trap) {
  if (!(trap.reduced_mass_ratio > 0) || !(trap.voltage_V > 0) || !(trap.half_spacing_m > 0) || !(trap.charge > 0)) {
    throw DomainError("effective_params: trap parameters must be positive");
  }
  using namespace codata;
  const double mu = trap.reduced_mass_ratio * electron_mass;
  const double q = trap.charge * elementary_charge;
  const double L = trap.half_spacing_m;
  const double e2 = q * q / (4.0 * std::numbers::pi * vacuum_permittivity);

  ModelParameters p;
  p.mu_kg = mu;
  p.coulomb_e2 = e2;
  const double w2 = q * trap.voltage_V / (2.0 * mu * L * L);
  p.omega = std::sqrt(w2);
  p.omega_g = std::sqrt(3.0) / 2.0 * p.omega;
  p.x_e = std::cbrt(e2 / (mu * w2));
  p.g_SI = 3.0 / 8.0 * std::cbrt(std::pow(e2, 4) / (mu * w2));

  // Rydberg / Bohr-radius form, dimensionless at every step.
  const double z = trap.charge;
  const double bracket = 4.0 * rydberg_energy * std::pow(z, 7) / (elementary_charge * trap.voltage_V) *
                         (L / bohr_radius) * (L / bohr_radius);
  p.g_star = 0.75 * trap.reduced_mass_ratio * std::cbrt(bracket);
  p.d = 0.5 * std::sqrt(1.0 + 4.0 * p.g_star);
  p.n_max = 3.0 * std::pow(p.g_star, 1.0 / 6.0);
  p.n_max_alt = 3.0 * std::pow(mu * e2 * e2 / (hbar * hbar * hbar * p.omega), 1.0 / 9.0);

  p.x_g = std::pow(2.0 * p.g_SI / (mu * p.omega_g * p.omega_g), 0.25);
  p.Omega_e = std::sqrt(3.0) * p.omega;
  p.Omega_g = 2.0 * p.omega_g;
  p.V_min = 1.5 * mu * w2 * p.x_e * p.x_e;
  p.Vg_min = mu * p.omega_g * p.omega_g * p.x_g * p.x_g;
  return p;
}

struct PotentialValues {
  double V;
  double V_g;
};

/// V = mu w^2 x^2 / 2 + e^2 / x and V_g = mu w_g^2 x^2 / 2 + g / x^2.
inline PotentialValues potentials(const ModelParameters& p, double x) {
  if (!(x > 0.0)) throw DomainError("potentials: x must be positive");
  return {0.5 * p.mu_kg * p.omega * p.omega * x * x + p.coulomb_e2 / x,
          0.5 * p.mu_kg * p.omega_g * p.omega_g * x * x + p.g_SI / (x * x)};
}

/// Analytic second derivatives V''(x_e) and V_g''(x_g).
inline PotentialValues curvatures_at_minima(const ModelParameters& p) {
  return {p.mu_kg * p.omega * p.omega + 2.0 * p.coulomb_e2 / std::pow(p.x_e, 3),
          p.mu_kg * p.omega_g * p.omega_g + 6.0 * p.g_SI / std::pow(p.x_g, 4)};
}

}  // namespace singosc::trap
