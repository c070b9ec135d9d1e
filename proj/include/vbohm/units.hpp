// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <numbers>

/// Hartree atomic units: hbar = m_e = e = 1, eps0 = 1/(4 pi).
/// Everything inside the library works in these units; only the CLI converts.
namespace vbohm::units {

inline constexpr double hbar = 1.0;
inline constexpr double electron_mass = 1.0;
inline constexpr double charge = 1.0;
inline constexpr double eps0 = 1.0 / (4.0 * std::numbers::pi);

/// CODATA 2018 Hartree energy in eV.
inline constexpr double hartree_in_ev = 27.211386245988;
/// CODATA 2018 Boltzmann constant in eV/K.
inline constexpr double boltzmann_ev_per_kelvin = 8.617333262e-5;

double ev_to_hartree(double e_ev);
double hartree_to_ev(double e_ha);
double kelvin_to_ev(double t_kelvin);

/// kappa = sqrt(2 m k_B T) / hbar for a Maxwell-Boltzmann gas, input k_B T in eV.
double kappa_from_temperature(double t_ev);

} // namespace vbohm::units
