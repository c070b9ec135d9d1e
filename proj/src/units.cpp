// SPDX-License-Identifier: Apache-2.0
#include "vbohm/units.hpp"

#include <cmath>

#include "vbohm/errors.hpp"

namespace vbohm::units {

static_assert(hartree_in_ev > 27.2 && hartree_in_ev < 27.3);

double ev_to_hartree(double e_ev) {
  if (!std::isfinite(e_ev)) throw DomainError("ev_to_hartree: non-finite energy");
  return e_ev / hartree_in_ev;
}

double hartree_to_ev(double e_ha) {
  if (!std::isfinite(e_ha)) throw DomainError("hartree_to_ev: non-finite energy");
  return e_ha * hartree_in_ev;
}

double kelvin_to_ev(double t_kelvin) {
  if (!std::isfinite(t_kelvin) || t_kelvin <= 0.0)
    throw DomainError("kelvin_to_ev: temperature must be positive and finite");
  return t_kelvin * boltzmann_ev_per_kelvin;
}

double kappa_from_temperature(double t_ev) {
  if (!std::isfinite(t_ev) || t_ev <= 0.0)
    throw DomainError("kappa_from_temperature: k_B T must be positive");
  return std::sqrt(2.0 * electron_mass * ev_to_hartree(t_ev)) / hbar;
}

} // namespace vbohm::units
