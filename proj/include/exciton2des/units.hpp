// units.hpp — wavenumber / femtosecond conventions
#pragma once

#include <numbers>

namespace exciton2des::units {

// Speed of light in cm/fs.
inline constexpr double speed_of_light = 2.99792458e-5;

// 2*pi*c: angular frequency (rad/fs) per wavenumber (cm^-1).
inline constexpr double kappa = 2.0 * std::numbers::pi * speed_of_light;

// k_B/(h c) in cm^-1 per kelvin.
inline constexpr double boltzmann = 0.695034800;

constexpr double angular_frequency(double wavenumber) { return kappa * wavenumber; }
constexpr double wavenumber(double angular) { return angular / kappa; }
constexpr double thermal_energy(double kelvin) { return boltzmann * kelvin; }

}  // namespace exciton2des::units
