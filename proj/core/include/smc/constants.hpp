#pragma once

#include <numbers>

namespace smc {

inline constexpr double pi = std::numbers::pi;

// SI defining constants (2019 redefinition)
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double k_boltzmann = 1.380649e-23; // J/K

// diamond bulk density used to derive particle mass from radius
inline constexpr double diamond_density = 3515.0;   // kg/m^3

inline constexpr char version_string[] = "0.1.0";

}  // namespace smc
