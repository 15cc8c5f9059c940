#pragma once

// CODATA 2018 values, SI units.
namespace ffq::constants {

inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck_h          = 6.62607015e-34;   // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace ffq::constants
